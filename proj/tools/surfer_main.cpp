// surfer: experiment harness around the sampling-based ranking estimator.
//
// Subcommands:
//   run            seeded replica runs, one trace CSV per replica + summary
//   oracle         exact fixed point and stationary distribution files
//   complexity     contraction/exit-distance diagnostics report
//   variance-sweep several configs on one node count, tabulated by variance
//
// Exit status: 0 success, 1 validation error, 2 runtime error.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "surfer/experiment.hpp"
#include "surfer/kernels.hpp"

namespace {

constexpr const char* kConfigHelp = R"(Config file: flat `key = value` lines, '#' comments.

  graph.kind          uniform | power-law | edge-list   (default uniform)
  graph.n             node count (synthetic kinds)
  graph.seed          generator seed                    (default 0)
  graph.degree_min    uniform kind: degree lower bound  (default 1)
  graph.degree_max    uniform kind: degree upper bound  (default 1)
  graph.exponent      power-law kind: exponent > 1      (default 2.0)
  graph.target_zipf   target popularity skew, >= 0      (default 0)
  graph.path          edge-list kind: input file
  c                   damping in (0, 1)                 (default 0.85)
  schedule.kind       polynomial | piecewise            (default polynomial)
  schedule.a0         initial step                      (default 0.5)
  schedule.offset     polynomial offset K               (default 1000)
  schedule.rho        polynomial exponent in (0.5, 1]   (default 0.75)
  schedule.plateau    piecewise plateau length          (default 1000)
  schedule.ratio      piecewise decay ratio in (0, 1]   (default 0.5)
  schedule.floor      piecewise tracking floor          (default 0 = off)
  batch               sample pairs per update           (default 1)
  iters               updates per replica               (default 100000)
  checkpoint_every    trace cadence                     (default 1000)
  replicas            independent seeded runs           (default 1)
  base_seed           replica seeds are base_seed + i   (default 0)
  criterion.top       top true ranks to track           (default 5)
  criterion.window    estimated window size             (default 10)
  out                 output directory                  (default out)
  workers             concurrent replicas, 0 = auto     (default 0)
  record_timing       wall-clock column in traces; off keeps
                      outputs bit-reproducible          (default false)
  quiet               suppress progress output          (default false)
  svg                 also draw each trace              (default false)
  oracle.tol          solver tolerance                  (default 1e-12)
  complexity.t_grid   comma list of flow horizons       (default N/2,N,2N)
  complexity.kappa_samples  exit-distance sample count  (default 20000)
)";

struct CommonFlags {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::uint64_t> workers;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--seed", flags.seed, "Override base_seed");
    cmd->add_option("--out", flags.out, "Override output directory");
    cmd->add_option("--workers", flags.workers, "Override worker count");
    cmd->add_flag("--quiet", flags.quiet, "Suppress progress output");
}

surfer::ExperimentConfig load(const std::string& path, const CommonFlags& flags) {
    surfer::ExperimentConfig cfg = surfer::parse_config_file(path);
    if (flags.seed) cfg.base_seed = *flags.seed;
    if (flags.out) cfg.out_dir = *flags.out;
    if (flags.workers) cfg.workers = *flags.workers;
    if (flags.quiet) cfg.quiet = true;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sampling-based ranking estimator harness"};
    app.footer(kConfigHelp);
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> config_paths;
    CommonFlags flags;

    auto* cmd_run = app.add_subcommand("run", "Run seeded replicas, write traces");
    cmd_run->add_option("--config", config_path, "Config file")->required();
    add_common(cmd_run, flags);

    auto* cmd_oracle = app.add_subcommand("oracle", "Write exact solution files");
    cmd_oracle->add_option("--config", config_path, "Config file")->required();
    add_common(cmd_oracle, flags);

    auto* cmd_complexity = app.add_subcommand("complexity", "Write diagnostics report");
    cmd_complexity->add_option("--config", config_path, "Config file")->required();
    add_common(cmd_complexity, flags);

    auto* cmd_sweep = app.add_subcommand(
        "variance-sweep", "Run several configs, tabulate by reference variance");
    cmd_sweep->add_option("--config", config_paths, "Config files (repeat)")
        ->required()
        ->expected(-1);
    add_common(cmd_sweep, flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) {
            surfer::cmd_run(load(config_path, flags));
        } else if (cmd_oracle->parsed()) {
            surfer::cmd_oracle(load(config_path, flags));
        } else if (cmd_complexity->parsed()) {
            surfer::cmd_complexity(load(config_path, flags));
        } else if (cmd_sweep->parsed()) {
            std::vector<surfer::ExperimentConfig> configs;
            for (std::size_t i = 0; i < config_paths.size(); ++i) {
                surfer::ExperimentConfig cfg = load(config_paths[i], flags);
                if (flags.out || config_paths.size() > 1) {
                    // keep per-config outputs apart under the sweep directory
                    const auto base = flags.out ? std::filesystem::path(*flags.out)
                                                : cfg.out_dir;
                    cfg.out_dir = base / ("config_" + std::to_string(i));
                }
                configs.push_back(std::move(cfg));
            }
            const auto table_dir = flags.out ? std::filesystem::path(*flags.out)
                                             : configs.front().out_dir.parent_path();
            std::error_code ec;
            std::filesystem::create_directories(table_dir, ec);
            const auto rows =
                surfer::cmd_variance_sweep(configs, table_dir / "sweep.csv");
            if (!flags.quiet) {
                std::cout << "variance -> median iterations to sustained zero miss\n";
                for (const auto& row : rows) {
                    std::cout << "  " << row.z_star_variance << " -> ";
                    if (row.median_iters_to_zero_miss)
                        std::cout << *row.median_iters_to_zero_miss;
                    else
                        std::cout << "never";
                    std::cout << "  (" << row.converged_replicas << " converged, "
                              << row.label << ")\n";
                }
            }
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
