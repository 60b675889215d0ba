#include "surfer/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "surfer/estimator.hpp"
#include "surfer/oracle.hpp"
#include "surfer/svg.hpp"

namespace surfer {

namespace {

constexpr double kProportionalityTol = 1e-8;

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw std::invalid_argument("config key " + key + ": not a number: " + value);
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size() || value.front() == '-') throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw std::invalid_argument("config key " + key +
                                    ": not a nonnegative integer: " + value);
    }
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::invalid_argument("config key " + key + ": expected true/false: " + value);
}

std::vector<double> to_double_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::string item;
    std::istringstream ss(value);
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
    return out;
}

}  // namespace

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config " + path.string());

    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) +
                                        ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) +
                                        ": empty key or value");
        if (!kv.emplace(key, value).second)
            throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) +
                                        ": duplicate key " + key);
    }

    ExperimentConfig cfg;
    // schedule parts are collected first so the factory can validate them
    // together
    std::string schedule_kind = "polynomial";
    double a0 = 0.5, offset = 1000.0, rho = 0.75, ratio = 0.5, floor = 0.0;
    std::uint64_t plateau = 1000;

    for (const auto& [key, value] : kv) {
        if (key == "graph.kind") {
            if (value == "uniform") cfg.graph.kind = GraphSpec::Kind::uniform_out_degree;
            else if (value == "power-law") cfg.graph.kind = GraphSpec::Kind::power_law_out_degree;
            else if (value == "edge-list") cfg.graph.kind = GraphSpec::Kind::edge_list;
            else throw std::invalid_argument("graph.kind must be uniform, power-law, or edge-list");
        } else if (key == "graph.n") {
            cfg.graph.n_nodes = to_u64(key, value);
        } else if (key == "graph.seed") {
            cfg.graph.seed = to_u64(key, value);
        } else if (key == "graph.degree_min") {
            cfg.graph.degree_min = to_u64(key, value);
        } else if (key == "graph.degree_max") {
            cfg.graph.degree_max = to_u64(key, value);
        } else if (key == "graph.exponent") {
            cfg.graph.exponent = to_double(key, value);
        } else if (key == "graph.target_zipf") {
            cfg.graph.target_zipf = to_double(key, value);
        } else if (key == "graph.path") {
            cfg.graph.path = value;
        } else if (key == "c") {
            cfg.c = to_double(key, value);
        } else if (key == "schedule.kind") {
            schedule_kind = value;
        } else if (key == "schedule.a0") {
            a0 = to_double(key, value);
        } else if (key == "schedule.offset") {
            offset = to_double(key, value);
        } else if (key == "schedule.rho") {
            rho = to_double(key, value);
        } else if (key == "schedule.plateau") {
            plateau = to_u64(key, value);
        } else if (key == "schedule.ratio") {
            ratio = to_double(key, value);
        } else if (key == "schedule.floor") {
            floor = to_double(key, value);
        } else if (key == "batch") {
            cfg.batch = to_u64(key, value);
        } else if (key == "iters") {
            cfg.n_iters = to_u64(key, value);
        } else if (key == "checkpoint_every") {
            cfg.checkpoint_every = to_u64(key, value);
        } else if (key == "replicas") {
            cfg.replicas = to_u64(key, value);
        } else if (key == "base_seed") {
            cfg.base_seed = to_u64(key, value);
        } else if (key == "criterion.top") {
            cfg.criterion_top = to_u64(key, value);
        } else if (key == "criterion.window") {
            cfg.criterion_window = to_u64(key, value);
        } else if (key == "out") {
            cfg.out_dir = value;
        } else if (key == "workers") {
            cfg.workers = to_u64(key, value);
        } else if (key == "record_timing") {
            cfg.record_timing = to_bool(key, value);
        } else if (key == "quiet") {
            cfg.quiet = to_bool(key, value);
        } else if (key == "svg") {
            cfg.emit_svg = to_bool(key, value);
        } else if (key == "oracle.tol") {
            cfg.oracle_tol = to_double(key, value);
        } else if (key == "complexity.t_grid") {
            cfg.t_grid = to_double_list(key, value);
        } else if (key == "complexity.kappa_samples") {
            cfg.kappa_samples = to_u64(key, value);
        } else {
            throw std::invalid_argument("unknown config key: " + key);
        }
    }

    if (schedule_kind == "polynomial") {
        cfg.schedule = StepSchedule::polynomial(a0, offset, rho);
    } else if (schedule_kind == "piecewise") {
        cfg.schedule = StepSchedule::piecewise(a0, plateau, ratio, floor);
    } else {
        throw std::invalid_argument("schedule.kind must be polynomial or piecewise");
    }

    if (cfg.graph.kind == GraphSpec::Kind::edge_list) {
        if (cfg.graph.path.empty())
            throw std::invalid_argument("graph.kind = edge-list requires graph.path");
    } else if (cfg.graph.n_nodes == 0) {
        throw std::invalid_argument("graph.n must be set and positive");
    }
    if (!(cfg.c > 0.0 && cfg.c < 1.0))
        throw std::invalid_argument("c must lie in (0, 1)");
    if (cfg.n_iters == 0) throw std::invalid_argument("iters must be positive");
    if (cfg.checkpoint_every == 0)
        throw std::invalid_argument("checkpoint_every must be positive");
    if (cfg.batch == 0) throw std::invalid_argument("batch must be positive");
    if (cfg.replicas == 0) throw std::invalid_argument("replicas must be positive");
    if (!(cfg.oracle_tol > 0.0)) throw std::invalid_argument("oracle.tol must be positive");
    return cfg;
}

namespace {

void ensure_out_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw std::runtime_error("cannot create output directory " + dir.string());
}

std::string trace_file_name(std::size_t replica) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "trace_%04zu.csv", replica);
    return buf;
}

void write_vector_file(const std::filesystem::path& path, std::span<const double> v) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (double x : v) out << format_g17(x) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

// lower median: element at index (n-1)/2 of the sorted range
template <typename T>
T lower_median(std::vector<T> values) {
    std::sort(values.begin(), values.end());
    return values[(values.size() - 1) / 2];
}

// median over censored counts; empty when half or more never converged
std::optional<std::uint64_t> median_iterations(
    const std::vector<ReplicaResult>& replicas) {
    std::vector<std::optional<std::uint64_t>> v;
    v.reserve(replicas.size());
    for (const auto& r : replicas) v.push_back(r.zero_miss_from);
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
        if (a.has_value() != b.has_value()) return a.has_value();  // nullopt = +inf
        return a.value_or(0) < b.value_or(0);
    });
    return v[(v.size() - 1) / 2];
}

}  // namespace

RunSummary cmd_run(const ExperimentConfig& config) {
    const TransitionModel model = generate(config.graph);
    const std::size_t n = model.n_nodes();
    const FixedPoint fp = solve_fixed_point(model, config.c, config.oracle_tol);

    // validate everything before spawning work
    const RankCriterion crit =
        make_rank_criterion(config.criterion_top, config.criterion_window, fp.z_star);
    ensure_out_dir(config.out_dir);

    RunSummary summary;
    summary.n_nodes = n;
    summary.z_star_variance = variance(fp.z_star);
    summary.replicas.resize(config.replicas);

    const std::size_t worker_count =
        std::max<std::size_t>(1, std::min<std::size_t>(
            config.workers ? config.workers : std::thread::hardware_concurrency(),
            config.replicas));

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    const auto worker = [&] {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= config.replicas) return;
            try {
                const std::uint64_t seed = config.base_seed + idx;
                Sampler sampler(model, seed);
                EstimatorState state =
                    init_state(n, config.c, config.schedule, config.batch);
                RunOptions options;
                options.n_iters = config.n_iters;
                options.checkpoint_every = config.checkpoint_every;
                options.record_timing = config.record_timing;
                const ConvergenceTrace trace =
                    run(sampler, state, options, fp.z_star, &crit);

                const auto trace_path = config.out_dir / trace_file_name(idx);
                write_trace_csv(trace_path, trace);
                if (config.emit_svg) {
                    auto svg_path = trace_path;
                    svg_path.replace_extension(".svg");
                    write_trace_svg(svg_path, trace, "replica " + std::to_string(idx));
                }
                ReplicaResult result;
                result.seed = seed;
                result.final_l1 = trace.rows.back().l1_distance;
                result.zero_miss_from = sustained_zero_miss_iteration(trace);
                summary.replicas[idx] = result;
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(worker_count);
    for (std::size_t w = 0; w < worker_count; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);

    std::vector<double> final_l1;
    final_l1.reserve(config.replicas);
    for (const auto& r : summary.replicas) final_l1.push_back(r.final_l1);
    summary.median_final_l1 = lower_median(std::move(final_l1));

    std::ofstream out(config.out_dir / "summary.txt", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write summary.txt");
    out << "n_nodes = " << n << "\n"
        << "replicas = " << config.replicas << "\n"
        << "n_iters = " << config.n_iters << "\n"
        << "z_star_variance = " << format_g17(summary.z_star_variance) << "\n"
        << "median_final_l1 = " << format_g17(summary.median_final_l1) << "\n"
        << "# replica,seed,final_l1,iters_to_zero_miss (-1 = never)\n";
    for (std::size_t i = 0; i < summary.replicas.size(); ++i) {
        const auto& r = summary.replicas[i];
        out << i << ',' << r.seed << ',' << format_g17(r.final_l1) << ',';
        if (r.zero_miss_from)
            out << *r.zero_miss_from;
        else
            out << -1;
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed: summary.txt");

    if (!config.quiet) {
        std::cout << "ran " << config.replicas << " replicas on " << n
                  << " nodes; median final L1 = " << summary.median_final_l1 << "\n";
    }
    return summary;
}

double proportionality_gap(std::span<const double> pi, std::span<const double> z_star,
                           double c) {
    if (pi.size() != z_star.size())
        throw std::invalid_argument("dimension mismatch in proportionality_gap");
    const double factor = (1.0 - c) / static_cast<double>(pi.size());
    double gap = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i)
        gap = std::max(gap, std::abs(pi[i] - factor * z_star[i]));
    return gap;
}

void cmd_oracle(const ExperimentConfig& config) {
    const TransitionModel model = generate(config.graph);
    const FixedPoint fp = solve_fixed_point(model, config.c, config.oracle_tol);
    const GoogleMatrix gm(model, config.c);
    const std::vector<double> pi = stationary_power_method(gm, config.oracle_tol);

    const double gap = proportionality_gap(pi, fp.z_star, config.c);
    if (gap > kProportionalityTol)
        throw std::runtime_error(
            "stationary distribution and fixed point disagree (gap " +
            format_g17(gap) + "); refusing to write oracle files");

    ensure_out_dir(config.out_dir);
    write_vector_file(config.out_dir / "z_star.txt", fp.z_star);
    write_vector_file(config.out_dir / "pi.txt", pi);
    if (!config.quiet) {
        std::cout << "wrote z_star.txt and pi.txt (proportionality gap " << gap
                  << ")\n";
    }
}

ComplexityReport cmd_complexity(const ExperimentConfig& config) {
    const TransitionModel model = generate(config.graph);
    const std::size_t n = model.n_nodes();
    if (n > kDenseGuard)
        throw std::invalid_argument("complexity report needs n_nodes <= " +
                                    std::to_string(kDenseGuard));
    const FixedPoint fp = solve_fixed_point(model, config.c, config.oracle_tol);
    const RankCriterion crit =
        make_rank_criterion(config.criterion_top, config.criterion_window, fp.z_star);

    std::vector<double> grid = config.t_grid;
    if (grid.empty()) {
        const auto nd = static_cast<double>(n);
        grid = {nd / 2.0, nd, 2.0 * nd};
    }
    const ComplexityReport report =
        complexity_report(model, config.c, crit, config.schedule, grid,
                          config.base_seed, config.kappa_samples);

    ensure_out_dir(config.out_dir);
    std::ofstream out(config.out_dir / "complexity.txt", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write complexity.txt");
    out << "n_nodes = " << n << "\n"
        << "c = " << format_g17(config.c) << "\n"
        << "t_flow = " << format_g17(report.t_flow) << "\n"
        << "norm1 = " << format_g17(report.norm1) << "\n"
        << "kappa_estimate = " << format_g17(report.kappa_estimate) << "\n"
        << "gamma = " << format_g17(report.gamma) << "\n"
        << "tau = " << format_g17(report.tau) << "\n"
        << "n0 = " << report.n0 << "\n"
        << "n0_exact = " << (report.n0_exact ? "true" : "false") << "\n"
        << "delta = " << format_g17(report.delta) << "\n"
        << "# caveat: " << report.caveat << "\n";
    if (!out) throw std::runtime_error("write failed: complexity.txt");
    if (!config.quiet) std::cout << "wrote complexity.txt\n";
    return report;
}

std::vector<SweepRow> cmd_variance_sweep(std::span<const ExperimentConfig> configs,
                                         const std::filesystem::path& table_path) {
    if (configs.size() < 2)
        throw std::invalid_argument("variance sweep needs at least 2 configs");

    std::vector<SweepRow> rows;
    std::size_t n_nodes = 0;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const RunSummary summary = cmd_run(configs[i]);
        if (i == 0) {
            n_nodes = summary.n_nodes;
        } else if (summary.n_nodes != n_nodes) {
            throw std::invalid_argument("variance sweep configs must share the node count");
        }
        SweepRow row;
        row.label = configs[i].out_dir.string();
        row.z_star_variance = summary.z_star_variance;
        row.median_iters_to_zero_miss = median_iterations(summary.replicas);
        for (const auto& r : summary.replicas)
            if (r.zero_miss_from) ++row.converged_replicas;
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        return a.z_star_variance < b.z_star_variance;
    });

    std::ofstream out(table_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + table_path.string());
    out << "label,z_star_variance,median_iters_to_zero_miss,converged_replicas\n";
    for (const SweepRow& row : rows) {
        out << row.label << ',' << format_g17(row.z_star_variance) << ',';
        if (row.median_iters_to_zero_miss)
            out << *row.median_iters_to_zero_miss;
        else
            out << -1;
        out << ',' << row.converged_replicas << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + table_path.string());
    return rows;
}

}  // namespace surfer
