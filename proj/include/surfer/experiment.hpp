#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "surfer/analysis.hpp"
#include "surfer/graph.hpp"
#include "surfer/schedule.hpp"

namespace surfer {

// Everything one experiment needs, read from a flat key=value config file.
// All fields validate against their module's preconditions before any work
// starts.
struct ExperimentConfig {
    GraphSpec graph;
    double c = 0.85;
    StepSchedule schedule = StepSchedule{};  // polynomial 0.5 / (1 + n/1000)^0.75
    std::size_t batch = 1;
    std::uint64_t n_iters = 100000;
    std::uint64_t checkpoint_every = 1000;
    std::size_t replicas = 1;
    std::uint64_t base_seed = 0;
    std::size_t criterion_top = 5;
    std::size_t criterion_window = 10;
    std::filesystem::path out_dir = "out";
    std::size_t workers = 0;  // 0 = hardware concurrency
    bool record_timing = false;
    bool quiet = false;
    bool emit_svg = false;
    double oracle_tol = 1e-12;
    std::vector<double> t_grid;  // complexity horizons; empty = {N/2, N, 2N}
    std::size_t kappa_samples = 20000;
};

ExperimentConfig parse_config_file(const std::filesystem::path& path);

// Per-replica outcome next to the written trace files.
struct ReplicaResult {
    std::uint64_t seed = 0;
    double final_l1 = 0.0;
    // first checkpoint from which the ranking miss stays zero; empty = never
    std::optional<std::uint64_t> zero_miss_from;
};

struct RunSummary {
    std::size_t n_nodes = 0;
    double z_star_variance = 0.0;
    double median_final_l1 = 0.0;
    std::vector<ReplicaResult> replicas;
};

// Builds the graph, solves the reference fixed point, runs one seeded
// replica per index (seed = base_seed + index) across a worker pool, and
// writes trace_NNNN.csv per replica plus summary.txt into out_dir.
RunSummary cmd_run(const ExperimentConfig& config);

// Writes z_star.txt and pi.txt (one full-precision value per line) after
// checking the two solutions are proportional.
void cmd_oracle(const ExperimentConfig& config);

// max_i |pi(i) - (1-c)/N z_star(i)|; the consistency gap cmd_oracle enforces.
double proportionality_gap(std::span<const double> pi, std::span<const double> z_star,
                           double c);

// Writes complexity.txt with the report fields and caveats.
ComplexityReport cmd_complexity(const ExperimentConfig& config);

struct SweepRow {
    std::string label;
    double z_star_variance = 0.0;
    // median over replicas; empty when half or more never sustain zero miss
    std::optional<std::uint64_t> median_iters_to_zero_miss;
    std::size_t converged_replicas = 0;
};

// Runs every config (all must share the node count) and tabulates variance
// against the median iterations to sustained zero miss, sorted by variance.
std::vector<SweepRow> cmd_variance_sweep(std::span<const ExperimentConfig> configs,
                                         const std::filesystem::path& table_path);

}  // namespace surfer
