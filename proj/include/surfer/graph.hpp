#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "surfer/kernels.hpp"

namespace surfer {

struct Edge {
    std::uint32_t source = 0;
    std::uint32_t target = 0;
};

// Row-stochastic link matrix in canonical CSR form: every row sums to 1
// within 1e-12, stored probabilities are strictly positive, column indices
// are strictly increasing within each row, and no row is empty (node sets
// without out-links are repaired to the uniform row at construction).
// Immutable after construction and safe to share across threads.
class TransitionModel {
public:
    std::size_t n_nodes() const { return forward_.n_rows; }
    std::span<const std::uint64_t> row_offsets() const { return forward_.row_offsets; }
    std::span<const std::uint32_t> col_indices() const { return forward_.col_indices; }
    std::span<const double> probs() const { return forward_.values; }

    std::size_t out_degree(std::uint32_t i) const {
        return forward_.row_offsets[i + 1] - forward_.row_offsets[i];
    }

    // p(i, j); zero when the entry is absent. Binary search over the row.
    double prob(std::uint32_t i, std::uint32_t j) const;

    const kernels::Csr& forward() const { return forward_; }
    // Column-oriented copy (CSR of the transpose), built once at
    // construction so the solvers can run gather-form products.
    const kernels::Csr& transposed() const { return transpose_; }

private:
    TransitionModel() = default;
    friend TransitionModel build_from_edges(std::size_t n_nodes,
                                            std::span<const Edge> edges,
                                            std::span<const double> weights);
    kernels::Csr forward_;
    kernels::Csr transpose_;
};

// Damped surfer matrix c*P + (1-c)/N * ones, kept implicit; never densified.
// Non-owning view: the base model must outlive it, so binding a temporary is
// rejected at compile time.
struct GoogleMatrix {
    GoogleMatrix(const TransitionModel& base_model, double damping);
    GoogleMatrix(TransitionModel&&, double) = delete;
    const TransitionModel* base;
    double c;
};

// Deterministic recipe for a synthetic instance; generate() is a pure
// function of this struct, seed included.
struct GraphSpec {
    enum class Kind { uniform_out_degree, power_law_out_degree, edge_list };

    Kind kind = Kind::uniform_out_degree;
    std::size_t n_nodes = 0;
    std::uint64_t seed = 0;

    // uniform_out_degree: out-degrees drawn uniformly from [degree_min, degree_max]
    std::size_t degree_min = 1;
    std::size_t degree_max = 1;

    // power_law_out_degree: P(d) proportional to d^-exponent on [1, n_nodes-1]
    double exponent = 2.0;

    // Both synthetic kinds: Zipf skew of target popularity (weight of node j
    // proportional to (j+1)^-target_zipf). 0 keeps targets uniform; larger
    // values concentrate in-links on low-id nodes, which spreads out the
    // fixed point and raises its variance.
    double target_zipf = 0.0;

    // edge_list
    std::filesystem::path path;
};

// Normalizes per-row weights into probabilities. Unweighted edges get 1/d(i)
// exactly; rows without out-edges become uniform over all n_nodes. Throws
// std::invalid_argument on out-of-range indices, duplicate (source, target)
// pairs, or non-positive weights.
TransitionModel build_from_edges(std::size_t n_nodes, std::span<const Edge> edges,
                                 std::span<const double> weights = {});

TransitionModel generate(const GraphSpec& spec);

// Edge-list text format: first non-comment line is the node count, then one
// `source target [weight]` per line, 0-based, whitespace separated; lines
// starting with '#' are comments. Parse errors carry the 1-based line number.
TransitionModel load_edge_list(const std::filesystem::path& path);
void save_edge_list(const TransitionModel& model, const std::filesystem::path& path);

}  // namespace surfer
