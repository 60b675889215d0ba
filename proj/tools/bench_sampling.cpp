// Throughput check for the sampling hot path and the kernel backends.
// Design target: at least 1e7 draws/second/core on desk instances.

#include <chrono>
#include <cstdio>
#include <vector>

#include "surfer/graph.hpp"
#include "surfer/kernels.hpp"
#include "surfer/sampling.hpp"

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void bench_draws(std::size_t n_nodes, std::size_t n_draws) {
    surfer::GraphSpec spec;
    spec.kind = surfer::GraphSpec::Kind::uniform_out_degree;
    spec.n_nodes = n_nodes;
    spec.degree_min = 2;
    spec.degree_max = 16;
    spec.seed = 7;
    const surfer::TransitionModel model = surfer::generate(spec);
    surfer::Sampler sampler(model, 1);

    std::uint64_t sink = 0;
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < n_draws; ++i) {
        const surfer::SamplePair p = sampler.draw();
        sink += p.x + p.y;
    }
    const double dt = seconds_since(t0);
    std::printf("draws    N=%-8zu %9.0f kdraws/s  (sink %llu)\n", n_nodes,
                static_cast<double>(n_draws) / dt / 1e3,
                static_cast<unsigned long long>(sink));
}

void bench_l1(std::size_t n, std::size_t reps) {
    std::vector<double> a(n, 1.0), b(n, 2.0);
    double sink = 0;
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t r = 0; r < reps; ++r) sink += surfer::kernels::l1_distance(a, b);
    const double dt = seconds_since(t0);
    std::printf("l1_dist  n=%-8zu %9.2f GB/s      (sink %.0f)\n", n,
                2.0 * static_cast<double>(n * reps) * 8.0 / dt / 1e9, sink);
}

}  // namespace

int main() {
    std::printf("kernel backend: %s\n",
                std::string(surfer::kernels::backend_name(
                                surfer::kernels::active_backend()))
                    .c_str());
    bench_draws(1000, 20'000'000);
    bench_draws(100'000, 20'000'000);
    bench_draws(1'000'000, 20'000'000);
    bench_l1(1 << 16, 20'000);
    return 0;
}
