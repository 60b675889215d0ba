#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "surfer/graph.hpp"
#include "surfer/kernels.hpp"
#include "surfer/oracle.hpp"
#include "surfer/rng.hpp"

using namespace surfer;

namespace {

TransitionModel cycle2() {
    const Edge edges[] = {{0, 1}, {1, 0}};
    return build_from_edges(2, edges);
}

TransitionModel self_loop1() {
    const Edge edges[] = {{0, 0}};
    return build_from_edges(1, edges);
}

// p(0,.) = [0, 1/2, 1/2], p(1,.) = [0, 0, 1], p(2,.) = [1, 0, 0]
TransitionModel tri3() {
    const Edge edges[] = {{0, 1}, {0, 2}, {1, 2}, {2, 0}};
    return build_from_edges(3, edges);
}

TransitionModel random_model(std::size_t n, std::uint64_t seed,
                             std::size_t dmax = 6) {
    GraphSpec spec;
    spec.kind = GraphSpec::Kind::uniform_out_degree;
    spec.n_nodes = n;
    spec.degree_min = 1;
    spec.degree_max = std::min(dmax, n - 1);
    spec.seed = seed;
    return generate(spec);
}

// independent dense solver for (I - c P^T) z = ones: Gaussian elimination
// with partial pivoting, no shared code with the library path
std::vector<double> dense_solve_fixed_point(const TransitionModel& m, double c) {
    const std::size_t n = m.n_nodes();
    std::vector<double> a(n * (n + 1), 0.0);
    for (std::size_t i = 0; i < n; ++i) a[i * (n + 1) + i] = 1.0;
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint64_t k = m.row_offsets()[i]; k < m.row_offsets()[i + 1]; ++k) {
            const std::uint32_t j = m.col_indices()[k];
            a[j * (n + 1) + i] -= c * m.probs()[k];
        }
    }
    for (std::size_t i = 0; i < n; ++i) a[i * (n + 1) + n] = 1.0;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r * (n + 1) + col]) > std::abs(a[pivot * (n + 1) + col]))
                pivot = r;
        }
        for (std::size_t j = 0; j <= n; ++j)
            std::swap(a[col * (n + 1) + j], a[pivot * (n + 1) + j]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r * (n + 1) + col] / a[col * (n + 1) + col];
            for (std::size_t j = col; j <= n; ++j)
                a[r * (n + 1) + j] -= f * a[col * (n + 1) + j];
        }
    }
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = a[i * (n + 1) + n] / a[i * (n + 1) + i];
    return z;
}

// classic fourth-order Runge-Kutta for z' = (1 + c P^T z - z)/N
std::vector<double> rk4_flow(std::span<const double> z0, const TransitionModel& m,
                             double c, double t_end, double dt) {
    const double n = static_cast<double>(m.n_nodes());
    std::vector<double> z(z0.begin(), z0.end());
    const auto f = [&](const std::vector<double>& v) {
        std::vector<double> h = ode_field(v, m, c);
        for (double& x : h) x /= n;
        return h;
    };
    const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
    std::vector<double> k1, k2, k3, k4, tmp(z.size());
    for (std::size_t s = 0; s < steps; ++s) {
        k1 = f(z);
        for (std::size_t i = 0; i < z.size(); ++i) tmp[i] = z[i] + 0.5 * dt * k1[i];
        k2 = f(tmp);
        for (std::size_t i = 0; i < z.size(); ++i) tmp[i] = z[i] + 0.5 * dt * k2[i];
        k3 = f(tmp);
        for (std::size_t i = 0; i < z.size(); ++i) tmp[i] = z[i] + dt * k3[i];
        k4 = f(tmp);
        for (std::size_t i = 0; i < z.size(); ++i)
            z[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return z;
}

double linf(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("solve_fixed_point: scalar closed form") {
    const FixedPoint fp = solve_fixed_point(self_loop1(), 0.85);
    CHECK(std::abs(fp.z_star[0] - 1.0 / 0.15) <= 1e-9);
    CHECK(fp.residual <= 1e-10);
}

TEST_CASE("solve_fixed_point: symmetric swap forces equal components") {
    const FixedPoint fp = solve_fixed_point(cycle2(), 0.5);
    CHECK(fp.z_star[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fp.z_star[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("solve_fixed_point: agrees with dense elimination") {
    const TransitionModel m = tri3();
    const FixedPoint fp = solve_fixed_point(m, 0.85);
    const std::vector<double> dense = dense_solve_fixed_point(m, 0.85);
    CHECK(linf(fp.z_star, dense) <= 1e-9);

    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const TransitionModel r = random_model(17, seed);
        const FixedPoint rf = solve_fixed_point(r, 0.85);
        CHECK(linf(rf.z_star, dense_solve_fixed_point(r, 0.85)) <= 1e-9);
    }
}

TEST_CASE("solve_fixed_point: every component at least one, residual tiny") {
    const TransitionModel m = random_model(40, 3);
    const FixedPoint fp = solve_fixed_point(m, 0.85);
    for (double v : fp.z_star) CHECK(v >= 1.0 - 1e-12);
    CHECK(fp.residual <= 1e-10 * 40);
    CHECK_THROWS_AS(solve_fixed_point(m, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_fixed_point(m, 0.85, 0.0), std::invalid_argument);
}

TEST_CASE("neumann sweeps contract at rate c") {
    const TransitionModel m = random_model(30, 9);
    const double c = 0.85;
    // one sweep is z + h(z); track successive deltas
    std::vector<double> z(30, 1.0);
    double prev_delta = -1.0;
    for (int sweep = 0; sweep < 40; ++sweep) {
        const std::vector<double> h = ode_field(z, m, c);
        const double delta = kernels::l1_norm(h);
        if (prev_delta > 1e-14) CHECK(delta <= prev_delta * (c + 1e-6));
        prev_delta = delta;
        for (std::size_t i = 0; i < z.size(); ++i) z[i] += h[i];
    }
}

TEST_CASE("stationary_power_method: symmetry, scalar case, proportionality") {
    const TransitionModel swap = cycle2();
    const GoogleMatrix gm(swap, 0.6);
    const std::vector<double> pi = stationary_power_method(gm);
    CHECK(pi[0] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(pi[1] == doctest::Approx(0.5).epsilon(1e-10));

    const TransitionModel one = self_loop1();
    const std::vector<double> pi1 = stationary_power_method(GoogleMatrix(one, 0.85));
    CHECK(pi1[0] == doctest::Approx(1.0));

    const TransitionModel m = random_model(25, 4);
    const double c = 0.85;
    const std::vector<double> pim = stationary_power_method(GoogleMatrix(m, c));
    const FixedPoint fp = solve_fixed_point(m, c);
    double gap = 0.0;
    for (std::size_t i = 0; i < pim.size(); ++i)
        gap = std::max(gap, std::abs(pim[i] - (1.0 - c) / 25.0 * fp.z_star[i]));
    CHECK(gap <= 1e-8);
    CHECK(kernels::sum(pim) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("ode_field: fixed point, origin, dense cross-check") {
    const TransitionModel m = random_model(5, 1);
    const double c = 0.85;
    const FixedPoint fp = solve_fixed_point(m, c);
    for (double v : ode_field(fp.z_star, m, c)) CHECK(std::abs(v) <= 1e-9);

    const std::vector<double> zero(5, 0.0);
    CHECK(ode_field(zero, m, c) == std::vector<double>(5, 1.0));

    Rng rng(2, 70);
    std::vector<double> z(5);
    for (double& v : z) v = 10.0 * rng.next_double() - 5.0;
    const std::vector<double> h = ode_field(z, m, c);
    for (std::size_t i = 0; i < 5; ++i) {
        double want = 1.0 - z[i];
        for (std::uint32_t j = 0; j < 5; ++j) want += c * m.prob(j, i) * z[j];
        CHECK(std::abs(h[i] - want) <= 1e-12);
    }

    const std::vector<double> wrong(4, 0.0);
    CHECK_THROWS_AS(ode_field(wrong, m, c), std::invalid_argument);
}

TEST_CASE("ode_field_scaled: linear part identities") {
    const TransitionModel m = random_model(6, 8);
    const double c = 0.7;
    const std::vector<double> zero(6, 0.0);
    CHECK(ode_field_scaled(zero, m, c) == std::vector<double>(6, 0.0));

    Rng rng(3, 71);
    std::vector<double> z(6);
    for (double& v : z) v = 4.0 * rng.next_double();

    // h(a z)/a - h_inf(z) = ones/a
    const double a = 1000.0;
    std::vector<double> az = z;
    kernels::scale(az, a);
    const std::vector<double> ha = ode_field(az, m, c);
    const std::vector<double> hinf = ode_field_scaled(z, m, c);
    for (std::size_t i = 0; i < 6; ++i)
        CHECK(ha[i] / a - hinf[i] == doctest::Approx(1.0 / a).epsilon(1e-9));

    // h(z) - h_inf(z) = ones
    const std::vector<double> h = ode_field(z, m, c);
    for (std::size_t i = 0; i < 6; ++i)
        CHECK(h[i] - hinf[i] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("flow_exponential: scalar value and limits") {
    const TransitionModel one = self_loop1();
    CHECK(matrix_exponential_1norm(one, 0.85, 1.0) ==
          doctest::Approx(std::exp(-0.15)).epsilon(1e-12));
    CHECK(std::abs(matrix_exponential_1norm(one, 0.85, 1e-8) - 1.0) <= 1e-6);
    CHECK_THROWS_AS(matrix_exponential_1norm(one, 0.85, 0.0), std::invalid_argument);
}

TEST_CASE("flow_exponential: contraction on desk models") {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const TransitionModel m = random_model(12, 40 + seed);
        const double n = 12.0;
        for (double t : {n / 2.0, n, 2.0 * n}) {
            const double norm = matrix_exponential_1norm(m, 0.85, t);
            CHECK(norm < 1.0);
            CHECK(norm > 0.0);
        }
    }
}

TEST_CASE("flow_exponential: dense guard") {
    GraphSpec spec;
    spec.kind = GraphSpec::Kind::uniform_out_degree;
    spec.n_nodes = kDenseGuard + 1;
    spec.degree_min = 1;
    spec.degree_max = 2;
    spec.seed = 1;
    const TransitionModel big = generate(spec);
    CHECK_THROWS_AS(matrix_exponential_1norm(big, 0.85, 1.0), std::invalid_argument);
}

TEST_CASE("negated fixed point inverts the flow generator") {
    // (c P^T - I)(-z*) = ones, the identity behind the closed-form flow
    const TransitionModel m = random_model(9, 12);
    const double c = 0.85;
    const FixedPoint fp = solve_fixed_point(m, c);
    std::vector<double> neg(fp.z_star);
    kernels::scale(neg, -1.0);
    const std::vector<double> img = ode_field_scaled(neg, m, c);
    for (double v : img) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("flow_map: fixed point is stationary and time zero is identity") {
    const TransitionModel m = random_model(7, 2);
    const double c = 0.85;
    const FixedPoint fp = solve_fixed_point(m, c);
    const std::vector<double> at_star = flow_map(fp.z_star, m, c, 4.0);
    CHECK(linf(at_star, fp.z_star) <= 1e-9);

    Rng rng(4, 72);
    std::vector<double> z(7);
    for (double& v : z) v = 8.0 * rng.next_double();
    const std::vector<double> at_zero = flow_map(z, m, c, 0.0);
    CHECK(linf(at_zero, z) <= 1e-12);
}

TEST_CASE("flow_map: matches runge-kutta integration") {
    const TransitionModel m = random_model(5, 6);
    const double c = 0.85;
    Rng rng(5, 73);
    std::vector<double> z(5);
    for (double& v : z) v = 6.0 * rng.next_double();

    const std::vector<double> closed = flow_map(z, m, c, 3.0);
    const std::vector<double> integrated = rk4_flow(z, m, c, 3.0, 1e-3);
    CHECK(linf(closed, integrated) <= 1e-6);
}

TEST_CASE("flow_map: semigroup property") {
    const TransitionModel m = random_model(6, 14);
    const double c = 0.85;
    Rng rng(6, 74);
    std::vector<double> z(6);
    for (double& v : z) v = 5.0 * rng.next_double();

    const std::vector<double> two_hops = flow_map(flow_map(z, m, c, 2.0), m, c, 1.0);
    const std::vector<double> one_hop = flow_map(z, m, c, 3.0);
    CHECK(linf(two_hops, one_hop) <= 1e-8);
}

TEST_CASE("flow contracts the L1 gap at the killed rate") {
    const TransitionModel m = random_model(8, 21);
    const double c = 0.85;
    const FixedPoint fp = solve_fixed_point(m, c);
    Rng rng(7, 75);
    const double dt = 1e-4;
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> z(8);
        for (double& v : z) v = 12.0 * rng.next_double();
        const double before = kernels::l1_distance(z, fp.z_star);
        if (before < 1e-9) continue;
        const double after =
            kernels::l1_distance(flow_map(z, m, c, dt), fp.z_star);
        // decrease factor at least (1 - (1-c) dt / N) + second-order slack
        CHECK(after <= before * (1.0 - (1.0 - c) * dt / 8.0 + 1e-7));
    }
}
