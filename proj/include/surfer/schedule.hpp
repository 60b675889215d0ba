#pragma once

#include <cstdint>

namespace surfer {

// Decreasing step-size schedule a(n). The polynomial kind,
// a0 / (1 + n/offset)^rho with rho in (0.5, 1], diverges in sum and
// converges in squared sum, which is what the convergence analysis needs.
// The piecewise-constant kind, a0 * ratio^(n/plateau) with an optional
// floor, is for tracking and test scenarios and makes no such guarantee.
struct StepSchedule {
    enum class Kind { polynomial, piecewise_constant };

    Kind kind = Kind::polynomial;
    double a0 = 0.5;

    // polynomial
    double offset = 1000.0;  // K
    double rho = 0.75;

    // piecewise_constant
    std::uint64_t plateau = 1000;
    double ratio = 0.5;
    double floor = 0.0;  // 0 disables clipping

    static StepSchedule polynomial(double a0, double offset, double rho);
    static StepSchedule piecewise(double a0, std::uint64_t plateau, double ratio,
                                  double floor = 0.0);
};

double step_size(const StepSchedule& schedule, std::uint64_t n);

}  // namespace surfer
