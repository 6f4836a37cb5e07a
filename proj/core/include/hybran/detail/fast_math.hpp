#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>

namespace hybran::detail {

// Branch-free exp for y in [-40, 0]: y = k*ln2 + r with |r| <= ln2/2, then a
// degree-13 Taylor polynomial and an exponent-field scale. Error is a few ulp
// over the full range (checked against std::exp in the unit tests).
inline double exp_neg(double y) {
    constexpr double kLog2e = 1.4426950408889634074;
    constexpr double kLn2Hi = 6.93147180369123816490e-01;
    constexpr double kLn2Lo = 1.90821492927058770002e-10;

    const double kd = std::nearbyint(y * kLog2e);
    double r = y - kd * kLn2Hi;
    r -= kd * kLn2Lo;

    double p = 1.0 / 6227020800.0;  // 1/13!
    p = p * r + 1.0 / 479001600.0;
    p = p * r + 1.0 / 39916800.0;
    p = p * r + 1.0 / 3628800.0;
    p = p * r + 1.0 / 362880.0;
    p = p * r + 1.0 / 40320.0;
    p = p * r + 1.0 / 5040.0;
    p = p * r + 1.0 / 720.0;
    p = p * r + 1.0 / 120.0;
    p = p * r + 1.0 / 24.0;
    p = p * r + 1.0 / 6.0;
    p = p * r + 0.5;
    p = p * r + 1.0;
    p = p * r + 1.0;

    const auto k = static_cast<std::int64_t>(kd);
    const double scale = std::bit_cast<double>(static_cast<std::uint64_t>(k + 1023) << 52);
    return p * scale;
}

// tanh via (1 - e^{-2a}) / (1 + e^{-2a}); absolute error < 1e-15. Only the
// training kernels use this; inference (hybran::forward) keeps std::tanh.
inline double fast_tanh(double x) {
    const double a = std::min(std::fabs(x), 19.5);
    const double e = exp_neg(-2.0 * a);
    const double t = (1.0 - e) / (1.0 + e);
    return std::copysign(t, x);
}

inline void fast_tanh_inplace(std::span<double> xs) {
    for (double& x : xs) x = fast_tanh(x);
}

}  // namespace hybran::detail
