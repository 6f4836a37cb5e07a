#pragma once

#include <array>
#include <cstdint>
#include <numbers>
#include <vector>

#include "hybran/box.hpp"
#include "hybran/trace.hpp"

namespace hybran {

/// Benchmark system: a discrete-time limit cycle in (r, theta) coordinates,
///   r(k+1)     = (1+tau) r(k) - tau r(k)^3 + tau u(k)
///   theta(k+1) = theta(k) + tau*omega
/// with u(k) ~ U(mu - delta, mu + delta). The noise-free radial map has an
/// attracting cycle at |r| = 1.
struct LimitCycleParams {
    double tau = 0.1;
    double omega = 2.0 * std::numbers::pi / 3.0;
    double mu = 0.2;
    double delta = 1.5;
    bool wrap_theta = true;  // keep theta in (-pi, pi]
};

/// Wraps an angle into (-pi, pi].
double wrap_angle(double theta);

/// One step of the limit-cycle map. Throws on non-finite state or input.
std::array<double, 2> limit_cycle_step(const std::array<double, 2>& state, double u,
                                       const LimitCycleParams& params);

/// Samples `count` traces of `steps` transitions each. Initial states are
/// uniform over init_box; inputs are i.i.d. uniform over [mu-delta, mu+delta].
/// Trace i uses the derived seed (seed XOR i), so generation is deterministic
/// and order-independent.
std::vector<Trace> generate_traces(const LimitCycleParams& params, int count, int steps,
                                   const Box& init_box, std::uint64_t seed);

}  // namespace hybran
