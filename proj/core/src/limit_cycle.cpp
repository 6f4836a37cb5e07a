#include "hybran/limit_cycle.hpp"

#include <cmath>
#include <stdexcept>

#include "hybran/rng.hpp"

namespace hybran {

void validate_trace(const Trace& trace) {
    if (trace.states.size() != trace.inputs.size() + 1)
        throw std::invalid_argument("Trace: states length must equal inputs length + 1");
    for (const auto& s : trace.states)
        if (s.size() != trace.state_dim())
            throw std::invalid_argument("Trace: inconsistent state dimension");
    for (const auto& u : trace.inputs)
        if (u.size() != trace.input_dim())
            throw std::invalid_argument("Trace: inconsistent input dimension");
}

double wrap_angle(double theta) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double w = std::fmod(theta + std::numbers::pi, two_pi);
    if (w <= 0.0) w += two_pi;
    return w - std::numbers::pi;
}

std::array<double, 2> limit_cycle_step(const std::array<double, 2>& state, double u,
                                       const LimitCycleParams& params) {
    if (!std::isfinite(state[0]) || !std::isfinite(state[1]) || !std::isfinite(u))
        throw std::invalid_argument("limit_cycle_step: non-finite state or input");
    const double r = state[0];
    const double r_next = (1.0 + params.tau) * r - params.tau * r * r * r + params.tau * u;
    double theta_next = state[1] + params.tau * params.omega;
    if (params.wrap_theta) theta_next = wrap_angle(theta_next);
    return {r_next, theta_next};
}

std::vector<Trace> generate_traces(const LimitCycleParams& params, int count, int steps,
                                   const Box& init_box, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("generate_traces: count must be >= 1");
    if (steps < 1) throw std::invalid_argument("generate_traces: steps must be >= 1");
    if (init_box.dim() != 2) throw std::invalid_argument("generate_traces: init_box must be 2-d");
    if (!(params.tau > 0.0)) throw std::invalid_argument("generate_traces: tau must be > 0");
    if (params.delta < 0.0) throw std::invalid_argument("generate_traces: delta must be >= 0");

    std::vector<Trace> traces(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        Rng rng(seed ^ static_cast<std::uint64_t>(i));
        Trace& t = traces[static_cast<std::size_t>(i)];
        t.id = i;
        t.states.reserve(static_cast<std::size_t>(steps) + 1);
        t.inputs.reserve(static_cast<std::size_t>(steps));

        std::array<double, 2> x{rng.uniform(init_box.lo[0], init_box.hi[0]),
                                rng.uniform(init_box.lo[1], init_box.hi[1])};
        t.states.push_back({x[0], x[1]});
        for (int k = 0; k < steps; ++k) {
            const double u = rng.uniform(params.mu - params.delta, params.mu + params.delta);
            x = limit_cycle_step(x, u, params);
            t.inputs.push_back({u});
            t.states.push_back({x[0], x[1]});
        }
    }
    return traces;
}

}  // namespace hybran
