#pragma once

#include <cstddef>
#include <vector>

namespace hybran {

/// One sampled trajectory at unit time steps: states x(0..M) and the inputs
/// u(0..M-1) that produced each transition.
struct Trace {
    int id = 0;
    std::vector<std::vector<double>> states;
    std::vector<std::vector<double>> inputs;

    std::size_t steps() const { return inputs.size(); }
    std::size_t state_dim() const { return states.empty() ? 0 : states.front().size(); }
    std::size_t input_dim() const { return inputs.empty() ? 0 : inputs.front().size(); }
};

/// Throws std::invalid_argument unless states.size() == inputs.size() + 1 and
/// all state/input rows have consistent dimensions.
void validate_trace(const Trace& trace);

}  // namespace hybran
