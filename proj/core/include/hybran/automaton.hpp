#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hybran/box.hpp"
#include "hybran/nn.hpp"
#include "hybran/partition.hpp"
#include "hybran/trace.hpp"

namespace hybran {

/// Directed mode switch (from, to) with the box hull of the states observed
/// taking it. Guards are informational; simulation and reachability dispatch
/// purely on the partition.
struct Transition {
    std::size_t from = 0;
    std::size_t to = 0;
    Box guard;
};

/// Learned model: a partition of the state domain (one topology per cell), a
/// network per topology, data-inferred transitions, and the admissible input
/// interval. States outside the domain dispatch to the nearest cell.
struct HybridAutomaton {
    Partition partition;
    std::vector<NeuralNet> nets;
    std::vector<Transition> transitions;
    Box input_box;

    std::size_t state_dim() const { return partition.dim(); }
    std::size_t input_dim() const { return input_box.dim(); }

    /// Checks net/cell alignment, per-net dimensions, transition indices and
    /// guard containment. Throws std::invalid_argument on violation.
    void validate() const;
};

/// Builds the automaton. Transitions are inferred from the traces: every
/// consecutive sample pair whose endpoints locate to different cells (p, q)
/// contributes an edge, with the guard the bounding box of the witness states
/// x(k) clamped to the source cell.
HybridAutomaton assemble(Partition partition, std::vector<NeuralNet> nets,
                         std::span<const Trace> traces, Box input_box);

struct StepResult {
    std::vector<double> state;
    std::size_t topology = 0;
    bool exterior = false;
};

/// One step: dispatch x to its cell (nearest when exterior) and evaluate that
/// cell's network on [x; u].
StepResult step(const HybridAutomaton& h, std::span<const double> x, std::span<const double> u);

struct SimResult {
    std::vector<std::vector<double>> trajectory;  // length = inputs + 1
    std::vector<std::size_t> cells;               // topology per trajectory point
    std::vector<std::size_t> exterior_events;     // indices that left the domain
};

SimResult simulate(const HybridAutomaton& h, std::span<const double> x0,
                   std::span<const std::vector<double>> inputs);

struct MseReport {
    double mse = 0.0;
    std::size_t predictions = 0;
    struct CellMse {
        std::size_t cell = 0;
        double mse = 0.0;
        std::size_t count = 0;
    };
    std::vector<CellMse> per_cell;
};

/// Mean over all one-step predictions of the squared error norm
/// ||step(x(k), u(k)) - x(k+1)||^2, with a per-topology breakdown.
MseReport evaluate_mse(const HybridAutomaton& h, std::span<const Trace> test_traces);

}  // namespace hybran
