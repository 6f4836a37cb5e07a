#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hybran/automaton.hpp"
#include "hybran/box.hpp"
#include "hybran/nn.hpp"
#include "hybran/partition.hpp"

namespace hybran {

/// One piece of a reachable set: the box and the topology whose network
/// propagates it.
struct Fragment {
    std::size_t cell = 0;
    Box box;
};

/// PerCellMerge replaces all fragments landing in one cell by their bounding
/// box (at most one fragment per cell survives a step); ExactUnion keeps every
/// piece up to the fragment cap.
enum class MergePolicy { PerCellMerge, ExactUnion };

std::string to_string(MergePolicy policy);
MergePolicy merge_policy_from_string(const std::string& name);

struct ReachConfig {
    int horizon = 0;
    Box input_box;
    MergePolicy merge = MergePolicy::PerCellMerge;
    std::size_t max_fragments = 4096;
};

struct ReachSet {
    /// steps[k] lists the fragments at time k, sorted by cell index.
    std::vector<std::vector<Fragment>> steps;
    std::vector<double> step_seconds;
    /// Volume of each step's image boxes lying outside the state domain.
    std::vector<double> escaped_volume;
};

/// Sound interval image of a box through the network: affine layers use
/// per-term endpoint extremes, monotone activations apply to both endpoints.
/// A degenerate input box propagates to exactly [forward(x), forward(x)].
Box interval_forward(const NeuralNet& net, const Box& in_box);

/// Allocation-free variant for propagation loops; lo/hi are consumed as the
/// input bounds and overwritten with the output bounds.
void interval_forward_into(const NeuralNet& net, std::vector<double>& lo,
                           std::vector<double>& hi, std::vector<double>& scratch_lo,
                           std::vector<double>& scratch_hi);

/// Intersects a box with every cell (clipping to the domain). The clipped
/// volume records the portion of the box outside the domain.
struct SplitResult {
    std::vector<Fragment> fragments;
    double clipped_volume = 0.0;
};
SplitResult split(const Partition& p, const Box& box);

/// Covers the whole box by nearest-cell dispatch regions (boundary cells
/// extend to the exterior), so no mass is lost when a box pokes outside the
/// domain. This is the splitter reachability propagates with; it mirrors the
/// exterior policy of locate/step exactly.
std::vector<Fragment> split_dispatch(const Partition& p, const Box& box);

/// One Split-and-Combine step: propagate each fragment through its cell's
/// network with the input interval appended, re-split the images, and combine
/// per the merge policy. escaped, when given, accumulates out-of-domain image
/// volume. Throws FragmentOverflowError past cfg.max_fragments in ExactUnion
/// mode.
std::vector<Fragment> step_reach(const HybridAutomaton& h, std::span<const Fragment> fragments,
                                 const Box& input_box, const ReachConfig& cfg,
                                 double* escaped = nullptr);

/// Full reachability run: step 0 is the dispatch split of init, then
/// cfg.horizon propagation steps, with per-step wall-clock recorded.
ReachSet reach(const HybridAutomaton& h, const Box& init, const ReachConfig& cfg);

/// Baseline: identical propagation with a single network over a one-cell
/// partition of the domain.
ReachSet reach_single(const NeuralNet& net, const Box& domain, const Box& init,
                      const Box& input_box, int horizon,
                      std::size_t max_fragments = 4096);

}  // namespace hybran
