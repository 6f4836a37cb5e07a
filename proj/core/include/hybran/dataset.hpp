#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "hybran/partition.hpp"
#include "hybran/trace.hpp"

namespace hybran {

/// Training pairs for one cell: input [x(k); u(k)], target x(k+1).
struct CellDataset {
    std::size_t cell = 0;
    std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs;

    bool empty() const { return pairs.empty(); }
    std::size_t size() const { return pairs.size(); }
};

/// How a consecutive sample pair is assigned to a cell.
///   BySource   — key on the cell containing x(k) only (default): boundary
///                crossings train the source cell's network.
///   WithinCell — keep a pair only when x(k) and x(k+1) fall in the same
///                cell; crossings are dropped from every dataset.
enum class SegmentPolicy { BySource, WithinCell };

/// Segments traces into per-cell datasets (one entry per cell, index-aligned
/// with the partition). Exterior x(k) samples go to their nearest cell.
std::vector<CellDataset> segment(std::span<const Trace> traces, const Partition& p,
                                 SegmentPolicy policy = SegmentPolicy::BySource);

struct DatasetStats {
    struct CellRow {
        std::size_t cell = 0;
        std::size_t pairs = 0;
        bool sparse = false;
    };
    std::vector<CellRow> rows;
    std::vector<std::size_t> empty_cells;
    std::size_t total_pairs = 0;
};

/// Per-cell pair counts; cells under min_pairs are flagged sparse and cells
/// with zero pairs are additionally listed in empty_cells.
DatasetStats dataset_stats(std::span<const CellDataset> datasets, std::size_t min_pairs = 10);

/// Trace-level holdout: the last ceil(fraction * n) traces become the test
/// set. Deterministic; fraction must lie in [0, 1).
struct TraceSplit {
    std::vector<Trace> train;
    std::vector<Trace> test;
};
TraceSplit split_holdout(std::span<const Trace> traces, double fraction);

}  // namespace hybran
