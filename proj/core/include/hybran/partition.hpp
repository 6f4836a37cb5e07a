#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hybran/box.hpp"

namespace hybran {

struct LocateResult {
    std::size_t cell = 0;
    bool exterior = false;
};

/// Uniform grid of cells covering a box-shaped state domain.
///
/// Cells are stored in row-major order with dimension 0 varying fastest.
/// Cut points sit exactly at lo + m*(hi-lo)/segments (endpoints returned
/// exactly), so cell faces of neighbouring cells coincide bitwise.
struct Partition {
    Box domain;
    std::vector<int> segments;
    std::vector<Box> cells;

    std::size_t dim() const { return domain.dim(); }
    std::size_t cell_count() const { return cells.size(); }

    /// Cut point m of dimension d, m in [0, segments[d]].
    double cut(std::size_t d, int m) const;

    /// Per-dimension cell index of coordinate v under the lower-edge-inclusive
    /// convention, clamped to [0, segments[d]-1] for out-of-domain v.
    int interval_index(std::size_t d, double v) const;

    /// Multi-index -> flat row-major cell index (dimension 0 fastest).
    std::size_t flat_index(std::span<const int> multi) const;
};

/// Builds the uniform grid; every count must be >= 1 and segments.size()
/// must equal the domain dimension.
Partition make_partition(const Box& domain, const std::vector<int>& segments);

/// Cell lookup. Inside the domain this returns the unique cell under the
/// lower-edge-inclusive convention (a shared boundary belongs to the cell
/// whose lower edge it is; the topmost cell keeps its upper edge). Outside,
/// it returns the cell minimizing Euclidean distance, ties broken by lowest
/// index, with the result flagged exterior.
LocateResult locate(const Partition& p, std::span<const double> x);

}  // namespace hybran
