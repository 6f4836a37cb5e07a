#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace hybran {

/// Axis-aligned hyper-rectangle. Cells, initial sets and reachable-set
/// fragments are all boxes. Zero-width intervals are allowed.
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    Box() = default;

    /// Validates dim(lo) == dim(hi) >= 1 and lo[i] <= hi[i] for all i.
    Box(std::vector<double> lower, std::vector<double> upper);

    std::size_t dim() const { return lo.size(); }
    double width(std::size_t d) const { return hi[d] - lo[d]; }
    double volume() const;

    /// Closed-box membership.
    bool contains(std::span<const double> x) const;

    /// Componentwise projection of x onto the box.
    std::vector<double> clamp(std::span<const double> x) const;

    /// Squared Euclidean distance from x to the box (0 when inside).
    double distance_sq(std::span<const double> x) const;

    bool is_point() const;
};

bool operator==(const Box& a, const Box& b);

/// Componentwise [max(lo), min(hi)]; nullopt when any resulting lo > hi.
std::optional<Box> intersect(const Box& a, const Box& b);

/// Smallest box containing all inputs. Throws on an empty list.
Box bounding_box(std::span<const Box> boxes);

/// Cartesian product [a; b], used to append an input interval to a state box.
Box concat(const Box& a, const Box& b);

}  // namespace hybran
