#include "hybran/box.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace hybran {

Box::Box(std::vector<double> lower, std::vector<double> upper)
    : lo(std::move(lower)), hi(std::move(upper)) {
    if (lo.size() != hi.size()) throw std::invalid_argument("Box: lo/hi dimension mismatch");
    if (lo.empty()) throw std::invalid_argument("Box: dimension must be >= 1");
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (!(lo[i] <= hi[i])) throw std::invalid_argument("Box: lo > hi (or NaN bound)");
    }
}

double Box::volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < dim(); ++i) v *= width(i);
    return v;
}

bool Box::contains(std::span<const double> x) const {
    if (x.size() != dim()) throw std::invalid_argument("Box::contains: dimension mismatch");
    for (std::size_t i = 0; i < dim(); ++i) {
        if (x[i] < lo[i] || x[i] > hi[i]) return false;
    }
    return true;
}

std::vector<double> Box::clamp(std::span<const double> x) const {
    if (x.size() != dim()) throw std::invalid_argument("Box::clamp: dimension mismatch");
    std::vector<double> out(x.begin(), x.end());
    for (std::size_t i = 0; i < dim(); ++i) out[i] = std::min(std::max(out[i], lo[i]), hi[i]);
    return out;
}

double Box::distance_sq(std::span<const double> x) const {
    if (x.size() != dim()) throw std::invalid_argument("Box::distance_sq: dimension mismatch");
    double d2 = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) {
        double gap = 0.0;
        if (x[i] < lo[i]) gap = lo[i] - x[i];
        else if (x[i] > hi[i]) gap = x[i] - hi[i];
        d2 += gap * gap;
    }
    return d2;
}

bool Box::is_point() const {
    for (std::size_t i = 0; i < dim(); ++i) {
        if (lo[i] != hi[i]) return false;
    }
    return true;
}

bool operator==(const Box& a, const Box& b) { return a.lo == b.lo && a.hi == b.hi; }

std::optional<Box> intersect(const Box& a, const Box& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("intersect: dimension mismatch");
    std::vector<double> lo(a.dim()), hi(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        lo[i] = std::max(a.lo[i], b.lo[i]);
        hi[i] = std::min(a.hi[i], b.hi[i]);
        if (lo[i] > hi[i]) return std::nullopt;
    }
    return Box(std::move(lo), std::move(hi));
}

Box bounding_box(std::span<const Box> boxes) {
    if (boxes.empty()) throw std::invalid_argument("bounding_box: empty list");
    Box out = boxes.front();
    for (const Box& b : boxes.subspan(1)) {
        if (b.dim() != out.dim()) throw std::invalid_argument("bounding_box: dimension mismatch");
        for (std::size_t i = 0; i < out.dim(); ++i) {
            out.lo[i] = std::min(out.lo[i], b.lo[i]);
            out.hi[i] = std::max(out.hi[i], b.hi[i]);
        }
    }
    return out;
}

Box concat(const Box& a, const Box& b) {
    std::vector<double> lo = a.lo;
    std::vector<double> hi = a.hi;
    lo.insert(lo.end(), b.lo.begin(), b.lo.end());
    hi.insert(hi.end(), b.hi.begin(), b.hi.end());
    return Box(std::move(lo), std::move(hi));
}

}  // namespace hybran
