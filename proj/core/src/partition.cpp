#include "hybran/partition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hybran {

double Partition::cut(std::size_t d, int m) const {
    const int n = segments[d];
    if (m <= 0) return domain.lo[d];
    if (m >= n) return domain.hi[d];
    return domain.lo[d] + static_cast<double>(m) * (domain.hi[d] - domain.lo[d]) / n;
}

int Partition::interval_index(std::size_t d, double v) const {
    const int n = segments[d];
    const double w = domain.hi[d] - domain.lo[d];
    int m = 0;
    if (w > 0.0) {
        m = static_cast<int>(std::floor((v - domain.lo[d]) / w * n));
        m = std::max(0, std::min(m, n - 1));
    }
    // The division above can land one interval off near a cut point; fix
    // against the exact cut formula.
    while (m > 0 && v < cut(d, m)) --m;
    while (m + 1 < n && v >= cut(d, m + 1)) ++m;
    return m;
}

std::size_t Partition::flat_index(std::span<const int> multi) const {
    std::size_t idx = 0;
    std::size_t stride = 1;
    for (std::size_t d = 0; d < dim(); ++d) {
        idx += static_cast<std::size_t>(multi[d]) * stride;
        stride *= static_cast<std::size_t>(segments[d]);
    }
    return idx;
}

Partition make_partition(const Box& domain, const std::vector<int>& segments) {
    if (segments.size() != domain.dim())
        throw std::invalid_argument("make_partition: segments length != domain dimension");
    std::size_t total = 1;
    for (int n : segments) {
        if (n < 1) throw std::invalid_argument("make_partition: segment count must be >= 1");
        total *= static_cast<std::size_t>(n);
    }

    Partition p;
    p.domain = domain;
    p.segments = segments;
    p.cells.reserve(total);

    std::vector<int> multi(domain.dim(), 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::vector<double> lo(domain.dim()), hi(domain.dim());
        for (std::size_t d = 0; d < domain.dim(); ++d) {
            lo[d] = p.cut(d, multi[d]);
            hi[d] = p.cut(d, multi[d] + 1);
        }
        p.cells.emplace_back(std::move(lo), std::move(hi));
        // Row-major increment, dimension 0 fastest.
        for (std::size_t d = 0; d < domain.dim(); ++d) {
            if (++multi[d] < segments[d]) break;
            multi[d] = 0;
        }
    }
    return p;
}

LocateResult locate(const Partition& p, std::span<const double> x) {
    if (x.size() != p.dim()) throw std::invalid_argument("locate: dimension mismatch");

    bool exterior = false;
    for (std::size_t d = 0; d < p.dim(); ++d) {
        if (x[d] < p.domain.lo[d] || x[d] > p.domain.hi[d]) {
            exterior = true;
            break;
        }
    }

    std::vector<int> multi(p.dim());
    for (std::size_t d = 0; d < p.dim(); ++d) {
        int m = p.interval_index(d, x[d]);
        if (exterior && m > 0 && x[d] == p.cut(d, m)) {
            // Exterior lookups break distance ties toward the lowest cell
            // index; a coordinate sitting exactly on an interior cut is at
            // distance zero from both neighbours.
            --m;
        }
        multi[d] = m;
    }
    return {p.flat_index(multi), exterior};
}

}  // namespace hybran
