#include "hybran/reach.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "hybran/errors.hpp"

namespace hybran {

std::string to_string(MergePolicy policy) {
    return policy == MergePolicy::PerCellMerge ? "per-cell-merge" : "exact-union";
}

MergePolicy merge_policy_from_string(const std::string& name) {
    if (name == "per-cell-merge") return MergePolicy::PerCellMerge;
    if (name == "exact-union") return MergePolicy::ExactUnion;
    throw std::invalid_argument("unknown merge policy: " + name);
}

void interval_forward_into(const NeuralNet& net, std::vector<double>& lo,
                           std::vector<double>& hi, std::vector<double>& scratch_lo,
                           std::vector<double>& scratch_hi) {
    if (net.layers.empty()) throw std::invalid_argument("interval_forward: empty network");
    if (lo.size() != net.input_size() || hi.size() != net.input_size())
        throw std::invalid_argument("interval_forward: input dimension mismatch");

    // The accumulation below mirrors forward() term by term, so a degenerate
    // box propagates to exactly the point image and every individually
    // rounded operation keeps lo <= value <= hi by monotonicity.
    for (const Layer& l : net.layers) {
        scratch_lo.resize(l.out);
        scratch_hi.resize(l.out);
        for (std::size_t o = 0; o < l.out; ++o) {
            double acc_lo = l.b[o];
            double acc_hi = l.b[o];
            const double* row = l.w.data() + o * l.in;
            for (std::size_t j = 0; j < l.in; ++j) {
                const double p1 = row[j] * lo[j];
                const double p2 = row[j] * hi[j];
                acc_lo += std::min(p1, p2);
                acc_hi += std::max(p1, p2);
            }
            switch (l.act) {
                case Activation::Tanh:
                    scratch_lo[o] = std::tanh(acc_lo);
                    scratch_hi[o] = std::tanh(acc_hi);
                    break;
                case Activation::Relu:
                    scratch_lo[o] = acc_lo > 0.0 ? acc_lo : 0.0;
                    scratch_hi[o] = acc_hi > 0.0 ? acc_hi : 0.0;
                    break;
                case Activation::Identity:
                    scratch_lo[o] = acc_lo;
                    scratch_hi[o] = acc_hi;
                    break;
            }
        }
        lo.swap(scratch_lo);
        hi.swap(scratch_hi);
    }
}

Box interval_forward(const NeuralNet& net, const Box& in_box) {
    std::vector<double> lo(in_box.lo), hi(in_box.hi), scratch_lo, scratch_hi;
    interval_forward_into(net, lo, hi, scratch_lo, scratch_hi);
    return Box(std::move(lo), std::move(hi));
}

SplitResult split(const Partition& p, const Box& box) {
    if (box.dim() != p.dim()) throw std::invalid_argument("split: dimension mismatch");

    SplitResult result;
    const auto clipped = intersect(box, p.domain);
    if (!clipped) {
        result.clipped_volume = box.volume();
        return result;
    }
    for (std::size_t q = 0; q < p.cell_count(); ++q) {
        if (auto piece = intersect(*clipped, p.cells[q]))
            result.fragments.push_back({q, std::move(*piece)});
    }
    result.clipped_volume = box.volume() - clipped->volume();
    return result;
}

std::vector<Fragment> split_dispatch(const Partition& p, const Box& box) {
    if (box.dim() != p.dim()) throw std::invalid_argument("split_dispatch: dimension mismatch");

    // Per-dimension dispatch intervals: interior cuts are lower-edge
    // inclusive; the first and last cells own everything beyond the domain.
    struct DimPieces {
        int first = 0;
        int last = 0;
    };
    std::vector<DimPieces> dims(p.dim());
    std::size_t count = 1;
    for (std::size_t d = 0; d < p.dim(); ++d) {
        dims[d].first = p.interval_index(d, box.lo[d]);
        dims[d].last = p.interval_index(d, box.hi[d]);
        count *= static_cast<std::size_t>(dims[d].last - dims[d].first + 1);
    }

    std::vector<Fragment> fragments;
    fragments.reserve(count);
    std::vector<int> multi(p.dim());
    for (std::size_t d = 0; d < p.dim(); ++d) multi[d] = dims[d].first;

    for (std::size_t i = 0; i < count; ++i) {
        std::vector<double> lo(p.dim()), hi(p.dim());
        for (std::size_t d = 0; d < p.dim(); ++d) {
            lo[d] = multi[d] == dims[d].first ? box.lo[d] : p.cut(d, multi[d]);
            hi[d] = multi[d] == dims[d].last ? box.hi[d] : p.cut(d, multi[d] + 1);
        }
        fragments.push_back({p.flat_index(multi), Box(std::move(lo), std::move(hi))});
        for (std::size_t d = 0; d < p.dim(); ++d) {
            if (++multi[d] <= dims[d].last) break;
            multi[d] = dims[d].first;
        }
    }
    std::sort(fragments.begin(), fragments.end(),
              [](const Fragment& a, const Fragment& b) { return a.cell < b.cell; });
    return fragments;
}

namespace {

double exterior_volume(const Box& box, const Box& domain) {
    const auto inside = intersect(box, domain);
    return box.volume() - (inside ? inside->volume() : 0.0);
}

std::vector<Fragment> combine(std::vector<Fragment> pieces, MergePolicy policy,
                              std::size_t max_fragments) {
    std::stable_sort(pieces.begin(), pieces.end(),
                     [](const Fragment& a, const Fragment& b) { return a.cell < b.cell; });
    if (policy == MergePolicy::ExactUnion) {
        if (pieces.size() > max_fragments)
            throw FragmentOverflowError(
                "step_reach: " + std::to_string(pieces.size()) + " fragments exceed the cap of " +
                std::to_string(max_fragments) + "; use per-cell-merge");
        return pieces;
    }

    std::vector<Fragment> merged;
    for (auto it = pieces.begin(); it != pieces.end();) {
        Fragment acc = *it;
        for (++it; it != pieces.end() && it->cell == acc.cell; ++it) {
            for (std::size_t d = 0; d < acc.box.dim(); ++d) {
                acc.box.lo[d] = std::min(acc.box.lo[d], it->box.lo[d]);
                acc.box.hi[d] = std::max(acc.box.hi[d], it->box.hi[d]);
            }
        }
        merged.push_back(std::move(acc));
    }
    return merged;
}

}  // namespace

std::vector<Fragment> step_reach(const HybridAutomaton& h, std::span<const Fragment> fragments,
                                 const Box& input_box, const ReachConfig& cfg, double* escaped) {
    if (fragments.empty()) throw std::invalid_argument("step_reach: no fragments");
    if (input_box.dim() != h.input_dim())
        throw std::invalid_argument("step_reach: input box dimension mismatch");

    const std::size_t nx = h.state_dim();
    std::vector<double> lo(nx + input_box.dim()), hi(nx + input_box.dim());
    std::vector<double> scratch_lo, scratch_hi;
    std::vector<int> multi(nx);

    std::vector<Fragment> pieces;
    pieces.reserve(fragments.size());
    for (const Fragment& frag : fragments) {
        lo.resize(nx + input_box.dim());
        hi.resize(lo.size());
        std::copy(frag.box.lo.begin(), frag.box.lo.end(), lo.begin());
        std::copy(frag.box.hi.begin(), frag.box.hi.end(), hi.begin());
        std::copy(input_box.lo.begin(), input_box.lo.end(), lo.begin() + static_cast<long>(nx));
        std::copy(input_box.hi.begin(), input_box.hi.end(), hi.begin() + static_cast<long>(nx));
        interval_forward_into(h.nets[frag.cell], lo, hi, scratch_lo, scratch_hi);

        // Common case: the whole image dispatches to one cell.
        bool single = true;
        for (std::size_t d = 0; d < nx; ++d) {
            const int first = h.partition.interval_index(d, lo[d]);
            if (h.partition.interval_index(d, hi[d]) != first) {
                single = false;
                break;
            }
            multi[d] = first;
        }
        Box image(lo, hi);
        if (escaped) *escaped += exterior_volume(image, h.partition.domain);
        if (single) {
            pieces.push_back({h.partition.flat_index(multi), std::move(image)});
        } else {
            for (Fragment& piece : split_dispatch(h.partition, image))
                pieces.push_back(std::move(piece));
        }
    }
    return combine(std::move(pieces), cfg.merge, cfg.max_fragments);
}

ReachSet reach(const HybridAutomaton& h, const Box& init, const ReachConfig& cfg) {
    if (init.dim() != h.state_dim()) throw std::invalid_argument("reach: init dimension mismatch");
    if (cfg.horizon < 0) throw std::invalid_argument("reach: horizon must be >= 0");

    ReachSet rs;
    rs.steps.reserve(static_cast<std::size_t>(cfg.horizon) + 1);

    auto t0 = std::chrono::steady_clock::now();
    rs.steps.push_back(split_dispatch(h.partition, init));
    rs.escaped_volume.push_back(exterior_volume(init, h.partition.domain));
    rs.step_seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());

    for (int k = 0; k < cfg.horizon; ++k) {
        t0 = std::chrono::steady_clock::now();
        double escaped = 0.0;
        try {
            rs.steps.push_back(step_reach(h, rs.steps.back(), cfg.input_box, cfg, &escaped));
        } catch (const FragmentOverflowError& e) {
            throw FragmentOverflowError("step " + std::to_string(k + 1) + ": " + e.what());
        }
        rs.escaped_volume.push_back(escaped);
        rs.step_seconds.push_back(
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return rs;
}

ReachSet reach_single(const NeuralNet& net, const Box& domain, const Box& init,
                      const Box& input_box, int horizon, std::size_t max_fragments) {
    HybridAutomaton h;
    h.partition = make_partition(domain, std::vector<int>(domain.dim(), 1));
    h.nets.push_back(net);
    h.input_box = input_box;
    h.validate();

    ReachConfig cfg;
    cfg.horizon = horizon;
    cfg.input_box = input_box;
    cfg.merge = MergePolicy::PerCellMerge;
    cfg.max_fragments = max_fragments;
    return reach(h, init, cfg);
}

}  // namespace hybran
