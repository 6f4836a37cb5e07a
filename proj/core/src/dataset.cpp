#include "hybran/dataset.hpp"

#include <cmath>
#include <stdexcept>

namespace hybran {

std::vector<CellDataset> segment(std::span<const Trace> traces, const Partition& p,
                                 SegmentPolicy policy) {
    std::vector<CellDataset> datasets(p.cell_count());
    for (std::size_t q = 0; q < p.cell_count(); ++q) datasets[q].cell = q;

    for (const Trace& trace : traces) {
        validate_trace(trace);
        if (trace.state_dim() != p.dim())
            throw std::invalid_argument("segment: trace state dimension != partition dimension");
        for (std::size_t k = 0; k < trace.steps(); ++k) {
            const auto& x = trace.states[k];
            const auto& u = trace.inputs[k];
            const auto& x_next = trace.states[k + 1];
            const std::size_t q = locate(p, x).cell;
            if (policy == SegmentPolicy::WithinCell && locate(p, x_next).cell != q) continue;

            std::vector<double> in = x;
            in.insert(in.end(), u.begin(), u.end());
            datasets[q].pairs.emplace_back(std::move(in), x_next);
        }
    }
    return datasets;
}

DatasetStats dataset_stats(std::span<const CellDataset> datasets, std::size_t min_pairs) {
    DatasetStats stats;
    stats.rows.reserve(datasets.size());
    for (const CellDataset& d : datasets) {
        stats.rows.push_back({d.cell, d.size(), d.size() < min_pairs});
        stats.total_pairs += d.size();
        if (d.empty()) stats.empty_cells.push_back(d.cell);
    }
    return stats;
}

TraceSplit split_holdout(std::span<const Trace> traces, double fraction) {
    if (!(fraction >= 0.0 && fraction < 1.0))
        throw std::invalid_argument("split_holdout: fraction must be in [0, 1)");
    const auto n_test =
        static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(traces.size())));
    const std::size_t n_train = traces.size() - n_test;

    TraceSplit split;
    split.train.assign(traces.begin(), traces.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.test.assign(traces.begin() + static_cast<std::ptrdiff_t>(n_train), traces.end());
    return split;
}

}  // namespace hybran
