#include "hybran/automaton.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>

namespace hybran {

void HybridAutomaton::validate() const {
    if (nets.size() != partition.cell_count())
        throw std::invalid_argument("HybridAutomaton: one network per cell required");
    const std::size_t nx = state_dim();
    const std::size_t nu = input_dim();
    for (const NeuralNet& net : nets) {
        net.validate();
        if (net.input_size() != nx + nu)
            throw std::invalid_argument("HybridAutomaton: net input size != n_x + n_u");
        if (net.output_size() != nx)
            throw std::invalid_argument("HybridAutomaton: net output size != n_x");
    }
    for (const Transition& t : transitions) {
        if (t.from >= nets.size() || t.to >= nets.size() || t.from == t.to)
            throw std::invalid_argument("HybridAutomaton: invalid transition endpoints");
        if (t.guard.dim() != nx)
            throw std::invalid_argument("HybridAutomaton: guard dimension mismatch");
        const Box& cell = partition.cells[t.from];
        for (std::size_t d = 0; d < nx; ++d) {
            if (t.guard.lo[d] < cell.lo[d] || t.guard.hi[d] > cell.hi[d])
                throw std::invalid_argument("HybridAutomaton: guard escapes its source cell");
        }
    }
}

HybridAutomaton assemble(Partition partition, std::vector<NeuralNet> nets,
                         std::span<const Trace> traces, Box input_box) {
    if (nets.size() != partition.cell_count())
        throw std::invalid_argument("assemble: nets not index-aligned with cells");

    // Witness hull per observed (from, to) pair. Witnesses are clamped to the
    // source cell so guards stay inside it even for exterior samples.
    std::map<std::pair<std::size_t, std::size_t>, Box> guards;
    for (const Trace& trace : traces) {
        validate_trace(trace);
        if (trace.state_dim() != partition.dim())
            throw std::invalid_argument("assemble: trace dimension mismatch");
        for (std::size_t k = 0; k < trace.steps(); ++k) {
            const std::size_t p = locate(partition, trace.states[k]).cell;
            const std::size_t q = locate(partition, trace.states[k + 1]).cell;
            if (p == q) continue;
            std::vector<double> w = partition.cells[p].clamp(trace.states[k]);
            auto [it, inserted] = guards.try_emplace({p, q}, Box(w, w));
            if (!inserted) {
                for (std::size_t d = 0; d < w.size(); ++d) {
                    it->second.lo[d] = std::min(it->second.lo[d], w[d]);
                    it->second.hi[d] = std::max(it->second.hi[d], w[d]);
                }
            }
        }
    }

    HybridAutomaton h;
    h.partition = std::move(partition);
    h.nets = std::move(nets);
    h.input_box = std::move(input_box);
    h.transitions.reserve(guards.size());
    for (auto& [edge, guard] : guards)
        h.transitions.push_back({edge.first, edge.second, std::move(guard)});
    h.validate();
    return h;
}

StepResult step(const HybridAutomaton& h, std::span<const double> x, std::span<const double> u) {
    if (x.size() != h.state_dim()) throw std::invalid_argument("step: state dimension mismatch");
    if (u.size() != h.input_dim()) throw std::invalid_argument("step: input dimension mismatch");

    const LocateResult loc = locate(h.partition, x);
    std::vector<double> in(x.begin(), x.end());
    in.insert(in.end(), u.begin(), u.end());
    return {forward(h.nets[loc.cell], in), loc.cell, loc.exterior};
}

SimResult simulate(const HybridAutomaton& h, std::span<const double> x0,
                   std::span<const std::vector<double>> inputs) {
    SimResult sim;
    sim.trajectory.reserve(inputs.size() + 1);
    sim.cells.reserve(inputs.size() + 1);
    sim.trajectory.emplace_back(x0.begin(), x0.end());

    LocateResult loc = locate(h.partition, x0);
    sim.cells.push_back(loc.cell);
    if (loc.exterior) sim.exterior_events.push_back(0);

    for (std::size_t k = 0; k < inputs.size(); ++k) {
        StepResult next = step(h, sim.trajectory.back(), inputs[k]);
        sim.trajectory.push_back(std::move(next.state));
        loc = locate(h.partition, sim.trajectory.back());
        sim.cells.push_back(loc.cell);
        if (loc.exterior) sim.exterior_events.push_back(k + 1);
    }
    return sim;
}

MseReport evaluate_mse(const HybridAutomaton& h, std::span<const Trace> test_traces) {
    if (test_traces.empty()) throw std::invalid_argument("evaluate_mse: empty test set");

    MseReport report;
    std::vector<double> cell_sq(h.partition.cell_count(), 0.0);
    std::vector<std::size_t> cell_n(h.partition.cell_count(), 0);

    double total_sq = 0.0;
    std::vector<double> in, scratch, out;
    for (const Trace& trace : test_traces) {
        validate_trace(trace);
        for (std::size_t k = 0; k < trace.steps(); ++k) {
            const auto& x = trace.states[k];
            const std::size_t q = locate(h.partition, x).cell;
            in.assign(x.begin(), x.end());
            in.insert(in.end(), trace.inputs[k].begin(), trace.inputs[k].end());
            forward_into(h.nets[q], in, scratch, out);

            double sq = 0.0;
            for (std::size_t d = 0; d < out.size(); ++d) {
                const double diff = out[d] - trace.states[k + 1][d];
                sq += diff * diff;
            }
            total_sq += sq;
            cell_sq[q] += sq;
            ++cell_n[q];
            ++report.predictions;
        }
    }
    if (report.predictions == 0) throw std::invalid_argument("evaluate_mse: traces have no steps");

    report.mse = total_sq / static_cast<double>(report.predictions);
    for (std::size_t q = 0; q < cell_sq.size(); ++q) {
        if (cell_n[q] == 0) continue;
        report.per_cell.push_back({q, cell_sq[q] / static_cast<double>(cell_n[q]), cell_n[q]});
    }
    return report;
}

}  // namespace hybran
