#include "hybran/io.hpp"

namespace hybran {

std::string reach_to_csv(const ReachSet& rs) {
    std::size_t dim = 0;
    for (const auto& step : rs.steps) {
        if (!step.empty()) {
            dim = step.front().box.dim();
            break;
        }
    }
    std::string out = "k,cell";
    for (std::size_t d = 1; d <= dim; ++d) out += ",lo" + std::to_string(d);
    for (std::size_t d = 1; d <= dim; ++d) out += ",hi" + std::to_string(d);
    out += '\n';

    for (std::size_t k = 0; k < rs.steps.size(); ++k) {
        for (const Fragment& f : rs.steps[k]) {
            out += std::to_string(k);
            out += ',';
            out += std::to_string(f.cell);
            for (double v : f.box.lo) {
                out += ',';
                out += format_double(v);
            }
            for (double v : f.box.hi) {
                out += ',';
                out += format_double(v);
            }
            out += '\n';
        }
    }
    return out;
}

std::string timing_to_csv(const ReachSet& rs) {
    std::string out = "k,seconds\n";
    for (std::size_t k = 0; k < rs.step_seconds.size(); ++k) {
        out += std::to_string(k);
        out += ',';
        out += format_double(rs.step_seconds[k]);
        out += '\n';
    }
    return out;
}

std::string area_to_csv(const ReachSet& rs) {
    std::string out = "k,area\n";
    for (std::size_t k = 0; k < rs.steps.size(); ++k) {
        double area = 0.0;
        for (const Fragment& f : rs.steps[k]) area += f.box.volume();
        out += std::to_string(k);
        out += ',';
        out += format_double(area);
        out += '\n';
    }
    return out;
}

}  // namespace hybran
