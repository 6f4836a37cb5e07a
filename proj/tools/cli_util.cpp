#include "cli_util.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <stdexcept>

#include "hybran/io.hpp"
#include "hybran/version.hpp"

namespace hybran::cli {

std::vector<double> parse_vector(const std::string& text) {
    std::vector<double> values;
    std::size_t at = 0;
    while (at <= text.size()) {
        const std::size_t comma = std::min(text.find(',', at), text.size());
        const std::string token = text.substr(at, comma - at);
        if (token.empty()) throw std::invalid_argument("empty numeric field in '" + text + "'");
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(token, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad number '" + token + "'");
        }
        if (used != token.size()) throw std::invalid_argument("bad number '" + token + "'");
        values.push_back(v);
        if (comma == text.size()) break;
        at = comma + 1;
    }
    return values;
}

Box parse_box(const std::string& text) {
    std::vector<double> lo, hi;
    std::size_t at = 0;
    while (at <= text.size()) {
        const std::size_t semi = std::min(text.find(';', at), text.size());
        const auto pair = parse_vector(text.substr(at, semi - at));
        if (pair.size() != 2)
            throw std::invalid_argument("box dimension needs exactly 'lo,hi': '" + text + "'");
        lo.push_back(pair[0]);
        hi.push_back(pair[1]);
        if (semi == text.size()) break;
        at = semi + 1;
    }
    return Box(std::move(lo), std::move(hi));
}

std::string default_box_text(const Box& b) {
    std::string out;
    for (std::size_t d = 0; d < b.dim(); ++d) {
        if (d) out += ';';
        out += format_double(b.lo[d]) + "," + format_double(b.hi[d]);
    }
    return out;
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void Manifest::write(const std::filesystem::path& path) const {
    nlohmann::json j;
    j["command"] = command;
    j["tool_version"] = kVersion;
    j["prng"] = kPrngId;
    j["seed"] = seed;
    j["config"] = config;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    j["timings"] = timings;
    j["created_at"] = timestamp_utc();
    write_file_atomic(path, j.dump(2) + "\n");
}

std::string render_reach_svg(const ReachSet& rs,
                             const std::vector<std::vector<std::vector<double>>>& overlays) {
    constexpr double kWidth = 900, kHeight = 700, kPad = 50;

    // Data bounds over fragments and overlays (first two dimensions).
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    bool seen = false;
    auto grow = [&](double x, double y) {
        if (!seen) {
            x0 = x1 = x;
            y0 = y1 = y;
            seen = true;
            return;
        }
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    };
    for (const auto& step : rs.steps) {
        for (const Fragment& f : step) {
            grow(f.box.lo[0], f.box.lo[1]);
            grow(f.box.hi[0], f.box.hi[1]);
        }
    }
    for (const auto& traj : overlays) {
        for (const auto& p : traj) grow(p[0], p[1]);
    }
    if (x1 - x0 < 1e-12) x1 = x0 + 1e-12;
    if (y1 - y0 < 1e-12) y1 = y0 + 1e-12;

    const double sx = (kWidth - 2 * kPad) / (x1 - x0);
    const double sy = -(kHeight - 2 * kPad) / (y1 - y0);
    const double bx = kPad - sx * x0;
    const double by = kHeight - kPad - sy * y0;
    auto px = [&](double x) { return sx * x + bx; };
    auto py = [&](double y) { return sy * y + by; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string((int)kWidth) +
           "\" height=\"" + std::to_string((int)kHeight) + "\">\n";
    svg += "<metadata>{\"transform\":{\"sx\":" + format_double(sx) + ",\"bx\":" +
           format_double(bx) + ",\"sy\":" + format_double(sy) + ",\"by\":" + format_double(by) +
           "},\"x_range\":[" + format_double(x0) + "," + format_double(x1) + "],\"y_range\":[" +
           format_double(y0) + "," + format_double(y1) + "]}</metadata>\n";
    svg += "<g fill=\"#cc2222\" fill-opacity=\"0.18\" stroke=\"#cc2222\" stroke-opacity=\"0.45\" "
           "stroke-width=\"0.6\">\n";
    for (const auto& step : rs.steps) {
        for (const Fragment& f : step) {
            const double rx = px(f.box.lo[0]);
            const double ry = py(f.box.hi[1]);
            const double rw = std::max(px(f.box.hi[0]) - rx, 0.3);
            const double rh = std::max(py(f.box.lo[1]) - ry, 0.3);
            svg += "<rect x=\"" + format_double(rx) + "\" y=\"" + format_double(ry) +
                   "\" width=\"" + format_double(rw) + "\" height=\"" + format_double(rh) +
                   "\"/>\n";
        }
    }
    svg += "</g>\n";

    if (!overlays.empty()) {
        svg += "<g fill=\"none\" stroke=\"#2244cc\" stroke-opacity=\"0.6\" "
               "stroke-width=\"0.8\">\n";
        for (const auto& traj : overlays) {
            svg += "<polyline points=\"";
            for (const auto& p : traj)
                svg += format_double(px(p[0])) + "," + format_double(py(p[1])) + " ";
            svg += "\"/>\n";
        }
        svg += "</g>\n";
    }

    // Frame and extent labels.
    svg += "<path fill=\"none\" stroke=\"#333\" d=\"M " + format_double(kPad) + " " +
           format_double(kPad) + " H " + format_double(kWidth - kPad) + " V " +
           format_double(kHeight - kPad) + " H " + format_double(kPad) + " Z\"/>\n";
    svg += "<text x=\"" + format_double(kPad) + "\" y=\"" + format_double(kHeight - kPad + 18) +
           "\" font-size=\"12\">x1 in [" + format_double(x0) + ", " + format_double(x1) +
           "]</text>\n";
    svg += "<text x=\"" + format_double(kPad) + "\" y=\"" + format_double(kPad - 10) +
           "\" font-size=\"12\">x2 in [" + format_double(y0) + ", " + format_double(y1) +
           "]</text>\n";
    svg += "</svg>\n";
    return svg;
}

}  // namespace hybran::cli
