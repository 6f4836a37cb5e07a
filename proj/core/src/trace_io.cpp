#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hybran/errors.hpp"
#include "hybran/io.hpp"

namespace hybran {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);  // best effort
    }
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp.string());
        out << content;
        if (!out.flush()) throw IoError("write failed: " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename into place: " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string traces_to_csv(std::span<const Trace> traces) {
    if (traces.empty()) throw std::invalid_argument("traces_to_csv: no traces");
    const std::size_t nx = traces.front().state_dim();
    const std::size_t nu = traces.front().input_dim();

    std::string out = "trace_id,k";
    for (std::size_t d = 1; d <= nx; ++d) out += ",x" + std::to_string(d);
    for (std::size_t d = 1; d <= nu; ++d) out += ",u" + std::to_string(d);
    out += '\n';

    for (const Trace& t : traces) {
        validate_trace(t);
        for (std::size_t k = 0; k < t.states.size(); ++k) {
            out += std::to_string(t.id);
            out += ',';
            out += std::to_string(k);
            for (double v : t.states[k]) {
                out += ',';
                out += format_double(v);
            }
            if (k < t.inputs.size()) {
                for (double v : t.inputs[k]) {
                    out += ',';
                    out += format_double(v);
                }
            } else {
                out.append(nu, ',');  // final state row: empty input fields
            }
            out += '\n';
        }
    }
    return out;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

std::vector<Trace> traces_from_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("trace CSV: missing header");

    const auto header = split_fields(line);
    std::size_t nx = 0, nu = 0;
    for (const auto& h : header) {
        if (h.starts_with('x')) ++nx;
        if (h.starts_with('u')) ++nu;
    }
    if (header.size() != 2 + nx + nu || nx == 0)
        throw std::invalid_argument("trace CSV: malformed header");

    std::vector<Trace> traces;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != header.size())
            throw std::invalid_argument("trace CSV: wrong field count");

        const int id = std::stoi(fields[0]);
        if (traces.empty() || traces.back().id != id) {
            traces.emplace_back();
            traces.back().id = id;
        }
        Trace& t = traces.back();

        std::vector<double> x(nx);
        for (std::size_t d = 0; d < nx; ++d) x[d] = std::stod(fields[2 + d]);
        t.states.push_back(std::move(x));

        const bool has_input = !fields[2 + nx].empty();
        if (has_input) {
            std::vector<double> u(nu);
            for (std::size_t d = 0; d < nu; ++d) u[d] = std::stod(fields[2 + nx + d]);
            t.inputs.push_back(std::move(u));
        }
    }
    for (const Trace& t : traces) validate_trace(t);
    return traces;
}

void save_traces(const std::filesystem::path& path, std::span<const Trace> traces) {
    write_file_atomic(path, traces_to_csv(traces));
}

std::vector<Trace> load_traces(const std::filesystem::path& path) {
    return traces_from_csv(read_file(path));
}

}  // namespace hybran
