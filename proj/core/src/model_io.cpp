#include <nlohmann/json.hpp>
#include <stdexcept>

#include "hybran/errors.hpp"
#include "hybran/io.hpp"
#include "hybran/version.hpp"

namespace hybran {

namespace {

using nlohmann::json;

json box_to_json(const Box& b) { return json{{"lo", b.lo}, {"hi", b.hi}}; }

Box box_from_json(const json& j) {
    return Box(j.at("lo").get<std::vector<double>>(), j.at("hi").get<std::vector<double>>());
}

json net_to_json(const NeuralNet& net) {
    json layers = json::array();
    for (const Layer& l : net.layers) {
        json rows = json::array();
        for (std::size_t o = 0; o < l.out; ++o) {
            rows.push_back(std::vector<double>(l.w.begin() + static_cast<std::ptrdiff_t>(o * l.in),
                                               l.w.begin() +
                                                   static_cast<std::ptrdiff_t>((o + 1) * l.in)));
        }
        layers.push_back(json{{"w", rows}, {"b", l.b}, {"act", to_string(l.act)}});
    }
    return json{{"layers", layers}};
}

NeuralNet net_from_json(const json& j) {
    NeuralNet net;
    for (const json& jl : j.at("layers")) {
        Layer l;
        const json& rows = jl.at("w");
        l.out = rows.size();
        if (l.out == 0) throw std::invalid_argument("model: layer with no rows");
        l.in = rows.front().size();
        l.w.reserve(l.in * l.out);
        for (const json& row : rows) {
            if (row.size() != l.in) throw std::invalid_argument("model: ragged weight matrix");
            for (const json& v : row) l.w.push_back(v.get<double>());
        }
        l.b = jl.at("b").get<std::vector<double>>();
        l.act = activation_from_string(jl.at("act").get<std::string>());
        net.layers.push_back(std::move(l));
    }
    net.validate();
    return net;
}

}  // namespace

std::string model_to_json(const HybridAutomaton& h, const ModelMeta& meta) {
    json j;
    j["version"] = 1;
    j["partition"] = {{"domain", box_to_json(h.partition.domain)},
                      {"segments", h.partition.segments}};
    j["input_box"] = box_to_json(h.input_box);
    j["nets"] = json::array();
    for (const NeuralNet& net : h.nets) j["nets"].push_back(net_to_json(net));
    j["transitions"] = json::array();
    for (const Transition& t : h.transitions)
        j["transitions"].push_back(
            json{{"from", t.from}, {"to", t.to}, {"guard", box_to_json(t.guard)}});
    j["meta"] = {{"seed", meta.seed},
                 {"arch", meta.arch},
                 {"trained_at", meta.trained_at},
                 {"mode", meta.mode},
                 {"sparse_cells", meta.sparse_cells},
                 {"fallback_cells", meta.fallback_cells},
                 {"prng", kPrngId},
                 {"tool_version", kVersion}};
    return j.dump(2) + "\n";
}

HybridAutomaton model_from_json(const std::string& text, ModelMeta* meta) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("model: invalid JSON: ") + e.what());
    }
    try {
        if (j.at("version").get<int>() != 1)
            throw std::invalid_argument("model: unsupported version");

        HybridAutomaton h;
        const json& jp = j.at("partition");
        h.partition = make_partition(box_from_json(jp.at("domain")),
                                     jp.at("segments").get<std::vector<int>>());
        h.input_box = box_from_json(j.at("input_box"));
        for (const json& jn : j.at("nets")) h.nets.push_back(net_from_json(jn));
        for (const json& jt : j.at("transitions"))
            h.transitions.push_back({jt.at("from").get<std::size_t>(),
                                     jt.at("to").get<std::size_t>(),
                                     box_from_json(jt.at("guard"))});
        h.validate();

        if (meta && j.contains("meta")) {
            const json& jm = j["meta"];
            meta->seed = jm.value("seed", std::uint64_t{0});
            meta->arch = jm.value("arch", std::vector<std::size_t>{});
            meta->trained_at = jm.value("trained_at", std::string{});
            meta->mode = jm.value("mode", std::string{});
            meta->sparse_cells = jm.value("sparse_cells", std::vector<std::size_t>{});
            meta->fallback_cells = jm.value("fallback_cells", std::vector<std::size_t>{});
        }
        return h;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("model: missing or mistyped field: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const HybridAutomaton& h,
                const ModelMeta& meta) {
    write_file_atomic(path, model_to_json(h, meta));
}

HybridAutomaton load_model(const std::filesystem::path& path, ModelMeta* meta) {
    return model_from_json(read_file(path), meta);
}

}  // namespace hybran
