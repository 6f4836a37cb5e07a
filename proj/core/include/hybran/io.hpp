#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hybran/automaton.hpp"
#include "hybran/reach.hpp"
#include "hybran/trace.hpp"

namespace hybran {

/// Shortest exact decimal or up to 17 significant digits (%.17g).
std::string format_double(double v);

/// Writes via a temp file in the same directory plus rename, so interrupted
/// runs never leave a half-written artifact. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

// --- trace CSV ------------------------------------------------------------
// Header: trace_id,k,x1,...,xn,u1,...,um. One row per (trace, step); the
// final state row of each trace has empty input fields. LF line endings.

std::string traces_to_csv(std::span<const Trace> traces);
std::vector<Trace> traces_from_csv(const std::string& csv);
void save_traces(const std::filesystem::path& path, std::span<const Trace> traces);
std::vector<Trace> load_traces(const std::filesystem::path& path);

// --- model JSON -------------------------------------------------------------

struct ModelMeta {
    std::uint64_t seed = 0;
    std::vector<std::size_t> arch;
    std::string trained_at;  // ISO 8601 UTC
    std::string mode;        // "hybrid" or "single"
    std::vector<std::size_t> sparse_cells;
    std::vector<std::size_t> fallback_cells;
};

std::string model_to_json(const HybridAutomaton& h, const ModelMeta& meta);

/// Parses and validates every automaton invariant; cells are regenerated from
/// the stored domain and segment counts.
HybridAutomaton model_from_json(const std::string& json, ModelMeta* meta = nullptr);

void save_model(const std::filesystem::path& path, const HybridAutomaton& h,
                const ModelMeta& meta);
HybridAutomaton load_model(const std::filesystem::path& path, ModelMeta* meta = nullptr);

// --- reach CSVs -------------------------------------------------------------

/// Header k,cell,lo1,...,lon,hi1,...,hin; one row per fragment per step.
std::string reach_to_csv(const ReachSet& rs);
/// Header k,seconds.
std::string timing_to_csv(const ReachSet& rs);
/// Header k,area: summed fragment volume per step.
std::string area_to_csv(const ReachSet& rs);

}  // namespace hybran
