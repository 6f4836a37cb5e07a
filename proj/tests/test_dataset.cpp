#include <doctest.h>

#include <numbers>
#include <stdexcept>

#include "hybran/dataset.hpp"
#include "hybran/limit_cycle.hpp"

using namespace hybran;

namespace {

Box box2(double lo1, double hi1, double lo2, double hi2) {
    return Box({lo1, lo2}, {hi1, hi2});
}

Trace make_trace(int id, std::vector<std::vector<double>> states) {
    Trace t;
    t.id = id;
    t.states = std::move(states);
    t.inputs.assign(t.states.size() - 1, {0.0});
    return t;
}

}  // namespace

TEST_CASE("segment: pair count is conserved across cells") {
    const Box domain({-4.0, -std::numbers::pi}, {4.0, std::numbers::pi});
    const Partition p = make_partition(domain, {4, 3});
    const auto traces = generate_traces(LimitCycleParams{}, 50, 150, domain, 7);

    // Oracle: direct enumeration of consecutive pairs.
    std::size_t expected = 0;
    for (const Trace& t : traces) expected += t.steps();
    REQUIRE(expected == 7500);

    const auto datasets = segment(traces, p);
    REQUIRE(datasets.size() == 12);
    std::size_t total = 0;
    for (const auto& d : datasets) total += d.size();
    CHECK(total == expected);

    // Membership: every pair's x(k) locates to the dataset's cell.
    for (const auto& d : datasets) {
        for (const auto& [input, target] : d.pairs) {
            REQUIRE(input.size() == 3);
            REQUIRE(target.size() == 2);
            const std::vector<double> x{input[0], input[1]};
            CHECK(locate(p, x).cell == d.cell);
        }
    }

    // Determinism.
    const auto again = segment(traces, p);
    for (std::size_t q = 0; q < datasets.size(); ++q) CHECK(again[q].pairs == datasets[q].pairs);
}

TEST_CASE("segment: a trace confined to one cell") {
    const Partition p = make_partition(box2(0, 4, 0, 4), {2, 2});
    const Trace t = make_trace(0, {{0.5, 0.5}, {0.6, 0.6}, {0.7, 0.7}});

    const auto datasets = segment(std::vector<Trace>{t}, p);
    CHECK(datasets[0].size() == 2);
    CHECK(datasets[1].size() == 0);
    CHECK(datasets[2].size() == 0);
    CHECK(datasets[3].size() == 0);
}

TEST_CASE("segment: crossing pairs follow the source cell") {
    const Partition p = make_partition(box2(0, 2, 0, 1), {2, 1});
    // Alternates between cell 0 (x < 1) and cell 1 (x >= 1) every step.
    const Trace t = make_trace(0, {{0.5, 0.5}, {1.5, 0.5}, {0.4, 0.5}, {1.6, 0.5}});

    const auto datasets = segment(std::vector<Trace>{t}, p);
    REQUIRE(datasets.size() == 2);
    CHECK(datasets[0].size() == 2);  // x(0)=0.5, x(2)=0.4
    CHECK(datasets[1].size() == 1);  // x(1)=1.5
    CHECK(datasets[0].pairs[0].second == std::vector<double>{1.5, 0.5});
    CHECK(datasets[1].pairs[0].second == std::vector<double>{0.4, 0.5});

    // The literal within-cell policy drops every crossing pair.
    const auto literal = segment(std::vector<Trace>{t}, p, SegmentPolicy::WithinCell);
    CHECK(literal[0].size() == 0);
    CHECK(literal[1].size() == 0);

    const Trace stay = make_trace(1, {{0.1, 0.5}, {0.2, 0.5}, {1.5, 0.5}});
    const auto kept = segment(std::vector<Trace>{stay}, p, SegmentPolicy::WithinCell);
    CHECK(kept[0].size() == 1);  // only the within-cell step survives
}

TEST_CASE("segment: exterior samples go to the nearest cell") {
    const Partition p = make_partition(box2(0, 2, 0, 1), {2, 1});
    const Trace t = make_trace(0, {{5.0, 0.5}, {1.5, 0.5}});

    const auto datasets = segment(std::vector<Trace>{t}, p);
    CHECK(datasets[0].size() == 0);
    CHECK(datasets[1].size() == 1);

    Trace bad = t;
    bad.states[0] = {5.0, 0.5, 1.0};
    CHECK_THROWS_AS(segment(std::vector<Trace>{bad}, p), std::invalid_argument);
}

TEST_CASE("dataset_stats: counts, sparse flags and empty cells") {
    const Partition p = make_partition(box2(0, 3, 0, 1), {3, 1});
    std::vector<std::vector<double>> walk;
    for (int i = 0; i < 12; ++i) walk.push_back({0.5, 0.5});
    const auto datasets =
        segment(std::vector<Trace>{make_trace(0, walk), make_trace(1, {{1.5, 0.5}, {1.6, 0.5}})},
                p);

    const DatasetStats stats = dataset_stats(datasets);
    REQUIRE(stats.rows.size() == 3);
    CHECK(stats.total_pairs == 12);
    CHECK(stats.rows[0].pairs == 11);
    CHECK_FALSE(stats.rows[0].sparse);
    CHECK(stats.rows[1].pairs == 1);
    CHECK(stats.rows[1].sparse);
    CHECK(stats.rows[2].pairs == 0);
    CHECK(stats.rows[2].sparse);
    REQUIRE(stats.empty_cells.size() == 1);
    CHECK(stats.empty_cells[0] == 2);

    // All populated -> no empty cells.
    const auto full = segment(
        std::vector<Trace>{make_trace(2, {{0.5, 0.5}, {1.5, 0.5}, {2.5, 0.5}, {2.6, 0.5}})}, p);
    CHECK(dataset_stats(full).empty_cells.empty());
}

TEST_CASE("split_holdout: deterministic trace-level split") {
    const Box domain({-4.0, -std::numbers::pi}, {4.0, std::numbers::pi});
    const auto traces = generate_traces(LimitCycleParams{}, 50, 5, domain, 1);

    const TraceSplit split = split_holdout(traces, 0.2);
    CHECK(split.train.size() == 40);
    CHECK(split.test.size() == 10);
    CHECK(split.test.front().id == 40);
    CHECK(split.test.back().id == 49);

    const TraceSplit none = split_holdout(traces, 0.0);
    CHECK(none.train.size() == 50);
    CHECK(none.test.empty());

    CHECK_THROWS_AS(split_holdout(traces, 1.0), std::invalid_argument);
}
