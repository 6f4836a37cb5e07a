// Acceptance suite: runs every release criterion end to end and prints one
// PASS/FAIL line per criterion. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "hybran/automaton.hpp"
#include "hybran/dataset.hpp"
#include "hybran/io.hpp"
#include "hybran/limit_cycle.hpp"
#include "hybran/reach.hpp"
#include "hybran/rng.hpp"
#include "hybran/threads.hpp"
#include "hybran/train.hpp"

using namespace hybran;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

struct Criterion {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += "FAILED: " + what;
        }
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

void run(int number, const std::string& title, double budget_seconds,
         const std::function<void(Criterion&)>& body) {
    Criterion c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.require(false, std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget_seconds > 0.0 && seconds > budget_seconds) {
        c.require(false, "runtime " + std::to_string(seconds) + "s exceeds budget " +
                             std::to_string(budget_seconds) + "s");
    }
    if (!c.pass) ++g_failures;
    std::printf("[%s] criterion %d: %s (%.2fs) %s\n", c.pass ? "PASS" : "FAIL", number,
                title.c_str(), seconds, c.detail.c_str());
    std::fflush(stdout);
}

Box box2(double lo1, double hi1, double lo2, double hi2) {
    return Box({lo1, lo2}, {hi1, hi2});
}

// Shared experiment configuration (the CLI train defaults).
TrainConfig experiment_config(std::uint64_t seed) {
    TrainConfig cfg;
    cfg.optimizer = Optimizer::Lm;
    cfg.epochs = 300;
    cfg.restarts = 16;
    cfg.restart_target = 0.12;
    cfg.validation_fraction = 0.2;
    cfg.init = InitScheme::SteepMix;
    cfg.seed = seed;
    return cfg;
}

const Box kDomain({-4.0, -std::numbers::pi}, {4.0, std::numbers::pi});
const Box kInputBox({-1.3}, {1.7});

struct SeedResult {
    double hybrid_mse = 0.0;
    double single_mse = 0.0;
    double hybrid_wall = 0.0;
    double single_wall = 0.0;
};

// Populated by criterion 3, reused by 4, 5, 8 and 9.
std::vector<SeedResult> g_seed_results;
HybridAutomaton g_hybrid_model;  // fixed seed (7)
HybridAutomaton g_single_model;

SeedResult run_experiment_seed(std::uint64_t seed, bool keep_models) {
    const auto traces = generate_traces(LimitCycleParams{}, 50, 150, kDomain, seed);
    const TraceSplit split = split_holdout(traces, 0.2);
    const TrainConfig cfg = experiment_config(seed);

    SeedResult result;

    Partition hybrid_part = make_partition(kDomain, {4, 3});
    const auto hybrid_data = segment(split.train, hybrid_part);
    TrainAllResult hybrid = train_all(hybrid_data, one_hidden(3, 20, 2), cfg);
    result.hybrid_wall = hybrid.wall_seconds;
    HybridAutomaton hybrid_model =
        assemble(std::move(hybrid_part), std::move(hybrid.nets), split.train, kInputBox);
    result.hybrid_mse = evaluate_mse(hybrid_model, split.test).mse;

    Partition single_part = make_partition(kDomain, {1, 1});
    const auto single_data = segment(split.train, single_part);
    TrainAllResult single = train_all(single_data, one_hidden(3, 200, 2), cfg);
    result.single_wall = single.wall_seconds;
    HybridAutomaton single_model =
        assemble(std::move(single_part), std::move(single.nets), split.train, kInputBox);
    result.single_mse = evaluate_mse(single_model, split.test).mse;

    if (keep_models) {
        g_hybrid_model = std::move(hybrid_model);
        g_single_model = std::move(single_model);
    }
    return result;
}

void criterion_partition(Criterion& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const Partition p = make_partition(box2(-4, 4, -3, 3), {4, 3});
    const double build_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    c.require(p.cell_count() == 12, "expected 12 cells");
    const double cuts1[] = {-4, -2, 0, 2, 4};
    const double cuts2[] = {-3, -1, 1, 3};
    for (int m = 0; m <= 4; ++m) c.require(p.cut(0, m) == cuts1[m], "dim-1 cut point");
    for (int m = 0; m <= 3; ++m) c.require(p.cut(1, m) == cuts2[m], "dim-2 cut point");

    double volume = 0.0;
    for (const Box& cell : p.cells) volume += cell.volume();
    c.require(std::fabs(volume - p.domain.volume()) <= 1e-9 * p.domain.volume(),
              "cell volume sum != domain volume");
    c.require(build_seconds < 1e-3, "construction took " + std::to_string(build_seconds) + "s");
    c.note("12 cells, volume sum " + format_double(volume) + ", built in " +
           std::to_string(build_seconds * 1e6) + "us");
}

void criterion_gradient(Criterion& c) {
    Rng rng(2026);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t in = 1 + rng.next_u64() % 4;
        const std::size_t out = 1 + rng.next_u64() % 3;
        const std::size_t h1 = 1 + rng.next_u64() % 64;
        Arch arch;
        if (trial % 3 == 0) {
            const std::size_t h2 = 1 + rng.next_u64() % 32;
            arch = Arch{{in, h1, h2, out},
                        {Activation::Tanh, Activation::Tanh, Activation::Identity}};
        } else {
            arch = one_hidden(in, h1, out);
        }
        const NeuralNet net = init_net(arch, 1000 + static_cast<std::uint64_t>(trial));
        std::vector<double> x(in), y(out);
        for (auto& v : x) v = rng.uniform(-2, 2);
        for (auto& v : y) v = rng.uniform(-2, 2);
        worst = std::max(worst, gradient_check(net, {x, y}));
    }
    c.require(worst < 1e-4, "max relative gradient error " + format_double(worst));
    c.note("max relative error " + format_double(worst) + " over 20 architectures");
}

void criterion_modeling(Criterion& c) {
    const std::vector<std::uint64_t> seeds{7, 8, 9, 10, 11};
    g_seed_results.clear();
    int hybrid_wins = 0;
    for (std::uint64_t seed : seeds) {
        const SeedResult r = run_experiment_seed(seed, seed == 7);
        if (r.hybrid_mse <= r.single_mse) ++hybrid_wins;
        g_seed_results.push_back(r);
        std::printf("    seed %llu: hybrid MSE %.4f (%.2fs), single MSE %.4f (%.2fs)\n",
                    static_cast<unsigned long long>(seed), r.hybrid_mse, r.hybrid_wall,
                    r.single_mse, r.single_wall);
    }
    const SeedResult& fixed = g_seed_results.front();
    c.require(fixed.hybrid_mse <= 0.1,
              "hybrid MSE " + format_double(fixed.hybrid_mse) + " > 0.1 at seed 7");
    c.require(fixed.single_mse <= 0.15,
              "single MSE " + format_double(fixed.single_mse) + " > 0.15 at seed 7");
    c.require(hybrid_wins >= 4,
              "hybrid beat single on only " + std::to_string(hybrid_wins) + "/5 seeds");
    c.note("seed 7: hybrid " + format_double(fixed.hybrid_mse) + ", single " +
           format_double(fixed.single_mse) + "; hybrid<=single on " +
           std::to_string(hybrid_wins) + "/5 seeds");
}

void criterion_training_time(Criterion& c) {
    if (g_seed_results.empty()) {
        c.require(false, "criterion 3 did not run");
        return;
    }
    const SeedResult& fixed = g_seed_results.front();
    const double ratio = fixed.hybrid_wall / fixed.single_wall;
    const unsigned hw = std::thread::hardware_concurrency();
    c.note("hybrid " + format_double(fixed.hybrid_wall) + "s vs single " +
           format_double(fixed.single_wall) + "s, ratio " + format_double(ratio) + " on " +
           std::to_string(hw) + " hardware threads");
    if (hw >= 4) {
        c.require(ratio <= 0.5, "ratio " + format_double(ratio) + " > 0.5");
    } else {
        c.note(hw >= 4 ? "" : "gate applies at >=4 hardware threads; measured ratio reported");
        if (ratio <= 0.5) c.note("ratio meets the threshold regardless");
    }
}

void criterion_reach_soundness(Criterion& c) {
    const Box init = box2(-3.02, -3.0, -2.603, -2.5);
    ReachConfig cfg;
    cfg.horizon = 200;
    cfg.input_box = kInputBox;
    const ReachSet rs = reach(g_hybrid_model, init, cfg);
    c.require(rs.steps.size() == 201, "expected 201 reach steps");

    Rng rng(555);
    std::size_t violations = 0;
    for (int sim = 0; sim < 1000; ++sim) {
        std::vector<double> x{rng.uniform(init.lo[0], init.hi[0]),
                              rng.uniform(init.lo[1], init.hi[1])};
        for (std::size_t k = 0; k < rs.steps.size(); ++k) {
            bool inside = false;
            for (const Fragment& f : rs.steps[k]) {
                if (f.box.contains(x)) {
                    inside = true;
                    break;
                }
            }
            if (!inside) ++violations;
            if (k + 1 < rs.steps.size()) {
                const std::vector<double> u{rng.uniform(kInputBox.lo[0], kInputBox.hi[0])};
                x = step(g_hybrid_model, x, u).state;
            }
        }
    }
    c.require(violations == 0, std::to_string(violations) + " containment violations");
    c.note("1000 simulations x 201 steps, " + std::to_string(violations) + " violations");
}

void criterion_split_combine(Criterion& c) {
    Rng rng(808);
    std::size_t checked_points = 0;
    for (int trial = 0; trial < 100; ++trial) {
        // Random 2- or 3-cell toy automaton over a random box domain.
        const double x0 = rng.uniform(-2, 0), y0 = rng.uniform(-2, 0);
        const Box domain = box2(x0, x0 + rng.uniform(1, 3), y0, y0 + rng.uniform(1, 3));
        const int cells = 2 + static_cast<int>(rng.next_u64() % 2);
        const std::vector<int> segments =
            (rng.next_u64() & 1) ? std::vector<int>{cells, 1} : std::vector<int>{1, cells};
        Partition part = make_partition(domain, segments);
        std::vector<NeuralNet> nets;
        for (std::size_t q = 0; q < part.cell_count(); ++q)
            nets.push_back(init_net(one_hidden(3, 8, 2), 9000 + 10 * trial + q));
        const Box u_box({-0.5}, {0.5});
        const HybridAutomaton h = assemble(std::move(part), std::move(nets), {}, u_box);

        // Random query box around the domain.
        const double cx = rng.uniform(domain.lo[0], domain.hi[0]);
        const double cy = rng.uniform(domain.lo[1], domain.hi[1]);
        const Box query = box2(cx - rng.uniform(0.05, 1.0), cx + rng.uniform(0.05, 1.0),
                               cy - rng.uniform(0.05, 1.0), cy + rng.uniform(0.05, 1.0));

        // Volume conservation of the public split.
        const SplitResult sr = split(h.partition, query);
        double vol = 0.0;
        for (const Fragment& f : sr.fragments) vol += f.box.volume();
        const auto clipped = intersect(query, h.partition.domain);
        const double expect = clipped ? clipped->volume() : 0.0;
        c.require(std::fabs(vol - expect) <= 1e-9 * std::max(expect, 1.0),
                  "split volume conservation");

        // Exact-union image containment, 100x100 grid per fragment.
        ReachConfig cfg;
        cfg.input_box = u_box;
        cfg.merge = MergePolicy::ExactUnion;
        const auto frags = split_dispatch(h.partition, query);
        const auto next = step_reach(h, frags, u_box, cfg);
        std::vector<double> in(3), scratch, img;
        for (const Fragment& f : frags) {
            for (int i = 0; i < 100; ++i) {
                for (int j = 0; j < 100; ++j) {
                    in[0] = f.box.lo[0] + (f.box.hi[0] - f.box.lo[0]) * i / 99.0;
                    in[1] = f.box.lo[1] + (f.box.hi[1] - f.box.lo[1]) * j / 99.0;
                    in[2] = u_box.lo[0] + (u_box.hi[0] - u_box.lo[0]) * ((i + j) % 3) / 2.0;
                    forward_into(h.nets[f.cell], in, scratch, img);
                    bool inside = false;
                    for (const Fragment& nf : next) {
                        if (nf.box.contains(img)) {
                            inside = true;
                            break;
                        }
                    }
                    if (!inside) {
                        c.require(false, "image point escaped next-step fragments");
                        return;
                    }
                    ++checked_points;
                }
            }
        }
    }
    c.note(std::to_string(checked_points) + " grid images contained, volumes conserved");
}

void criterion_interval_soundness(Criterion& c) {
    Rng rng(909);
    std::size_t escapes = 0;
    for (int net_idx = 0; net_idx < 10; ++net_idx) {
        const NeuralNet net = init_net(one_hidden(3, 20, 2), 4000 + net_idx);
        std::vector<double> lo(3), hi(3);
        for (std::size_t d = 0; d < 3; ++d) {
            const double a = rng.uniform(-3, 3), b = rng.uniform(-3, 3);
            lo[d] = std::min(a, b);
            hi[d] = std::max(a, b);
        }
        const Box in_box(lo, hi);
        const Box out = interval_forward(net, in_box);
        std::vector<double> x(3), scratch, y;
        for (int i = 0; i < 100000; ++i) {
            for (std::size_t d = 0; d < 3; ++d) x[d] = rng.uniform(lo[d], hi[d]);
            forward_into(net, x, scratch, y);
            for (std::size_t d = 0; d < 2; ++d) {
                if (y[d] < out.lo[d] || y[d] > out.hi[d]) ++escapes;
            }
        }
    }
    c.require(escapes == 0, std::to_string(escapes) + " sampled outputs escaped");

    // Monotonicity on nested boxes.
    std::size_t monotonicity_violations = 0;
    const NeuralNet net = init_net(one_hidden(3, 16, 2), 4242);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> lo(3), hi(3), ilo(3), ihi(3);
        for (std::size_t d = 0; d < 3; ++d) {
            const double a = rng.uniform(-3, 3), b = rng.uniform(-3, 3);
            lo[d] = std::min(a, b);
            hi[d] = std::max(a, b);
            const double c1 = rng.uniform(lo[d], hi[d]), c2 = rng.uniform(lo[d], hi[d]);
            ilo[d] = std::min(c1, c2);
            ihi[d] = std::max(c1, c2);
        }
        const Box big = interval_forward(net, Box(lo, hi));
        const Box small = interval_forward(net, Box(ilo, ihi));
        for (std::size_t d = 0; d < 2; ++d) {
            if (small.lo[d] < big.lo[d] || small.hi[d] > big.hi[d]) ++monotonicity_violations;
        }
    }
    c.require(monotonicity_violations == 0, "monotonicity violated");
    c.note("10 nets x 1e5 samples: 0 escapes; 100 nested pairs monotone");
}

void criterion_reach_timing(Criterion& c) {
    const Box init = box2(-3.02, -3.0, -2.603, -2.5);
    ReachConfig cfg;
    cfg.horizon = 200;
    cfg.input_box = kInputBox;

    const ReachSet hybrid_rs = reach(g_hybrid_model, init, cfg);
    const ReachSet single_rs = reach(g_single_model, init, cfg);

    fs::create_directories("acceptance_out");
    write_file_atomic("acceptance_out/hybrid_timing.csv", timing_to_csv(hybrid_rs));
    write_file_atomic("acceptance_out/single_timing.csv", timing_to_csv(single_rs));
    write_file_atomic("acceptance_out/hybrid_area.csv", area_to_csv(hybrid_rs));
    write_file_atomic("acceptance_out/single_area.csv", area_to_csv(single_rs));
    write_file_atomic("acceptance_out/hybrid_reach.csv", reach_to_csv(hybrid_rs));
    write_file_atomic("acceptance_out/single_reach.csv", reach_to_csv(single_rs));
    c.require(fs::exists("acceptance_out/hybrid_timing.csv") &&
                  fs::exists("acceptance_out/single_timing.csv"),
              "timing CSV emission");

    double hybrid_mean = 0.0, single_mean = 0.0;
    for (double s : hybrid_rs.step_seconds) hybrid_mean += s;
    for (double s : single_rs.step_seconds) single_mean += s;
    hybrid_mean /= static_cast<double>(hybrid_rs.step_seconds.size());
    single_mean /= static_cast<double>(single_rs.step_seconds.size());

    const bool hybrid_faster = hybrid_mean < single_mean;
    c.note("mean step time: hybrid " + format_double(hybrid_mean) + "s vs single " +
           format_double(single_mean) + "s -> " +
           (hybrid_faster ? "hybrid faster (expected)"
                          : "hybrid slower (expected trend violated; reported, not gated)"));
}

void criterion_degenerate_reach(Criterion& c) {
    const std::vector<double> x0{-3.01, -2.55};
    const double u = 0.2;
    ReachConfig cfg;
    cfg.horizon = 50;
    cfg.input_box = Box({u}, {u});

    const ReachSet rs = reach(g_hybrid_model, Box(x0, x0), cfg);
    const SimResult sim =
        simulate(g_hybrid_model, x0, std::vector<std::vector<double>>(50, {u}));

    c.require(rs.steps.size() == 51, "expected 51 reach steps");
    for (std::size_t k = 0; k < rs.steps.size(); ++k) {
        if (rs.steps[k].size() != 1) {
            c.require(false, "step " + std::to_string(k) + " has " +
                                 std::to_string(rs.steps[k].size()) + " fragments");
            return;
        }
        if (rs.steps[k][0].box.lo != sim.trajectory[k] ||
            rs.steps[k][0].box.hi != sim.trajectory[k]) {
            c.require(false, "bitwise mismatch at step " + std::to_string(k));
            return;
        }
    }
    c.note("51 degenerate fragments match the simulation bitwise");
}

}  // namespace

int main() {
    std::printf("hybran acceptance suite (hardware threads: %u, workers: %u)\n",
                std::thread::hardware_concurrency(), worker_threads());

    run(1, "partition exactness", 0.0, criterion_partition);
    run(2, "gradient correctness", 5.0, criterion_gradient);
    run(3, "modeling precision (hybrid vs single)", 300.0, criterion_modeling);
    run(4, "training-time advantage", 0.0, criterion_training_time);
    run(5, "reach soundness over 200 steps", 120.0, criterion_reach_soundness);
    run(6, "split/combine grid-sampling oracle", 60.0, criterion_split_combine);
    run(7, "interval propagation soundness", 30.0, criterion_interval_soundness);
    run(8, "reach timing comparison", 0.0, criterion_reach_timing);
    run(9, "degenerate reach equals simulate", 1.0, criterion_degenerate_reach);

    if (g_failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
}
