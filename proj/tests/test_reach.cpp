#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hybran/errors.hpp"
#include "hybran/limit_cycle.hpp"
#include "hybran/reach.hpp"
#include "hybran/rng.hpp"
#include "hybran/train.hpp"

using namespace hybran;

namespace {

Box box2(double lo1, double hi1, double lo2, double hi2) {
    return Box({lo1, lo2}, {hi1, hi2});
}

NeuralNet identity2() {
    NeuralNet net;
    net.layers.push_back({2, 2, {1, 0, 0, 1}, {0, 0}, Activation::Identity});
    return net;
}

// Random two-layer tanh net with the automaton's (state+input -> state) shape.
NeuralNet random_net(std::size_t in, std::size_t hidden, std::size_t out, std::uint64_t seed) {
    return init_net(one_hidden(in, hidden, out), seed);
}

HybridAutomaton toy_automaton(const Box& domain, const std::vector<int>& segments,
                              std::uint64_t seed, std::size_t input_dim = 1) {
    Partition p = make_partition(domain, segments);
    std::vector<NeuralNet> nets;
    for (std::size_t q = 0; q < p.cell_count(); ++q)
        nets.push_back(random_net(domain.dim() + input_dim, 8, domain.dim(), seed + q));
    std::vector<double> ulo(input_dim, -0.5), uhi(input_dim, 0.5);
    return assemble(std::move(p), std::move(nets), {}, Box(ulo, uhi));
}

}  // namespace

TEST_CASE("interval_forward: identity, point, sign-split") {
    const Box in = box2(0, 1, 0, 1);
    CHECK(interval_forward(identity2(), in) == in);

    // Degenerate box propagates to exactly the forward image.
    NeuralNet net = random_net(2, 8, 2, 5);
    const std::vector<double> x{0.3, -0.8};
    const Box point(x, x);
    const Box out = interval_forward(net, point);
    const auto fwd = forward(net, x);
    CHECK(out.lo == fwd);
    CHECK(out.hi == fwd);

    NeuralNet diff;
    diff.layers.push_back({2, 1, {1, -1}, {0}, Activation::Identity});
    const Box d = interval_forward(diff, box2(0, 1, 0, 1));
    CHECK(d.lo[0] == -1.0);
    CHECK(d.hi[0] == 1.0);

    CHECK_THROWS_AS(interval_forward(diff, Box({0}, {1})), std::invalid_argument);
}

TEST_CASE("interval_forward: sampled outputs never escape (soundness)") {
    Rng rng(31);
    for (int trial = 0; trial < 3; ++trial) {
        const NeuralNet net = random_net(3, 20, 2, 100 + trial);
        std::vector<double> lo(3), hi(3);
        for (std::size_t d = 0; d < 3; ++d) {
            const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
            lo[d] = std::min(a, b);
            hi[d] = std::max(a, b);
        }
        const Box in(lo, hi);
        const Box out = interval_forward(net, in);

        std::vector<double> x(3), scratch, y;
        for (int i = 0; i < 20000; ++i) {
            for (std::size_t d = 0; d < 3; ++d) x[d] = rng.uniform(lo[d], hi[d]);
            forward_into(net, x, scratch, y);
            for (std::size_t d = 0; d < 2; ++d) {
                CHECK(y[d] >= out.lo[d]);
                CHECK(y[d] <= out.hi[d]);
            }
        }
    }
}

TEST_CASE("interval_forward: monotone in box inclusion") {
    Rng rng(32);
    const NeuralNet net = random_net(2, 12, 2, 77);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> lo(2), hi(2);
        for (std::size_t d = 0; d < 2; ++d) {
            const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
            lo[d] = std::min(a, b);
            hi[d] = std::max(a, b);
        }
        const Box outer(lo, hi);
        std::vector<double> ilo(2), ihi(2);
        for (std::size_t d = 0; d < 2; ++d) {
            const double a = rng.uniform(lo[d], hi[d]), b = rng.uniform(lo[d], hi[d]);
            ilo[d] = std::min(a, b);
            ihi[d] = std::max(a, b);
        }
        const Box inner(ilo, ihi);
        const Box big = interval_forward(net, outer);
        const Box small = interval_forward(net, inner);
        for (std::size_t d = 0; d < 2; ++d) {
            CHECK(small.lo[d] >= big.lo[d]);
            CHECK(small.hi[d] <= big.hi[d]);
        }
    }
}

TEST_CASE("split: cell intersections, corner case from the 4x3 grid") {
    const Partition p = make_partition(box2(-4, 4, -3, 3), {4, 3});

    // Box inside one cell -> one fragment equal to the box.
    const SplitResult inside = split(p, box2(-3.5, -2.5, -2.5, -1.5));
    REQUIRE(inside.fragments.size() == 1);
    CHECK(inside.fragments[0].cell == 0);
    CHECK(inside.fragments[0].box == box2(-3.5, -2.5, -2.5, -1.5));
    CHECK(inside.clipped_volume == 0.0);

    // Box centred on a 4-corner junction -> 4 fragments.
    const SplitResult corner = split(p, box2(-0.5, 0.5, -1.5, -0.5));
    CHECK(corner.fragments.size() == 4);

    // Conservation: fragment volumes sum to vol(box ∩ domain).
    Rng rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = rng.uniform(-6, 6), b = rng.uniform(-6, 6);
        const double c = rng.uniform(-5, 5), d = rng.uniform(-5, 5);
        const Box box = box2(std::min(a, b), std::max(a, b), std::min(c, d), std::max(c, d));
        const SplitResult sr = split(p, box);
        double total = 0.0;
        for (const Fragment& f : sr.fragments) total += f.box.volume();
        const auto clipped = intersect(box, p.domain);
        const double expect = clipped ? clipped->volume() : 0.0;
        CHECK(total == doctest::Approx(expect).epsilon(1e-9));
        CHECK(sr.clipped_volume == doctest::Approx(box.volume() - expect).epsilon(1e-9));
    }
}

TEST_CASE("split_dispatch: exact cover including exterior mass") {
    const Partition p = make_partition(box2(0, 2, 0, 1), {2, 1});

    // A box poking out on all sides is covered without loss.
    const Box big = box2(-1, 3, -2, 4);
    const auto frags = split_dispatch(p, big);
    REQUIRE(frags.size() == 2);
    double total = 0.0;
    for (const Fragment& f : frags) total += f.box.volume();
    CHECK(total == doctest::Approx(big.volume()).epsilon(1e-12));
    CHECK(frags[0].cell == 0);
    CHECK(frags[1].cell == 1);
    // The dispatch boundary is the interior cut at x1 = 1.
    CHECK(frags[0].box == box2(-1, 1, -2, 4));
    CHECK(frags[1].box == box2(1, 3, -2, 4));

    // A degenerate box lands in exactly the cell locate() picks.
    for (double x : {0.3, 1.0, 1.7, 2.0}) {
        const Box pt({x, 0.5}, {x, 0.5});
        const auto single = split_dispatch(p, pt);
        REQUIRE(single.size() == 1);
        CHECK(single[0].cell == locate(p, std::vector<double>{x, 0.5}).cell);
        CHECK(single[0].box == pt);
    }

    // Dispatch pieces agree with locate() on random sample points.
    Rng rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const double a = rng.uniform(-1, 3), b = rng.uniform(-1, 3);
        const double c = rng.uniform(-1, 2), d = rng.uniform(-1, 2);
        const Box box = box2(std::min(a, b), std::max(a, b), std::min(c, d), std::max(c, d));
        const auto pieces = split_dispatch(p, box);
        for (int s = 0; s < 50; ++s) {
            const std::vector<double> x{rng.uniform(box.lo[0], box.hi[0]),
                                        rng.uniform(box.lo[1], box.hi[1])};
            const std::size_t cell = locate(p, x).cell;
            bool covered = false;
            for (const Fragment& f : pieces)
                if (f.cell == cell && f.box.contains(x)) covered = true;
            CHECK(covered);
        }
    }
}

TEST_CASE("step_reach: merge policies and the grid-sampling oracle") {
    const Box domain = box2(-1, 1, -1, 1);
    const HybridAutomaton h = toy_automaton(domain, {2, 1}, 50);
    const Box u_box({-0.5}, {0.5});

    ReachConfig cfg;
    cfg.input_box = u_box;

    // Two fragments landing in one cell merge to their bounding box.
    NeuralNet to_origin;
    to_origin.layers.push_back(
        {3, 2, {0.1, 0, 0, 0, 0.1, 0}, {0.3, 0.0}, Activation::Identity});
    HybridAutomaton contractive = h;
    contractive.nets = {to_origin, to_origin};
    const std::vector<Fragment> two{{0, box2(-1, -0.5, -1, 1)}, {1, box2(0.5, 1, -1, 1)}};
    const auto merged = step_reach(contractive, two, u_box, cfg);
    REQUIRE(merged.size() == 1);
    const auto exact_cfg = [&] {
        ReachConfig c = cfg;
        c.merge = MergePolicy::ExactUnion;
        return c;
    }();
    const auto kept = step_reach(contractive, two, u_box, exact_cfg);
    CHECK(kept.size() == 2);
    // Exact-union fragments are contained in the per-cell-merge fragment.
    for (const Fragment& f : kept) {
        for (std::size_t d = 0; d < 2; ++d) {
            CHECK(f.box.lo[d] >= merged[0].box.lo[d]);
            CHECK(f.box.hi[d] <= merged[0].box.hi[d]);
        }
    }

    // Oracle: push a dense grid of points through step(); every image must lie
    // in some next fragment.
    Rng rng(52);
    for (int trial = 0; trial < 5; ++trial) {
        const double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1);
        const double c = rng.uniform(-1, 1), d = rng.uniform(-1, 1);
        const Box start = box2(std::min(a, b), std::max(a, b), std::min(c, d), std::max(c, d));
        const auto frags = split_dispatch(h.partition, start);
        const auto next = step_reach(h, frags, u_box, exact_cfg);

        for (const Fragment& f : frags) {
            for (int i = 0; i <= 20; ++i) {
                for (int j = 0; j <= 20; ++j) {
                    std::vector<double> x{
                        f.box.lo[0] + (f.box.hi[0] - f.box.lo[0]) * i / 20.0,
                        f.box.lo[1] + (f.box.hi[1] - f.box.lo[1]) * j / 20.0};
                    for (double uu : {-0.5, 0.0, 0.5}) {
                        const auto img = forward(h.nets[f.cell],
                                                 std::vector<double>{x[0], x[1], uu});
                        bool inside = false;
                        for (const Fragment& nf : next)
                            if (nf.box.contains(img)) inside = true;
                        CHECK(inside);
                    }
                }
            }
        }
    }

    CHECK_THROWS_AS(step_reach(h, {}, u_box, cfg), std::invalid_argument);
}

TEST_CASE("step_reach: exact-union overflow reports the cap") {
    const Box domain = box2(-1, 1, -1, 1);
    HybridAutomaton h = toy_automaton(domain, {3, 3}, 60);
    ReachConfig cfg;
    cfg.input_box = h.input_box;
    cfg.merge = MergePolicy::ExactUnion;
    cfg.max_fragments = 2;

    // A full-domain box splits into 9 fragments whose images overflow cap 2.
    const auto frags = split_dispatch(h.partition, domain);
    REQUIRE(frags.size() == 9);
    CHECK_THROWS_AS(step_reach(h, frags, h.input_box, cfg), FragmentOverflowError);
}

TEST_CASE("reach: horizon 0, step bookkeeping, determinism") {
    const Box domain = box2(-1, 1, -1, 1);
    const HybridAutomaton h = toy_automaton(domain, {2, 2}, 70);

    ReachConfig cfg;
    cfg.horizon = 0;
    cfg.input_box = h.input_box;
    const ReachSet rs0 = reach(h, box2(-0.3, 0.3, -0.3, 0.3), cfg);
    CHECK(rs0.steps.size() == 1);
    CHECK(rs0.step_seconds.size() == 1);
    CHECK(rs0.escaped_volume[0] == 0.0);

    cfg.horizon = 10;
    const ReachSet rs = reach(h, box2(-0.3, 0.3, -0.3, 0.3), cfg);
    CHECK(rs.steps.size() == 11);
    for (const auto& step_frags : rs.steps) CHECK_FALSE(step_frags.empty());

    const ReachSet again = reach(h, box2(-0.3, 0.3, -0.3, 0.3), cfg);
    for (std::size_t k = 0; k < rs.steps.size(); ++k) {
        REQUIRE(again.steps[k].size() == rs.steps[k].size());
        for (std::size_t i = 0; i < rs.steps[k].size(); ++i) {
            CHECK(again.steps[k][i].cell == rs.steps[k][i].cell);
            CHECK(again.steps[k][i].box == rs.steps[k][i].box);
        }
    }
}

TEST_CASE("reach: Monte Carlo containment on a toy automaton") {
    const Box domain = box2(-1, 1, -1, 1);
    const HybridAutomaton h = toy_automaton(domain, {2, 2}, 80);
    const Box init = box2(-0.2, 0.2, -0.2, 0.2);

    ReachConfig cfg;
    cfg.horizon = 40;
    cfg.input_box = h.input_box;
    const ReachSet rs = reach(h, init, cfg);

    Rng rng(81);
    for (int sim = 0; sim < 200; ++sim) {
        std::vector<double> x{rng.uniform(init.lo[0], init.hi[0]),
                              rng.uniform(init.lo[1], init.hi[1])};
        for (std::size_t k = 0; k < rs.steps.size(); ++k) {
            bool inside = false;
            for (const Fragment& f : rs.steps[k])
                if (f.box.contains(x)) inside = true;
            REQUIRE(inside);
            if (k + 1 < rs.steps.size()) {
                const std::vector<double> u{
                    rng.uniform(cfg.input_box.lo[0], cfg.input_box.hi[0])};
                x = step(h, x, u).state;
            }
        }
    }
}

TEST_CASE("reach degenerate: point init and point input reproduce simulate") {
    const Box domain = box2(-1, 1, -1, 1);
    const HybridAutomaton h = toy_automaton(domain, {2, 2}, 90);

    const std::vector<double> x0{0.17, -0.42};
    const double u = 0.23;
    ReachConfig cfg;
    cfg.horizon = 50;
    cfg.input_box = Box({u}, {u});

    const ReachSet rs = reach(h, Box(x0, x0), cfg);
    const SimResult sim = simulate(h, x0, std::vector<std::vector<double>>(50, {u}));

    REQUIRE(rs.steps.size() == 51);
    for (std::size_t k = 0; k < rs.steps.size(); ++k) {
        REQUIRE(rs.steps[k].size() == 1);
        CHECK(rs.steps[k][0].box.lo == sim.trajectory[k]);
        CHECK(rs.steps[k][0].box.hi == sim.trajectory[k]);
    }
}

TEST_CASE("reach_single: identity net and one-cell equivalence") {
    const Box domain = box2(-2, 2, -2, 2);
    // Identity on the state, ignoring the input column.
    NeuralNet net;
    net.layers.push_back({3, 2, {1, 0, 0, 0, 1, 0}, {0, 0}, Activation::Identity});

    const Box init = box2(-0.5, 0.5, -0.5, 0.5);
    const Box u_box({-1.0}, {1.0});
    const ReachSet rs = reach_single(net, domain, init, u_box, 3);
    REQUIRE(rs.steps.size() == 4);
    for (const auto& frags : rs.steps) {
        REQUIRE(frags.size() == 1);
        CHECK(frags[0].box == init);
    }

    // Definitional equivalence with reach() on a 1-segment partition.
    HybridAutomaton h;
    h.partition = make_partition(domain, {1, 1});
    h.nets = {net};
    h.input_box = u_box;
    ReachConfig cfg;
    cfg.horizon = 3;
    cfg.input_box = u_box;
    const ReachSet direct = reach(h, init, cfg);
    for (std::size_t k = 0; k < rs.steps.size(); ++k) {
        CHECK(rs.steps[k][0].box == direct.steps[k][0].box);
        CHECK(rs.steps[k][0].cell == direct.steps[k][0].cell);
    }
}

TEST_CASE("reach: escaped volume is logged when images leave the domain") {
    const Box domain = box2(-1, 1, -1, 1);
    // Expanding map: x' = 2x (ignores input).
    NeuralNet doubling;
    doubling.layers.push_back({3, 2, {2, 0, 0, 0, 2, 0}, {0, 0}, Activation::Identity});
    HybridAutomaton h;
    h.partition = make_partition(domain, {1, 1});
    h.nets = {doubling};
    h.input_box = Box({0.0}, {0.0});

    ReachConfig cfg;
    cfg.horizon = 2;
    cfg.input_box = h.input_box;
    const ReachSet rs = reach(h, box2(-0.9, 0.9, -0.9, 0.9), cfg);
    CHECK(rs.escaped_volume[1] > 0.0);
    // The escaping mass is still covered: fragment union equals the image.
    double vol = 0.0;
    for (const Fragment& f : rs.steps[1]) vol += f.box.volume();
    CHECK(vol == doctest::Approx(3.6 * 3.6).epsilon(1e-9));
}

TEST_CASE("interval_forward: relu nets are sound too") {
    Rng rng(99);
    Arch arch{{2, 10, 2}, {Activation::Relu, Activation::Identity}};
    for (int trial = 0; trial < 3; ++trial) {
        const NeuralNet net = init_net(arch, 500 + trial);
        const Box in = box2(rng.uniform(-2, 0), rng.uniform(0, 2), rng.uniform(-2, 0),
                            rng.uniform(0, 2));
        const Box out = interval_forward(net, in);
        std::vector<double> x(2), scratch, y;
        for (int i = 0; i < 5000; ++i) {
            x[0] = rng.uniform(in.lo[0], in.hi[0]);
            x[1] = rng.uniform(in.lo[1], in.hi[1]);
            forward_into(net, x, scratch, y);
            for (std::size_t d = 0; d < 2; ++d) {
                CHECK(y[d] >= out.lo[d]);
                CHECK(y[d] <= out.hi[d]);
            }
        }
    }
}
