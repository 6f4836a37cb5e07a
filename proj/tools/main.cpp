#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli_util.hpp"
#include "hybran/automaton.hpp"
#include "hybran/dataset.hpp"
#include "hybran/errors.hpp"
#include "hybran/io.hpp"
#include "hybran/limit_cycle.hpp"
#include "hybran/reach.hpp"
#include "hybran/rng.hpp"
#include "hybran/threads.hpp"
#include "hybran/train.hpp"
#include "hybran/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hybran;
using cli::Manifest;

namespace {

const Box kDefaultDomain({-4.0, -std::numbers::pi}, {4.0, std::numbers::pi});

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --- gen-data ---------------------------------------------------------------

struct GenDataArgs {
    std::string system = "limit-cycle";
    int traces = 50;
    int steps = 150;
    std::uint64_t seed = 7;
    std::string init_box;
    double tau = 0.1;
    double omega = 2.0 * std::numbers::pi / 3.0;
    double mu = 0.2;
    double delta = 1.5;
    bool no_wrap = false;
    std::string out;
};

int cmd_gen_data(const GenDataArgs& args) {
    if (args.system != "limit-cycle")
        throw std::invalid_argument("unknown system '" + args.system +
                                    "' (available: limit-cycle)");
    const auto t0 = std::chrono::steady_clock::now();

    LimitCycleParams params;
    params.tau = args.tau;
    params.omega = args.omega;
    params.mu = args.mu;
    params.delta = args.delta;
    params.wrap_theta = !args.no_wrap;
    const Box init_box = args.init_box.empty() ? kDefaultDomain : cli::parse_box(args.init_box);

    const auto traces = generate_traces(params, args.traces, args.steps, init_box, args.seed);
    save_traces(args.out, traces);

    Manifest manifest;
    manifest.command = "gen-data";
    manifest.seed = args.seed;
    manifest.config = {{"system", args.system},
                       {"traces", args.traces},
                       {"steps", args.steps},
                       {"init_box", cli::default_box_text(init_box)},
                       {"tau", params.tau},
                       {"omega", params.omega},
                       {"mu", params.mu},
                       {"delta", params.delta},
                       {"wrap_theta", params.wrap_theta}};
    manifest.outputs = {args.out};
    manifest.timings = {{"total_seconds", seconds_since(t0)}};
    manifest.write(args.out + ".manifest.json");

    std::printf("wrote %d traces x %d steps to %s\n", args.traces, args.steps, args.out.c_str());
    return 0;
}

// --- train -------------------------------------------------------------------

struct TrainArgs {
    std::string traces;
    std::string domain;
    std::string segments = "4,3";
    std::string mode = "hybrid";
    int hidden = 0;  // 0 = per-mode default (20 hybrid, 200 single)
    std::string activation = "tanh";
    std::string optimizer = "lm";
    std::string init = "steep-mix";
    int epochs = 300;
    double lr = 1e-3;
    double final_lr = 0.0;
    int batch = 0;
    int restarts = 16;
    double restart_target = 0.12;
    double val_fraction = 0.2;
    double holdout = 0.2;
    std::uint64_t seed = 7;
    unsigned threads = 0;
    std::string input_box;
    std::string out;
    bool skip_serial_timing = false;
};

Box inferred_input_box(std::span<const Trace> traces) {
    const std::size_t nu = traces.front().input_dim();
    std::vector<double> lo(nu, 0.0), hi(nu, 0.0);
    bool first = true;
    for (const Trace& t : traces) {
        for (const auto& u : t.inputs) {
            for (std::size_t d = 0; d < nu; ++d) {
                if (first) {
                    lo[d] = hi[d] = u[d];
                } else {
                    lo[d] = std::min(lo[d], u[d]);
                    hi[d] = std::max(hi[d], u[d]);
                }
            }
            first = false;
        }
    }
    return Box(std::move(lo), std::move(hi));
}

int cmd_train(const TrainArgs& args) {
    const auto t0 = std::chrono::steady_clock::now();
    if (args.mode != "hybrid" && args.mode != "single")
        throw std::invalid_argument("mode must be hybrid or single");

    const auto all_traces = load_traces(args.traces);
    if (all_traces.empty()) throw std::invalid_argument("trace file has no traces");
    const TraceSplit split = split_holdout(all_traces, args.holdout);
    if (split.train.empty()) throw std::invalid_argument("holdout leaves no training traces");

    const Box domain = args.domain.empty() ? kDefaultDomain : cli::parse_box(args.domain);
    std::vector<int> segments;
    if (args.mode == "single") {
        segments.assign(domain.dim(), 1);
    } else {
        for (double v : cli::parse_vector(args.segments)) segments.push_back(static_cast<int>(v));
    }
    const Partition partition = make_partition(domain, segments);

    const std::size_t nx = split.train.front().state_dim();
    const std::size_t nu = split.train.front().input_dim();
    if (nx != domain.dim()) throw std::invalid_argument("trace dimension != domain dimension");
    const std::size_t hidden =
        args.hidden > 0 ? static_cast<std::size_t>(args.hidden) : (args.mode == "hybrid" ? 20 : 200);
    const Arch arch = one_hidden(nx + nu, hidden, nx, activation_from_string(args.activation));

    const auto datasets = segment(split.train, partition);
    const DatasetStats stats = dataset_stats(datasets);

    TrainConfig cfg;
    cfg.epochs = args.epochs;
    cfg.learning_rate = args.lr;
    cfg.final_learning_rate = args.final_lr;
    cfg.optimizer = optimizer_from_string(args.optimizer);
    cfg.batch = args.batch;
    cfg.seed = args.seed;
    cfg.init = init_scheme_from_string(args.init);
    cfg.restarts = args.restarts;
    cfg.restart_target = args.restart_target;
    cfg.validation_fraction = args.val_fraction;

    // Sparse-cell policy: cells with no pairs share one fallback network
    // trained on every pair with the same architecture.
    std::vector<CellDataset> effective = datasets;
    NeuralNet fallback;
    if (!stats.empty_cells.empty()) {
        CellDataset merged;
        merged.cell = partition.cell_count();  // distinct seed lane
        for (const auto& d : datasets)
            merged.pairs.insert(merged.pairs.end(), d.pairs.begin(), d.pairs.end());
        TrainConfig fb_cfg = cfg;
        fb_cfg.seed = cfg.seed ^ merged.cell;
        fallback = train(merged, arch, fb_cfg).net;
    }

    std::vector<CellDataset> trainable;
    for (const auto& d : effective)
        if (!d.empty()) trainable.push_back(d);

    const unsigned threads = args.threads == 0 ? worker_threads() : args.threads;
    double serial_seconds = 0.0;
    TrainAllResult parallel = train_all(trainable, arch, cfg, threads);
    if (!args.skip_serial_timing && threads > 1) {
        const TrainAllResult serial = train_all(trainable, arch, cfg, 1);
        serial_seconds = serial.wall_seconds;
        for (std::size_t i = 0; i < trainable.size(); ++i) {
            if (serial.nets[i].layers[0].w != parallel.nets[i].layers[0].w)
                throw std::runtime_error("serial/parallel training mismatch (determinism bug)");
        }
    } else {
        serial_seconds = parallel.wall_seconds;
    }

    // Reassemble the per-cell nets in cell order, substituting the fallback.
    std::vector<NeuralNet> nets(partition.cell_count());
    std::vector<double> losses(partition.cell_count(), 0.0);
    for (std::size_t i = 0; i < trainable.size(); ++i) {
        nets[trainable[i].cell] = std::move(parallel.nets[i]);
        losses[trainable[i].cell] = parallel.losses[i];
    }
    for (std::size_t q : stats.empty_cells) nets[q] = fallback;

    const Box input_box =
        args.input_box.empty() ? inferred_input_box(split.train) : cli::parse_box(args.input_box);
    HybridAutomaton model = assemble(partition, std::move(nets), split.train, input_box);

    ModelMeta meta;
    meta.seed = args.seed;
    meta.arch = arch.sizes;
    meta.trained_at = cli::timestamp_utc();
    meta.mode = args.mode;
    for (const auto& row : stats.rows)
        if (row.sparse) meta.sparse_cells.push_back(row.cell);
    meta.fallback_cells = stats.empty_cells;
    save_model(args.out, model, meta);

    // Run report: per-cell stats and losses plus wall-clock split.
    json report;
    report["mode"] = args.mode;
    report["cells"] = json::array();
    for (const auto& row : stats.rows) {
        report["cells"].push_back({{"cell", row.cell},
                                   {"pairs", row.pairs},
                                   {"sparse", row.sparse},
                                   {"loss", losses[row.cell]}});
    }
    report["train_traces"] = split.train.size();
    report["holdout_traces"] = split.test.size();
    report["fallback_cells"] = stats.empty_cells;
    report["wall_seconds_parallel"] = parallel.wall_seconds;
    report["wall_seconds_serial"] = serial_seconds;
    report["threads"] = threads;
    std::printf("%s\n", report.dump(2).c_str());

    Manifest manifest;
    manifest.command = "train";
    manifest.seed = args.seed;
    manifest.config = {{"traces", args.traces},
                       {"domain", cli::default_box_text(domain)},
                       {"segments", segments},
                       {"mode", args.mode},
                       {"hidden", hidden},
                       {"activation", args.activation},
                       {"optimizer", args.optimizer},
                       {"init", args.init},
                       {"epochs", args.epochs},
                       {"learning_rate", args.lr},
                       {"batch", args.batch},
                       {"restarts", args.restarts},
                       {"restart_target", args.restart_target},
                       {"validation_fraction", args.val_fraction},
                       {"holdout", args.holdout},
                       {"threads", threads},
                       {"input_box", cli::default_box_text(input_box)}};
    manifest.inputs = {args.traces};
    manifest.outputs = {args.out};
    manifest.timings = {{"total_seconds", seconds_since(t0)},
                        {"train_parallel_seconds", parallel.wall_seconds},
                        {"train_serial_seconds", serial_seconds}};
    manifest.write(args.out + ".manifest.json");
    return 0;
}

// --- eval --------------------------------------------------------------------

struct EvalArgs {
    std::string model;
    std::string traces;
    double holdout = 0.0;
    std::string out;
};

int cmd_eval(const EvalArgs& args) {
    const auto t0 = std::chrono::steady_clock::now();
    ModelMeta meta;
    const HybridAutomaton model = load_model(args.model, &meta);
    const auto all_traces = load_traces(args.traces);
    const TraceSplit split = split_holdout(all_traces, args.holdout);
    const auto& eval_traces = args.holdout > 0.0 ? split.test : all_traces;
    if (eval_traces.empty()) throw std::invalid_argument("no traces to evaluate");

    const MseReport report = evaluate_mse(model, eval_traces);

    json j;
    j["model"] = args.model;
    j["mode"] = meta.mode;
    j["mse"] = report.mse;
    j["predictions"] = report.predictions;
    j["per_cell"] = json::array();
    for (const auto& pc : report.per_cell)
        j["per_cell"].push_back({{"cell", pc.cell}, {"mse", pc.mse}, {"count", pc.count}});
    const std::string text = j.dump(2) + "\n";
    std::printf("%s", text.c_str());

    if (!args.out.empty()) {
        write_file_atomic(args.out, text);
        Manifest manifest;
        manifest.command = "eval";
        manifest.seed = meta.seed;
        manifest.config = {{"model", args.model},
                           {"traces", args.traces},
                           {"holdout", args.holdout}};
        manifest.inputs = {args.model, args.traces};
        manifest.outputs = {args.out};
        manifest.timings = {{"total_seconds", seconds_since(t0)}};
        manifest.write(args.out + ".manifest.json");
    }
    return 0;
}

// --- simulate ------------------------------------------------------------------

struct SimArgs {
    std::string model;
    std::string x0;
    int count = 1;
    int steps = 150;
    std::uint64_t seed = 7;
    std::string out;
};

int cmd_simulate(const SimArgs& args) {
    const auto t0 = std::chrono::steady_clock::now();
    ModelMeta meta;
    const HybridAutomaton model = load_model(args.model, &meta);
    if (args.count < 1 || args.steps < 0) throw std::invalid_argument("count/steps out of range");

    const std::size_t nx = model.state_dim();
    std::string csv = "sim_id,k";
    for (std::size_t d = 1; d <= nx; ++d) csv += ",x" + std::to_string(d);
    csv += ",cell,exterior\n";

    for (int sim_id = 0; sim_id < args.count; ++sim_id) {
        Rng rng(args.seed ^ static_cast<std::uint64_t>(sim_id));
        std::vector<double> x0;
        if (!args.x0.empty()) {
            x0 = cli::parse_vector(args.x0);
        } else {
            for (std::size_t d = 0; d < nx; ++d)
                x0.push_back(rng.uniform(model.partition.domain.lo[d],
                                         model.partition.domain.hi[d]));
        }
        std::vector<std::vector<double>> inputs(static_cast<std::size_t>(args.steps));
        for (auto& u : inputs) {
            u.resize(model.input_dim());
            for (std::size_t d = 0; d < u.size(); ++d)
                u[d] = rng.uniform(model.input_box.lo[d], model.input_box.hi[d]);
        }
        const SimResult sim = simulate(model, x0, inputs);
        for (std::size_t k = 0; k < sim.trajectory.size(); ++k) {
            csv += std::to_string(sim_id);
            csv += ',';
            csv += std::to_string(k);
            for (double v : sim.trajectory[k]) {
                csv += ',';
                csv += format_double(v);
            }
            csv += ',';
            csv += std::to_string(sim.cells[k]);
            const bool exterior =
                std::find(sim.exterior_events.begin(), sim.exterior_events.end(), k) !=
                sim.exterior_events.end();
            csv += exterior ? ",1\n" : ",0\n";
        }
    }
    write_file_atomic(args.out, csv);

    Manifest manifest;
    manifest.command = "simulate";
    manifest.seed = args.seed;
    manifest.config = {{"model", args.model},
                       {"x0", args.x0},
                       {"count", args.count},
                       {"steps", args.steps}};
    manifest.inputs = {args.model};
    manifest.outputs = {args.out};
    manifest.timings = {{"total_seconds", seconds_since(t0)}};
    manifest.write(args.out + ".manifest.json");
    std::printf("wrote %d simulation(s) of %d steps to %s\n", args.count, args.steps,
                args.out.c_str());
    return 0;
}

// --- reach ---------------------------------------------------------------------

struct ReachArgs {
    std::string model;
    std::string init_box;
    std::string input_box;
    int steps = 200;
    std::string merge = "per-cell-merge";
    std::size_t max_fragments = 4096;
    int overlay_sim = 0;
    std::uint64_t seed = 7;
    std::string out_prefix;
};

int cmd_reach(const ReachArgs& args) {
    const auto t0 = std::chrono::steady_clock::now();
    ModelMeta meta;
    const HybridAutomaton model = load_model(args.model, &meta);

    const Box init = cli::parse_box(args.init_box);
    const Box input_box =
        args.input_box.empty() ? model.input_box : cli::parse_box(args.input_box);

    ReachConfig cfg;
    cfg.horizon = args.steps;
    cfg.input_box = input_box;
    cfg.merge = merge_policy_from_string(args.merge);
    cfg.max_fragments = args.max_fragments;

    const ReachSet rs = reach(model, init, cfg);

    std::vector<std::vector<std::vector<double>>> overlays;
    for (int sim_id = 0; sim_id < args.overlay_sim; ++sim_id) {
        Rng rng(args.seed ^ static_cast<std::uint64_t>(sim_id));
        std::vector<double> x0(init.dim());
        for (std::size_t d = 0; d < x0.size(); ++d) x0[d] = rng.uniform(init.lo[d], init.hi[d]);
        std::vector<std::vector<double>> inputs(static_cast<std::size_t>(args.steps));
        for (auto& u : inputs) {
            u.resize(input_box.dim());
            for (std::size_t d = 0; d < u.size(); ++d)
                u[d] = rng.uniform(input_box.lo[d], input_box.hi[d]);
        }
        overlays.push_back(simulate(model, x0, inputs).trajectory);
    }

    const std::string reach_csv_path = args.out_prefix + "_reach.csv";
    const std::string timing_csv_path = args.out_prefix + "_timing.csv";
    const std::string area_csv_path = args.out_prefix + "_area.csv";
    const std::string svg_path = args.out_prefix + ".svg";
    write_file_atomic(reach_csv_path, reach_to_csv(rs));
    write_file_atomic(timing_csv_path, timing_to_csv(rs));
    write_file_atomic(area_csv_path, area_to_csv(rs));
    write_file_atomic(svg_path, cli::render_reach_svg(rs, overlays));

    std::size_t fragments = 0;
    double reach_seconds = 0.0, escaped = 0.0;
    for (const auto& step : rs.steps) fragments += step.size();
    for (double s : rs.step_seconds) reach_seconds += s;
    for (double v : rs.escaped_volume) escaped += v;

    Manifest manifest;
    manifest.command = "reach";
    manifest.seed = args.seed;
    manifest.config = {{"model", args.model},
                       {"init_box", cli::default_box_text(init)},
                       {"input_box", cli::default_box_text(input_box)},
                       {"steps", args.steps},
                       {"merge", args.merge},
                       {"max_fragments", args.max_fragments},
                       {"overlay_sim", args.overlay_sim}};
    manifest.inputs = {args.model};
    manifest.outputs = {reach_csv_path, timing_csv_path, area_csv_path, svg_path};
    manifest.timings = {{"total_seconds", seconds_since(t0)},
                        {"reach_seconds", reach_seconds}};
    manifest.write(args.out_prefix + ".manifest.json");

    std::printf("reach: %d steps, %zu fragments, %.4fs propagation, escaped volume %.3g\n",
                args.steps, fragments, reach_seconds, escaped);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hybran: grid-partitioned neural hybrid automata -- learning, simulation and "
                 "interval reachability"};
    app.require_subcommand(1);

    GenDataArgs gen;
    auto* gen_cmd = app.add_subcommand("gen-data", "Sample trajectories of a benchmark system");
    gen_cmd->add_option("--system", gen.system, "Benchmark system")->capture_default_str();
    gen_cmd->add_option("--traces", gen.traces, "Number of traces")->capture_default_str();
    gen_cmd->add_option("--steps", gen.steps, "Transitions per trace")->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed, "PRNG seed")->capture_default_str();
    gen_cmd->add_option("--init-box", gen.init_box,
                        "Initial-state box 'lo1,hi1;lo2,hi2' (default: state domain)");
    gen_cmd->add_option("--tau", gen.tau, "Step width")->capture_default_str();
    gen_cmd->add_option("--omega", gen.omega, "Angular velocity")->capture_default_str();
    gen_cmd->add_option("--mu", gen.mu, "Input mean")->capture_default_str();
    gen_cmd->add_option("--delta", gen.delta, "Input half-range")->capture_default_str();
    gen_cmd->add_flag("--no-wrap", gen.no_wrap, "Do not wrap the angle into (-pi, pi]");
    gen_cmd->add_option("--out", gen.out, "Output CSV path")->required();

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "Fit a hybrid automaton or a single-net model");
    train_cmd->add_option("--traces", train_args.traces, "Trace CSV")->required();
    train_cmd->add_option("--domain", train_args.domain,
                          "State domain box (default: [-4,4]x[-pi,pi])");
    train_cmd->add_option("--segments", train_args.segments, "Cells per dimension (hybrid mode)")
        ->capture_default_str();
    train_cmd->add_option("--mode", train_args.mode, "hybrid | single")->capture_default_str();
    train_cmd->add_option("--hidden", train_args.hidden,
                          "Hidden units (default: 20 hybrid, 200 single)");
    train_cmd->add_option("--activation", train_args.activation, "tanh | relu")
        ->capture_default_str();
    train_cmd->add_option("--optimizer", train_args.optimizer, "lm | adam | sgd")
        ->capture_default_str();
    train_cmd->add_option("--init", train_args.init, "xavier | nguyen-widrow | steep-mix")
        ->capture_default_str();
    train_cmd->add_option("--epochs", train_args.epochs, "Epochs (gd) or iteration cap (lm)")
        ->capture_default_str();
    train_cmd->add_option("--lr", train_args.lr, "Learning rate (adam/sgd)")
        ->capture_default_str();
    train_cmd->add_option("--final-lr", train_args.final_lr,
                          "Cosine-decay target learning rate (0 = constant)");
    train_cmd->add_option("--batch", train_args.batch, "Minibatch size (0 = full batch)")
        ->capture_default_str();
    train_cmd->add_option("--restarts", train_args.restarts, "Independent re-initializations")
        ->capture_default_str();
    train_cmd->add_option("--restart-target", train_args.restart_target,
                          "Stop restarting at this validation MSE")
        ->capture_default_str();
    train_cmd->add_option("--val-fraction", train_args.val_fraction,
                          "Held-out fraction for restart selection")
        ->capture_default_str();
    train_cmd->add_option("--holdout", train_args.holdout, "Trace-level holdout fraction")
        ->capture_default_str();
    train_cmd->add_option("--seed", train_args.seed, "PRNG seed")->capture_default_str();
    train_cmd->add_option("--threads", train_args.threads,
                          "Worker threads (0 = HYBRAN_THREADS or hardware)");
    train_cmd->add_option("--input-box", train_args.input_box,
                          "Admissible input box (default: inferred from data)");
    train_cmd->add_flag("--skip-serial-timing", train_args.skip_serial_timing,
                        "Skip the serial timing pass");
    train_cmd->add_option("--out", train_args.out, "Output model JSON")->required();

    EvalArgs eval_args;
    auto* eval_cmd = app.add_subcommand("eval", "One-step MSE of a model on traces");
    eval_cmd->add_option("--model", eval_args.model, "Model JSON")->required();
    eval_cmd->add_option("--traces", eval_args.traces, "Trace CSV")->required();
    eval_cmd->add_option("--holdout", eval_args.holdout,
                         "Evaluate only the holdout tail of the trace file (same split as train)")
        ->capture_default_str();
    eval_cmd->add_option("--out", eval_args.out, "Write the MSE report JSON here");

    SimArgs sim_args;
    auto* sim_cmd = app.add_subcommand("simulate", "Roll out model trajectories");
    sim_cmd->add_option("--model", sim_args.model, "Model JSON")->required();
    sim_cmd->add_option("--x0", sim_args.x0, "Initial state 'x1,x2' (default: random in domain)");
    sim_cmd->add_option("--count", sim_args.count, "Number of simulations")->capture_default_str();
    sim_cmd->add_option("--steps", sim_args.steps, "Steps per simulation")->capture_default_str();
    sim_cmd->add_option("--seed", sim_args.seed, "PRNG seed")->capture_default_str();
    sim_cmd->add_option("--out", sim_args.out, "Output CSV path")->required();

    ReachArgs reach_args;
    auto* reach_cmd = app.add_subcommand("reach", "Interval reachable sets via split-and-combine");
    reach_cmd->add_option("--model", reach_args.model, "Model JSON")->required();
    reach_cmd->add_option("--init-box", reach_args.init_box, "Initial set box")->required();
    reach_cmd->add_option("--input-box", reach_args.input_box,
                          "Input box (default: the model's input box)");
    reach_cmd->add_option("--steps", reach_args.steps, "Horizon")->capture_default_str();
    reach_cmd->add_option("--merge", reach_args.merge, "per-cell-merge | exact-union")
        ->capture_default_str();
    reach_cmd->add_option("--max-fragments", reach_args.max_fragments,
                          "Fragment cap for exact-union")
        ->capture_default_str();
    reach_cmd->add_option("--overlay-sim", reach_args.overlay_sim,
                          "Overlay N Monte Carlo trajectories in the SVG")
        ->capture_default_str();
    reach_cmd->add_option("--seed", reach_args.seed, "Seed for overlay simulations")
        ->capture_default_str();
    reach_cmd->add_option("--out-prefix", reach_args.out_prefix, "Output path prefix")->required();

    auto* version_cmd = app.add_subcommand("version", "Print version information");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (gen_cmd->parsed()) return cmd_gen_data(gen);
        if (train_cmd->parsed()) return cmd_train(train_args);
        if (eval_cmd->parsed()) return cmd_eval(eval_args);
        if (sim_cmd->parsed()) return cmd_simulate(sim_args);
        if (reach_cmd->parsed()) return cmd_reach(reach_args);
        if (version_cmd->parsed()) {
            std::printf("hybran %s (prng %s)\n", kVersion, kPrngId);
            return 0;
        }
    } catch (const IoError& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
