#include "tenkontract/cli.hpp"

#include "tenkontract/circuit.hpp"
#include "tenkontract/engine.hpp"
#include "tenkontract/error.hpp"
#include "tenkontract/oracle.hpp"
#include "tenkontract/order_file.hpp"
#include "tenkontract/schedule.hpp"
#include "tenkontract/slicer.hpp"
#include "tenkontract/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <random>
#include <regex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

namespace tenkontract::cli {

namespace {

std::uint64_t default_seed() {
    if (const char* env = std::getenv("TENKONTRACT_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw ValidationError(std::string("TENKONTRACT_SEED is not an integer: ") + env);
        }
    }
    return 0;
}

int default_workers() { return static_cast<int>(std::max(1U, std::thread::hardware_concurrency())); }

double parse_bytes(const std::string& text) {
    static const std::regex pattern(R"(\s*([0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)\s*([KMGT]i?B?|B)?\s*)",
                                    std::regex::icase);
    std::smatch m;
    if (!std::regex_match(text, m, pattern)) throw ValidationError("cannot parse memory size '" + text + "'");
    double value = std::stod(m[1].str());
    std::string unit = m[2].str();
    std::transform(unit.begin(), unit.end(), unit.begin(), [](unsigned char c) { return std::toupper(c); });
    if (!unit.empty() && unit != "B") {
        const bool binary = unit.size() >= 2 && unit[1] == 'I';
        const double base = binary ? 1024.0 : 1000.0;
        const int power = std::string("KMGT").find(unit[0]) + 1;
        value *= std::pow(base, power);
    }
    return value;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        write_text_file(path, text);
    }
}

struct StateArgs {
    std::string bitstrings;
    std::string amplitude;
    bool full = false;
};

void add_state_options(CLI::App* cmd, StateArgs& s) {
    auto* b = cmd->add_option("--bitstrings", s.bitstrings, "File of sampled bitstrings (sparse state)");
    auto* a = cmd->add_option("--amplitude", s.amplitude, "Single output bitstring");
    auto* f = cmd->add_flag("--full", s.full, "All 2^n amplitudes");
    b->excludes(a)->excludes(f);
    a->excludes(f);
}

struct LoadedState {
    SparseState state;
    std::vector<Bits> samples;  // file order with repeats; empty for Full
};

LoadedState load_state(const StateArgs& s, int n_qubits) {
    if (!s.bitstrings.empty()) {
        int n = n_qubits;
        auto samples = load_bitstrings(s.bitstrings, n);
        return {SparseState::sparse(n_qubits, samples), samples};
    }
    if (!s.amplitude.empty()) {
        const Bits b = parse_bitstring(s.amplitude, n_qubits);
        return {SparseState::single(n_qubits, b), {b}};
    }
    return {SparseState::full(n_qubits), {}};
}

struct Context {
    Circuit circuit{1};
    LoadedState state{SparseState::full(1), {}};
    TensorNetwork net;
    std::shared_ptr<const ConfigTableCache> configs;
    std::shared_ptr<const NetworkShape> shape;
};

Context build_context(const std::string& circuit_path, const StateArgs& s) {
    Context c;
    c.circuit = load_circuit(circuit_path);
    c.state = load_state(s, c.circuit.n_qubits());
    c.net = circuit_to_network(c.circuit, c.state.state);
    c.configs = std::make_shared<const ConfigTableCache>(c.state.state);
    c.shape = std::make_shared<const NetworkShape>(c.net, c.configs);
    return c;
}

// ---------------------------------------------------------------------------

struct GenArgs {
    int qubits = 0;
    int rows = 0;
    int cols = 0;
    int cycles = 8;
    std::string patterns = "ABCD";
    double theta = GeneratorOptions{}.fsim_theta;
    double phi = GeneratorOptions{}.fsim_phi;
    bool allow_repeats = false;
    std::uint64_t seed = 0;
    std::string output;
};

int cmd_gen(const GenArgs& a) {
    int rows = a.rows;
    int cols = a.cols;
    if (rows == 0 && cols == 0) {
        if (a.qubits <= 0) throw ValidationError("give --qubits or --rows/--cols");
        rows = 1;
        cols = a.qubits;
        for (int r = static_cast<int>(std::sqrt(a.qubits)); r >= 1; --r) {
            if (a.qubits % r == 0) {
                rows = r;
                cols = a.qubits / r;
                break;
            }
        }
    }
    if (a.qubits > 0 && a.qubits != rows * cols) throw ValidationError("--qubits disagrees with --rows x --cols");
    const auto grid = grid_patterns(rows, cols);
    std::vector<CouplerPattern> patterns;
    for (char ch : a.patterns) {
        const int idx = std::toupper(static_cast<unsigned char>(ch)) - 'A';
        if (idx < 0 || idx >= 4) throw ValidationError("pattern letters must be A-D");
        // Degenerate grids have fewer than four patterns; wrap around.
        patterns.push_back(grid[static_cast<std::size_t>(idx) % grid.size()]);
    }
    GeneratorOptions opts;
    opts.fsim_theta = a.theta;
    opts.fsim_phi = a.phi;
    opts.avoid_repeats = !a.allow_repeats;
    const Circuit c = generate_random_circuit(rows * cols, a.cycles, patterns, a.seed, opts);
    const bool json = a.output.size() >= 5 && a.output.substr(a.output.size() - 5) == ".json";
    emit(a.output, json ? circuit_to_json(c).dump(2) + "\n" : serialize_circuit(c));
    return kOk;
}

struct PathArgs {
    std::string circuit;
    StateArgs state;
    double alpha = ScoreParams{}.alpha;
    double beta = ScoreParams{}.beta;
    int sweeps = AnnealSchedule{}.sweeps;
    double t0 = AnnealSchedule{}.t0;
    double tmin = AnnealSchedule{}.tmin;
    double decay = AnnealSchedule{}.decay;
    std::uint64_t seed = 0;
    std::string mem_budget;
    int finetune = DynamicSliceOptions{}.finetune_sweeps;
    bool balance = false;
    double balance_weight = BalancePenalty{}.weight;
    int restarts = 1;
    int workers = 1;
    std::size_t reorder = 0;
    std::string output;
};

int cmd_pathfind(const PathArgs& a) {
    const Context ctx = build_context(a.circuit, a.state);
    ScoreParams params;
    params.alpha = a.alpha;
    params.beta = a.beta;
    params.balance.enabled = a.balance;
    params.balance.weight = a.balance_weight;
    const AnnealSchedule schedule{a.t0, a.tmin, a.decay, a.sweeps};
    ContractionTree tree = sa_optimize_restarts(ctx.shape, params, schedule, a.seed, a.restarts, a.workers);
    SliceSet slices;
    if (!a.mem_budget.empty()) {
        DynamicSliceOptions opts;
        opts.mem_budget = parse_bytes(a.mem_budget);
        opts.finetune_sweeps = a.finetune;
        opts.params = params;
        opts.seed = a.seed;
        auto res = dynamic_slice(ctx.net, tree, opts);
        tree = std::move(res.tree);
        slices = std::move(res.slices);
    }
    if (a.reorder > 0) tree = reorder_topk(tree, std::min(a.reorder, tree.step_count())).tree;
    emit(a.output, order_to_json(tree, slices, params).dump(2) + "\n");
    return kOk;
}

struct ContractArgs {
    std::string circuit;
    std::string order;
    StateArgs state;
    std::string precision = "fp64";
    int split = 1;
    std::string accum;
    int mixed_topk = -1;
    std::string low = "tf32";
    int low_split = 1;
    std::string schedule;
    bool rescale = false;
    int workers = 0;
    std::string flop_report;
    std::string output;
};

int cmd_contract(const ContractArgs& a) {
    const Context ctx = build_context(a.circuit, a.state);
    auto loaded = order_from_json(read_json_file(a.order), ctx.net, ctx.configs);
    PrecisionSchedule schedule;
    if (!a.schedule.empty()) {
        schedule = schedule_from_json(read_json_file(a.schedule));
    } else {
        const PrecisionSetting high{format_by_name(a.precision), split_mode_from_int(a.split)};
        if (a.mixed_topk >= 0) {
            const PrecisionSetting low{format_by_name(a.low), split_mode_from_int(a.low_split)};
            auto mixed = schedule_from_topk(loaded.tree, static_cast<std::size_t>(a.mixed_topk), low, high);
            schedule = mixed.schedule;
            std::cerr << "replaced T_cc ratio: " << mixed.replaced_tcc_ratio << "\n";
        } else {
            schedule = PrecisionSchedule::uniform(high.format, high.mode);
        }
    }
    if (!a.accum.empty()) schedule.set_accumulation(format_by_name(a.accum));
    if (a.rescale) schedule.rescale = true;
    std::vector<StepTiming> timings;
    RunOptions run;
    run.workers = a.workers > 0 ? a.workers : default_workers();
    if (!a.flop_report.empty()) run.timings = &timings;
    AmplitudeSet amps = run_simulation(ctx.circuit, ctx.state.state, loaded.tree, loaded.slices, schedule, run);
    if (!ctx.state.samples.empty()) amps = amps.expand(ctx.state.samples);
    emit(a.output, format_amplitudes(amps));
    if (!a.flop_report.empty()) emit(a.flop_report, flop_report(timings).dump(2) + "\n");
    return kOk;
}

struct VerifyArgs {
    std::string amplitudes;
    std::string reference;
    std::string format = "json";
    std::size_t bins = HistogramOptions{}.bins;
    std::string output;
};

int cmd_verify(const VerifyArgs& a) {
    const AmplitudeSet amps = load_amplitudes(a.amplitudes);
    std::optional<AmplitudeSet> ref;
    if (!a.reference.empty()) ref = load_amplitudes(a.reference);
    HistogramOptions opts;
    opts.bins = a.bins;
    const auto report = make_report(amps, ref ? &*ref : nullptr, opts);
    emit(a.output, a.format == "csv" ? report_to_csv(report) : report_to_json(report).dump(2) + "\n");
    return kOk;
}

struct OracleArgs {
    std::string circuit;
    std::string bitstrings;
    std::size_t samples = 0;
    double fidelity = 1.0;
    std::uint64_t seed = 0;
    std::string output;
};

int cmd_oracle(const OracleArgs& a) {
    const Circuit c = load_circuit(a.circuit);
    if (!a.bitstrings.empty()) {
        int n = c.n_qubits();
        emit(a.output, format_amplitudes(amplitudes_for(c, load_bitstrings(a.bitstrings, n))));
        return kOk;
    }
    if (a.samples == 0) throw ValidationError("give --bitstrings or --samples");
    std::string text;
    for (Bits b : sample(c, a.samples, a.fidelity, a.seed)) text += format_bitstring(b, c.n_qubits()) + "\n";
    emit(a.output, text);
    return kOk;
}

struct BenchArgs {
    int qubits = 10;
    int cycles = 12;
    std::size_t topk = 10;
    int sweeps = 20;
    int repeat = 3;
    std::size_t gemm_size = 64;
    std::uint64_t seed = 0;
    std::string output;
};

ComplexTensor random_tensor(const std::vector<Label>& labels, const EinsumSpec& spec, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    std::vector<std::size_t> dims;
    for (Label l : labels) dims.push_back(spec.dim(l));
    ComplexTensor t = ComplexTensor::zeros(labels, dims);
    for (auto& z : t.data()) z = {normal(rng), normal(rng)};
    return t;
}

double time_step(const EinsumSpec& spec, int repeat, std::mt19937_64& rng) {
    const auto a = random_tensor(spec.lhs, spec, rng);
    const auto b = random_tensor(spec.rhs, spec, rng);
    const StepPrecision prec{PrecisionSetting{formats::fp32(), SplitMode::Single}, formats::fp32()};
    double best = 1e300;
    for (int r = 0; r < repeat; ++r) {
        const auto start = std::chrono::steady_clock::now();
        (void)execute_step(a, b, spec, prec);
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    return best;
}

int cmd_bench(const BenchArgs& a) {
    std::mt19937_64 rng(a.seed);
    nlohmann::json report;
    {
        const std::size_t s = a.gemm_size;
        EinsumSpec gemm;
        gemm.lhs = {0, 1};
        gemm.rhs = {1, 2};
        gemm.out = {0, 2};
        gemm.dims = {{0, s}, {1, s}, {2, s}};
        EinsumSpec strided = gemm;
        strided.lhs = {1, 0};
        strided.out = {2, 0};
        strided.rhs = {2, 1};
        const double t_gemm = time_step(gemm, a.repeat, rng);
        const double t_ttgt = time_step(strided, a.repeat, rng);
        report["synthetic"] = {{"size", s}, {"gemm_seconds", t_gemm}, {"einsum_seconds", t_ttgt}};
    }
    int rows = 1;
    for (int r = static_cast<int>(std::sqrt(a.qubits)); r >= 1; --r) {
        if (a.qubits % r == 0) {
            rows = r;
            break;
        }
    }
    const Circuit circuit = generate_random_circuit(a.qubits, a.cycles, grid_patterns(rows, a.qubits / rows), a.seed);
    const auto state = SparseState::full(a.qubits);
    const TensorNetwork net = circuit_to_network(circuit, state);
    auto shape = std::make_shared<const NetworkShape>(net, std::make_shared<const ConfigTableCache>(state));
    const ContractionTree tree = sa_optimize(shape, ScoreParams{}, AnnealSchedule{2.0, 0.02, 0.98, a.sweeps}, a.seed);
    const auto reordered = reorder_topk(tree, std::min(a.topk, tree.step_count()));
    const ExecutionPlan before(tree);
    const ExecutionPlan after(reordered.tree);
    const auto ranked = rank_steps_by_cost(tree);
    nlohmann::json rows_json = nlohmann::json::array();
    for (std::size_t i = 0; i < std::min(a.topk, ranked.size()); ++i) {
        const std::size_t step = static_cast<std::size_t>(ranked[i]) - tree.leaf_count();
        const auto& sb = before.steps()[step];
        const auto& sa = after.steps()[step];
        const double tb = time_step(sb.spec, a.repeat, rng);
        const double ta = time_step(sa.spec, a.repeat, rng);
        rows_json.push_back({{"rank", i + 1},
                             {"step", step},
                             {"Tcc", tree.node_cost(ranked[i]).tcc},
                             {"before", sb.spec.to_string()},
                             {"after", sa.spec.to_string()},
                             {"formable_before", is_formable(sb.gemm)},
                             {"formable_after", is_formable(sa.gemm)},
                             {"seconds_before", tb},
                             {"seconds_after", ta},
                             {"speedup", ta > 0.0 ? tb / ta : 0.0}});
    }
    report["topk"] = rows_json;
    emit(a.output, report.dump(2) + "\n");
    return kOk;
}

struct PrecisionBenchArgs {
    std::size_t length = 1024;
    std::size_t trials = 1000;
    double lo = 1e-7;
    double hi = 1e3;
    std::uint64_t seed = 0;
    std::string output;
};

int cmd_precision_bench(const PrecisionBenchArgs& a) {
    if (!(a.lo > 0.0 && a.hi > a.lo)) throw ValidationError("need 0 < --lo < --hi");
    const std::vector<std::pair<std::string, PrecisionSetting>> settings = {
        {"fp32", {formats::fp32(), SplitMode::Single}}, {"1xtf32", {formats::tf32(), SplitMode::Single}},
        {"3xbf16", {formats::bf16(), SplitMode::Triple}}, {"3xtf32", {formats::tf32(), SplitMode::Triple}},
        {"3xfp16", {formats::fp16(), SplitMode::Triple}}};
    std::mt19937_64 rng(a.seed);
    std::uniform_real_distribution<double> expo(std::log(a.lo), std::log(a.hi));
    std::map<std::string, std::vector<double>> errors;
    std::vector<double> x(a.length), y(a.length);
    for (std::size_t t = 0; t < a.trials; ++t) {
        double ref = 0.0;
        for (std::size_t i = 0; i < a.length; ++i) {
            x[i] = quantize(std::exp(expo(rng)), formats::fp32());
            y[i] = quantize(std::exp(expo(rng)), formats::fp32());
            ref += x[i] * y[i];
        }
        for (const auto& [name, s] : settings) {
            const double v = mac_dot(x, y, s.format, s.mode, formats::fp32());
            errors[name].push_back(std::fabs(v - ref) / std::fabs(ref));
        }
    }
    std::ostringstream out;
    out.precision(6);
    out << "setting,median_rel_error,mean_rel_error\n";
    for (const auto& [name, s] : settings) {
        auto& e = errors[name];
        double mean = 0.0;
        for (double v : e) mean += v;
        mean /= static_cast<double>(e.size());
        std::nth_element(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(e.size() / 2), e.end());
        out << name << ',' << e[e.size() / 2] << ',' << mean << '\n';
    }
    emit(a.output, out.str());
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& argv) {
    CLI::App app{"Tensor-network simulator for random quantum circuits", "tenkontract"};
    app.set_config("--config", "", "key = value configuration file");
    app.require_subcommand(1);
    std::uint64_t seed = 0;
    try {
        seed = default_seed();
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }

    GenArgs gen;
    gen.seed = seed;
    auto* g = app.add_subcommand("gen-circuit", "Generate a random grid circuit");
    g->add_option("--qubits,-n", gen.qubits, "Qubit count (grid chosen as square as possible)");
    g->add_option("--rows", gen.rows, "Grid rows");
    g->add_option("--cols", gen.cols, "Grid columns");
    g->add_option("--cycles,-m", gen.cycles, "Cycle count")->check(CLI::NonNegativeNumber);
    g->add_option("--patterns", gen.patterns, "Coupler pattern sequence over A-D");
    g->add_option("--theta", gen.theta, "fsim theta");
    g->add_option("--phi", gen.phi, "fsim phi");
    g->add_flag("--allow-repeats", gen.allow_repeats, "Allow repeating a qubit's previous single-qubit gate");
    g->add_option("--seed", gen.seed, "Random seed");
    g->add_option("--output,-o", gen.output, "Output file (.json for JSON), default stdout");

    PathArgs path;
    path.seed = seed;
    auto* p = app.add_subcommand("pathfind", "Search a contraction order and slice it to a memory budget");
    p->add_option("circuit", path.circuit, "Circuit file")->required();
    add_state_options(p, path.state);
    p->add_option("--alpha", path.alpha, "Memory weight in the score")->check(CLI::NonNegativeNumber);
    p->add_option("--beta", path.beta, "Largest-tensor weight in the score")->check(CLI::NonNegativeNumber);
    p->add_option("--sweeps", path.sweeps, "Annealing sweeps")->check(CLI::NonNegativeNumber);
    p->add_option("--t0", path.t0, "Initial temperature");
    p->add_option("--tmin", path.tmin, "Minimum temperature");
    p->add_option("--decay", path.decay, "Geometric temperature decay per sweep");
    p->add_option("--seed", path.seed, "Random seed");
    p->add_option("--mem-budget", path.mem_budget, "Peak memory budget, e.g. 4GiB");
    p->add_option("--finetune-sweeps", path.finetune, "Sweeps after each slice")->check(CLI::NonNegativeNumber);
    p->add_flag("--balance", path.balance, "Penalize unbalanced GEMM shapes");
    p->add_option("--balance-weight", path.balance_weight, "Weight of the balance penalty");
    p->add_option("--restarts", path.restarts, "Independent annealing chains")->check(CLI::PositiveNumber);
    p->add_option("--workers", path.workers, "Threads for restarts")->check(CLI::PositiveNumber);
    p->add_option("--reorder-topk", path.reorder, "Reorder indices of the k costliest steps");
    p->add_option("--output,-o", path.output, "Order file, default stdout");

    ContractArgs con;
    auto* c = app.add_subcommand("contract", "Contract a circuit along an order file");
    c->add_option("circuit", con.circuit, "Circuit file")->required();
    c->add_option("--order", con.order, "Order file from pathfind")->required();
    add_state_options(c, con.state);
    c->add_option("--precision", con.precision, "fp64|fp32|tf32|fp16|bf16");
    c->add_option("--split", con.split, "1 or 3")->check(CLI::IsMember({1, 3}));
    c->add_option("--accum", con.accum, "Accumulation format override");
    c->add_option("--mixed-topk", con.mixed_topk, "Run the k costliest steps at --low");
    c->add_option("--low", con.low, "Low-precision format for --mixed-topk");
    c->add_option("--low-split", con.low_split, "Split factor for --low")->check(CLI::IsMember({1, 3}));
    c->add_option("--schedule", con.schedule, "Precision schedule JSON");
    c->add_flag("--rescale", con.rescale, "Power-of-two rescaling of step operands");
    c->add_option("--workers", con.workers, "Subtask worker threads (default: all cores)");
    c->add_option("--flop-report", con.flop_report, "Per-step JSON report path");
    c->add_option("--output,-o", con.output, "Amplitude file, default stdout");

    VerifyArgs ver;
    auto* v = app.add_subcommand("verify", "LXEB fidelity, precision error and Porter-Thomas report");
    v->add_option("amplitudes", ver.amplitudes, "Amplitude file")->required();
    v->add_option("--reference", ver.reference, "Reference amplitude file for precision errors");
    v->add_option("--format", ver.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
    v->add_option("--bins", ver.bins, "Histogram bins")->check(CLI::PositiveNumber);
    v->add_option("--output,-o", ver.output, "Report file, default stdout");

    OracleArgs ora;
    ora.seed = seed;
    auto* o = app.add_subcommand("oracle", "State-vector amplitudes or samples (up to 24 qubits)");
    o->add_option("circuit", ora.circuit, "Circuit file")->required();
    auto* ob = o->add_option("--bitstrings", ora.bitstrings, "Compute amplitudes of these bitstrings");
    o->add_option("--samples", ora.samples, "Draw this many samples")->excludes(ob);
    o->add_option("--fidelity", ora.fidelity, "Sampler fidelity f")->check(CLI::Range(0.0, 1.0));
    o->add_option("--seed", ora.seed, "Random seed");
    o->add_option("--output,-o", ora.output, "Output file, default stdout");

    BenchArgs ben;
    ben.seed = seed;
    auto* b = app.add_subcommand("bench", "Synthetic GEMM timing and top-k reorder speedups");
    b->add_option("--qubits", ben.qubits, "Circuit qubits")->check(CLI::PositiveNumber);
    b->add_option("--cycles", ben.cycles, "Circuit cycles")->check(CLI::NonNegativeNumber);
    b->add_option("--topk", ben.topk, "Steps to report");
    b->add_option("--sweeps", ben.sweeps, "Annealing sweeps")->check(CLI::NonNegativeNumber);
    b->add_option("--repeat", ben.repeat, "Timing repetitions (best of)")->check(CLI::PositiveNumber);
    b->add_option("--gemm-size", ben.gemm_size, "Synthetic GEMM edge")->check(CLI::PositiveNumber);
    b->add_option("--seed", ben.seed, "Random seed");
    b->add_option("--output,-o", ben.output, "Report file, default stdout");

    PrecisionBenchArgs pb;
    pb.seed = seed;
    auto* q = app.add_subcommand("precision-bench", "Median relative dot-product error per precision setting");
    q->add_option("--length", pb.length, "Vector length")->check(CLI::PositiveNumber);
    q->add_option("--trials", pb.trials, "Trials")->check(CLI::PositiveNumber);
    q->add_option("--lo", pb.lo, "Smallest magnitude");
    q->add_option("--hi", pb.hi, "Largest magnitude");
    q->add_option("--seed", pb.seed, "Random seed");
    q->add_option("--output,-o", pb.output, "CSV file, default stdout");

    try {
        std::vector<std::string> args(argv.size() > 1 ? argv.begin() + 1 : argv.end(), argv.end());
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e);
        return kOk;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << app.help();
        return kUsage;
    }

    try {
        if (g->parsed()) return cmd_gen(gen);
        if (p->parsed()) return cmd_pathfind(path);
        if (c->parsed()) return cmd_contract(con);
        if (v->parsed()) return cmd_verify(ver);
        if (o->parsed()) return cmd_oracle(ora);
        if (b->parsed()) return cmd_bench(ben);
        if (q->parsed()) return cmd_precision_bench(pb);
    } catch (const ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return kResourceError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDataError;
    }
    std::cerr << app.help();
    return kUsage;
}

}  // namespace tenkontract::cli
