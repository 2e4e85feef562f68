// duocover: command-line front end for the double coverage solver.

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <duocover/duocover.hpp>

namespace {

using namespace duocover;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Config {
    std::string input;
    std::string output;
    std::string params;
    std::string candidates;
    std::optional<std::size_t> k;
    std::optional<double> routing_factor;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> nbruns;
    std::optional<std::size_t> neighbors;
    std::optional<double> time_limit;
    std::size_t threads = 1;
    std::string linking = "strong";
    bool tight_weak = false;
    std::string timing = "wall";

    std::string method;  // sample
    std::size_t n = 0;   // gen
    std::string profile = "towns";
    std::size_t m = 0;  // downsample

    std::string mode = "table";  // bench
    std::vector<std::size_t> sizes;
    std::string methods = "exact,cbs";
    std::string sweep;
};

std::uint64_t resolve_seed(const Config& cfg) {
    if (cfg.seed) return *cfg.seed;
    if (const char* env = std::getenv("DUOCOVER_SEED")) {
        std::uint64_t value = 0;
        const std::string_view text(env);
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size())
            throw UsageError("DUOCOVER_SEED must be an unsigned integer");
        return value;
    }
    return kDefaultSeed;
}

/// Flags win over the sidecar, the sidecar over defaults. Without --params a
/// file named like the input with a .json extension is used when present.
InstanceParams resolve_params(const Config& cfg) {
    InstanceParams sidecar;
    if (!cfg.params.empty()) {
        sidecar = read_params_json(cfg.params);
    } else if (!cfg.input.empty()) {
        auto path = std::filesystem::path(cfg.input).replace_extension(".json");
        if (std::filesystem::exists(path)) sidecar = read_params_json(path.string());
    }
    InstanceParams out;
    out.k = cfg.k ? cfg.k : sidecar.k;
    out.routing_factor = cfg.routing_factor ? cfg.routing_factor : sidecar.routing_factor;
    return out;
}

Instance load_instance(const Config& cfg, bool need_k) {
    if (cfg.input.empty()) throw UsageError("--input is required");
    auto sites = read_sites_csv(cfg.input);
    const auto params = resolve_params(cfg);
    if (need_k && !params.k) throw UsageError("k is required (--k or sidecar JSON)");
    const std::size_t k = params.k.value_or(std::min<std::size_t>(2, sites.size()));
    return Instance(std::move(sites), k, params.routing_factor.value_or(kDefaultRoutingFactor));
}

/// Writes to --output, or stdout when it is empty.
template <class Fn>
void emit(const Config& cfg, Fn&& write) {
    if (cfg.output.empty()) {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(cfg.output, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + cfg.output);
    write(out);
    if (!out) throw std::runtime_error("failed writing " + cfg.output);
}

Linking parse_linking(const std::string& text) {
    if (text == "strong") return Linking::Strong;
    if (text == "weak") return Linking::Weak;
    throw UsageError("--linking must be strong or weak");
}

bool parse_timing(const std::string& text) {
    if (text == "wall") return true;
    if (text == "none") return false;
    throw UsageError("--timing must be wall or none");
}

SolveOptions solve_options(const Config& cfg) {
    SolveOptions options;
    options.time_limit = cfg.time_limit;
    options.threads = cfg.threads;
    options.seed = resolve_seed(cfg);
    return options;
}

int run_solve(const Config& cfg) {
    const auto instance = load_instance(cfg, true);
    const auto include_timing = parse_timing(cfg.timing);
    const auto options = solve_options(cfg);
    SolveResult result;
    if (cfg.candidates.empty()) {
        result = solve_exact(instance, options);
    } else {
        const auto map = read_candidates_csv(cfg.candidates, instance.size());
        result = solve_restricted(instance, map, options);
    }
    emit(cfg, [&](std::ostream& out) { out << to_json(result, include_timing).dump(2) << '\n'; });
    return result.status == SolveStatus::Infeasible ? kExitInfeasible : kExitOk;
}

int run_sample(const Config& cfg) {
    const auto instance = load_instance(cfg, cfg.method == "cbs");
    CandidateMap map;
    if (cfg.method == "cbs") {
        if (cfg.neighbors) throw UsageError("--neighbors applies to --method kcn only");
        map = sampling_points(instance, cfg.nbruns.value_or(30), instance.k(), resolve_seed(cfg), {cfg.threads});
    } else if (cfg.method == "kcn") {
        if (cfg.nbruns) throw UsageError("--nbruns applies to --method cbs only");
        map = kcn_candidates(instance, cfg.neighbors.value_or(20));
    } else {
        throw UsageError("--method must be cbs or kcn");
    }
    emit(cfg, [&](std::ostream& out) { write_candidates_csv(out, map); });
    return kExitOk;
}

int run_export(const Config& cfg) {
    const auto instance = load_instance(cfg, true);
    const auto linking = parse_linking(cfg.linking);
    if (cfg.tight_weak && linking != Linking::Weak) throw UsageError("--tight-weak needs --linking weak");
    ModelOptions options{linking, cfg.tight_weak};
    std::optional<CandidateMap> map;
    if (!cfg.candidates.empty()) map = read_candidates_csv(cfg.candidates, instance.size());
    const auto model = build_model(instance, map ? &*map : nullptr, options);
    emit(cfg, [&](std::ostream& out) { export_lp(model, out); });
    return kExitOk;
}

int run_gen(const Config& cfg) {
    if (cfg.n < 2) throw UsageError("--n must be at least 2");
    SpatialProfile profile;
    if (cfg.profile == "towns") profile = SpatialProfile::ClusteredTowns;
    else if (cfg.profile == "uniform") profile = SpatialProfile::Uniform;
    else throw UsageError("--profile must be towns or uniform");
    Rng rng(resolve_seed(cfg));
    const auto master = generate_master(cfg.n, profile, rng);
    emit(cfg, [&](std::ostream& out) { write_sites_csv(out, master.sites()); });
    return kExitOk;
}

int run_downsample(const Config& cfg) {
    const auto instance = load_instance(cfg, false);
    if (cfg.m == 0) throw UsageError("--m must be positive");
    Rng rng(resolve_seed(cfg));
    const auto reduced = downsample(instance, cfg.m, rng);
    emit(cfg, [&](std::ostream& out) { write_sites_csv(out, reduced.sites()); });
    return kExitOk;
}

std::vector<BenchMethod> parse_methods(const std::string& text) {
    std::vector<BenchMethod> methods;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item == "exact") methods.push_back(BenchMethod::Exact);
        else if (item == "cbs") methods.push_back(BenchMethod::RestrictedCBS);
        else if (item == "kcn") methods.push_back(BenchMethod::RestrictedKCN);
        else if (item == "lp") methods.push_back(BenchMethod::LPExportOnly);
        else throw UsageError("unknown bench method '" + item + "'");
    }
    if (methods.empty()) throw UsageError("--methods is empty");
    return methods;
}

/// `lo:hi:step`, inclusive.
std::vector<std::size_t> parse_range(const std::string& text, std::size_t n) {
    if (text.empty()) {
        std::vector<std::size_t> out;
        for (std::size_t v = 2; v <= n; v += 2) out.push_back(v);
        if (out.empty() || out.back() != n) out.push_back(n);
        return out;
    }
    std::size_t lo = 0, hi = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || step == 0 || lo == 0 || lo > hi)
        throw UsageError("--sweep expects lo:hi:step with 1 <= lo <= hi and step > 0");
    std::vector<std::size_t> out;
    for (std::size_t v = lo; v <= hi; v += step) out.push_back(v);
    return out;
}

int run_bench(const Config& cfg) {
    BenchParams params;
    params.nbruns = cfg.nbruns.value_or(params.nbruns);
    params.neighbors = cfg.neighbors.value_or(params.neighbors);
    params.seed = resolve_seed(cfg);
    params.time_limit = cfg.time_limit;
    params.threads = cfg.threads;
    params.linking = parse_linking(cfg.linking);
    const CsvOptions csv{parse_timing(cfg.timing)};

    if (cfg.mode == "table") {
        if (!cfg.sweep.empty()) throw UsageError("--sweep needs --mode sweep");
        if (cfg.sizes.empty()) throw UsageError("--sizes is required for --mode table");
        const auto master = load_instance(cfg, false);
        const auto params_k = resolve_params(cfg).k;
        if (!params_k) throw UsageError("k is required (--k or sidecar JSON)");
        const auto records = run_table(master, cfg.sizes, *params_k, parse_methods(cfg.methods), params);
        emit(cfg, [&](std::ostream& out) { write_table_csv(out, records, csv); });
        return kExitOk;
    }
    if (cfg.mode == "sweep") {
        if (!cfg.sizes.empty()) throw UsageError("--sizes needs --mode table");
        const auto instance = load_instance(cfg, true);
        const auto records = run_kcn_sweep(instance, instance.k(), parse_range(cfg.sweep, instance.size()), params);
        emit(cfg, [&](std::ostream& out) { write_sweep_csv(out, records, csv); });
        return kExitOk;
    }
    throw UsageError("--mode must be table or sweep");
}

void add_io(CLI::App* sub, Config& cfg) {
    sub->add_option("--input,-i", cfg.input, "Instance CSV (id,x,y,load[,alpha])");
    sub->add_option("--output,-o", cfg.output, "Output file (default: stdout)");
}

void add_instance(CLI::App* sub, Config& cfg) {
    sub->add_option("--k", cfg.k, "Number of metro nodes")->check(CLI::PositiveNumber);
    sub->add_option("--routing-factor", cfg.routing_factor, "Fibre routing factor (default 1.6)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--params", cfg.params, "Sidecar JSON with k / routing_factor");
}

void add_seed(CLI::App* sub, Config& cfg) {
    sub->add_option("--seed", cfg.seed, "Random seed (default: DUOCOVER_SEED or 20100901)");
}

void add_solver(CLI::App* sub, Config& cfg) {
    sub->add_option("--time-limit", cfg.time_limit, "Solver time limit in seconds")->check(CLI::PositiveNumber);
    sub->add_option("--threads", cfg.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--timing", cfg.timing, "wall or none (drop timings for reproducible output)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Double coverage metro node placement"};
    app.require_subcommand(1);
    Config cfg;

    auto* solve = app.add_subcommand("solve", "Exact or restricted solve; writes result JSON");
    add_io(solve, cfg);
    add_instance(solve, cfg);
    add_seed(solve, cfg);
    add_solver(solve, cfg);
    solve->add_option("--candidates", cfg.candidates, "Candidate map CSV for a restricted solve");

    auto* sample = app.add_subcommand("sample", "Candidate positions (cbs or kcn); writes candidate CSV");
    add_io(sample, cfg);
    add_instance(sample, cfg);
    add_seed(sample, cfg);
    sample->add_option("--method", cfg.method, "cbs or kcn")->required();
    sample->add_option("--nbruns", cfg.nbruns, "Clustering runs (cbs, default 30)")->check(CLI::PositiveNumber);
    sample->add_option("--neighbors", cfg.neighbors, "Cheapest candidates per site (kcn, default 20)")
        ->check(CLI::PositiveNumber);
    sample->add_option("--threads", cfg.threads, "Worker threads")->check(CLI::PositiveNumber);

    auto* lp = app.add_subcommand("export-lp", "Write the binary program in LP format");
    add_io(lp, cfg);
    add_instance(lp, cfg);
    lp->add_option("--linking", cfg.linking, "strong or weak");
    lp->add_flag("--tight-weak", cfg.tight_weak, "Weak rows use each column's own x count");
    lp->add_option("--candidates", cfg.candidates, "Candidate map CSV restricting x variables");

    auto* gen = app.add_subcommand("gen", "Generate a synthetic master instance CSV");
    gen->add_option("--output,-o", cfg.output, "Output file (default: stdout)");
    gen->add_option("--n", cfg.n, "Number of sites")->required();
    gen->add_option("--profile", cfg.profile, "towns or uniform");
    add_seed(gen, cfg);

    auto* down = app.add_subcommand("downsample", "Weighted k-means reduction to m sites");
    add_io(down, cfg);
    down->add_option("--m", cfg.m, "Number of output sites")->required();
    down->add_option("--params", cfg.params, "Sidecar JSON with k / routing_factor");
    add_seed(down, cfg);

    auto* bench = app.add_subcommand("bench", "Benchmark table or KCN sweep CSV");
    add_io(bench, cfg);
    add_instance(bench, cfg);
    add_seed(bench, cfg);
    add_solver(bench, cfg);
    bench->add_option("--mode", cfg.mode, "table or sweep");
    bench->add_option("--sizes", cfg.sizes, "Instance sizes for table mode")->delimiter(',');
    bench->add_option("--methods", cfg.methods, "Comma list of exact,cbs,kcn,lp");
    bench->add_option("--nbruns", cfg.nbruns, "Clustering runs for cbs")->check(CLI::PositiveNumber);
    bench->add_option("--neighbors", cfg.neighbors, "Neighbours for kcn")->check(CLI::PositiveNumber);
    bench->add_option("--sweep", cfg.sweep, "Neighbour range lo:hi:step (default 2:n:2)");
    bench->add_option("--linking", cfg.linking, "strong or weak (lp method)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitError;
    }

    try {
        if (*solve) return run_solve(cfg);
        if (*sample) return run_sample(cfg);
        if (*lp) return run_export(cfg);
        if (*gen) return run_gen(cfg);
        if (*down) return run_downsample(cfg);
        if (*bench) return run_bench(cfg);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
