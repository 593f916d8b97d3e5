#include "rieszlab/cli.hpp"

#include "rieszlab/errors.hpp"
#include "rieszlab/frequency.hpp"
#include "rieszlab/numeric.hpp"
#include "rieszlab/plane.hpp"
#include "rieszlab/quadrature.hpp"
#include "rieszlab/scheme.hpp"
#include "rieszlab/symbols.hpp"
#include "rieszlab/torus_metrics.hpp"
#include "rieszlab/trig_poly.hpp"
#include "rieszlab/witness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rieszlab {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "rieszlab 0.1.0";

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

// Effective parameter record: defaults, overlaid by --config JSON, overlaid
// by explicit flags.  Echoed (in full) into every output so a run is
// reproducible from its own artifact.
struct RunConfig {
    std::string symbol = "dyadic_cos";
    std::string osc = "IIa";
    std::string variant = "alternating";  // z-growth: alternating|exponential|product
    std::string mode = "auto";            // quadrature: auto|grid|mc
    int s = 3;                            // single-ladder commands
    int s_min = 1;
    int s_max = 4;
    int big_n = 8;
    double epsilon = 0.1;
    long long ratio = 4;
    long long samples = 1'000'000;
    std::uint64_t grid_n = 256;
    std::uint64_t seed = 0x5eed0001ULL;
    std::uint64_t construction_seed = 0x5eedc0deULL;
    int sampler_budget = 40000;
    int theta = -1;  // transfer-check: explicit width, -1 = search
    double theta_rel_tol = 0.05;
    int theta_max = 20;
    double c_hat = 0.0;  // witness: 0 = calibrate
    int points = 100;
    int threads = 0;
    bool direct_p = true;
    std::string out_dir;
};

json config_json(const RunConfig& c, const std::string& command) {
    return json{{"command", command},
                {"symbol", c.symbol},
                {"case", c.osc},
                {"variant", c.variant},
                {"mode", c.mode},
                {"s", c.s},
                {"s_min", c.s_min},
                {"s_max", c.s_max},
                {"big_n", c.big_n},
                {"epsilon", c.epsilon},
                {"ratio", c.ratio},
                {"samples", c.samples},
                {"grid_n", c.grid_n},
                {"seed", c.seed},
                {"construction_seed", c.construction_seed},
                {"sampler_budget", c.sampler_budget},
                {"theta", c.theta},
                {"theta_rel_tol", c.theta_rel_tol},
                {"theta_max", c.theta_max},
                {"c_hat", c.c_hat},
                {"points", c.points},
                {"threads", c.threads},
                {"direct_p", c.direct_p},
                {"out_dir", c.out_dir}};
}

void apply_json(RunConfig& c, const json& j) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        try {
            if (k == "command") continue;  // echoed configs round-trip
            else if (k == "symbol") c.symbol = it->get<std::string>();
            else if (k == "case") c.osc = it->get<std::string>();
            else if (k == "variant") c.variant = it->get<std::string>();
            else if (k == "mode") c.mode = it->get<std::string>();
            else if (k == "s") c.s = it->get<int>();
            else if (k == "s_min") c.s_min = it->get<int>();
            else if (k == "s_max") c.s_max = it->get<int>();
            else if (k == "big_n") c.big_n = it->get<int>();
            else if (k == "epsilon") c.epsilon = it->get<double>();
            else if (k == "ratio") c.ratio = it->get<long long>();
            else if (k == "samples") c.samples = it->get<long long>();
            else if (k == "grid_n") c.grid_n = it->get<std::uint64_t>();
            else if (k == "seed") c.seed = it->get<std::uint64_t>();
            else if (k == "construction_seed") c.construction_seed = it->get<std::uint64_t>();
            else if (k == "sampler_budget") c.sampler_budget = it->get<int>();
            else if (k == "theta") c.theta = it->get<int>();
            else if (k == "theta_rel_tol") c.theta_rel_tol = it->get<double>();
            else if (k == "theta_max") c.theta_max = it->get<int>();
            else if (k == "c_hat") c.c_hat = it->get<double>();
            else if (k == "points") c.points = it->get<int>();
            else if (k == "threads") c.threads = it->get<int>();
            else if (k == "direct_p") c.direct_p = it->get<bool>();
            else if (k == "out_dir") c.out_dir = it->get<std::string>();
            else throw ConfigError("unknown config key '" + k + "'");
        } catch (const json::exception& e) {
            throw ConfigError("config key '" + k + "': " + e.what());
        }
    }
}

void validate(const RunConfig& c) {
    if (c.s < 1) throw ConfigError("s must be >= 1");
    if (c.s_min < 1 || c.s_max < c.s_min) throw ConfigError("need 1 <= s_min <= s_max");
    if (c.ratio < 2) throw ConfigError("ratio must be >= 2");
    if (c.samples < 1) throw ConfigError("samples must be >= 1");
    if (c.epsilon <= 0) throw ConfigError("epsilon must be positive");
    if (c.points < 1) throw ConfigError("points must be >= 1");
    if (c.mode != "auto" && c.mode != "grid" && c.mode != "mc")
        throw ConfigError("mode must be auto, grid or mc");
}

QuadratureSpec quad_from(const RunConfig& c) {
    QuadratureSpec spec;
    if (c.mode == "grid") spec.mode = QuadMode::FixedGrid;
    else if (c.mode == "mc") spec.mode = QuadMode::MonteCarlo;
    else spec.mode = QuadMode::AutoGrid;
    spec.fixed_n = c.grid_n;
    spec.mc_samples = static_cast<std::uint64_t>(c.samples);
    spec.seed = c.seed;
    return spec;
}

OscCase parse_case(const std::string& name) {
    if (name == "IIa") return OscCase::IIa;
    if (name == "IIb") return OscCase::IIb;
    throw ConfigError("case must be IIa or IIb, got '" + name + "'");
}

std::string meta_block(const json& cfg) {
    std::ostringstream os;
    const std::string line = cfg.dump();
    os << "# config: " << line << "\n";
    os << "# config_hash: " << hex64(fnv1a64(line)) << "\n";
    os << "# seed: " << cfg.at("seed").get<std::uint64_t>() << "\n";
    os << "# version: " << kVersion << "\n";
    return os.str();
}

void embed_meta(json& j, const json& cfg) {
    const std::string line = cfg.dump();
    j["config"] = cfg;
    j["config_hash"] = hex64(fnv1a64(line));
    j["seed"] = cfg.at("seed").get<std::uint64_t>();
    j["version"] = kVersion;
}

json est_json(const NormEstimate& e) {
    json j{{"value", e.value},
           {"error_bound", e.error_bound},
           {"method", e.method_name()},
           {"samples_or_gridsize", e.samples_or_gridsize}};
    if (e.rng_seed) j["rng_seed"] = *e.rng_seed;
    return j;
}

json check_json(const ConditionCheck& c) {
    return json{{"evaluated", c.evaluated},
                {"pass", c.pass},
                {"first_violation", c.first_violation},
                {"note", c.note}};
}

// Command result: primary artifact for standard output plus named files for
// --out-dir.  Nothing is printed until the whole command has succeeded, so a
// failed run never leaves a partial CSV behind.
struct Outputs {
    int code = 0;
    std::string primary;
    std::vector<std::pair<std::string, std::string>> files;
};

std::vector<Frequency> collinear_centers(int s, long long ratio) {
    std::vector<Frequency> centers;
    BigInt a = 2;
    for (int k = 0; k < s; ++k) {
        centers.push_back(Frequency{BigInt(a), BigInt(a / 2)});
        a *= ratio;
    }
    return centers;
}

Outputs cmd_riesz_norm(const RunConfig& cfg, const json& echo, std::ostream& err) {
    const QuadratureSpec quad = quad_from(cfg);
    std::ostringstream csv;
    csv << "s,product_norm,product_err,tail_norm,tail_err\n";
    for (int s = cfg.s_min; s <= cfg.s_max; ++s) {
        const auto centers = power_centers(s, freq(1, 0), static_cast<unsigned>(cfg.ratio));
        SparseTrigPoly tail = riesz_product_tail(centers);
        SparseTrigPoly full = tail;
        full.set(freq(0, 0), full.coeff(freq(0, 0)) + 1.0);
        const NormEstimate a = l1_norm(full, quad);
        const NormEstimate b = l1_norm(tail, quad);
        csv << s << ',' << fmt(a.value) << ',' << fmt(a.error_bound) << ',' << fmt(b.value)
            << ',' << fmt(b.error_bound) << "\n";
        err << "[riesz-norm] s=" << s << " " << a.method_name() << "\n";
    }
    csv << meta_block(echo);
    Outputs outs;
    outs.primary = csv.str();
    outs.files.emplace_back("riesz_norm.csv", outs.primary);
    return outs;
}

Outputs cmd_z_growth(const RunConfig& cfg, const json& echo, std::ostream& err) {
    GrowthBuilder builder;
    if (cfg.variant == "alternating") builder = GrowthBuilder::SymmetricZ;
    else if (cfg.variant == "exponential") builder = GrowthBuilder::AsymmetricExp;
    else if (cfg.variant == "product") builder = GrowthBuilder::ProductTail;
    else throw ConfigError("variant must be alternating, exponential or product");

    const long long ratio = cfg.ratio;
    const auto rows = growth_profile(
        builder,
        [ratio](int s) { return power_centers(s, freq(1, 0), static_cast<unsigned>(ratio)); },
        cfg.s_min, cfg.s_max, quad_from(cfg));

    std::ostringstream csv;
    csv << "s,norm,norm_err,per_s\n";
    for (const auto& row : rows) {
        csv << row.s << ',' << fmt(row.norm.value) << ',' << fmt(row.norm.error_bound) << ','
            << fmt(row.per_s) << "\n";
    }
    csv << meta_block(echo);
    err << "[z-growth] " << rows.size() << " rows\n";
    Outputs outs;
    outs.primary = csv.str();
    outs.files.emplace_back("z_growth.csv", outs.primary);
    return outs;
}

Outputs cmd_scheme(const RunConfig& cfg, const json& echo, std::ostream& err) {
    const MultiplierSymbol sym = resolve_symbol(cfg.symbol);
    ConstructOptions co;
    co.big_n = cfg.big_n;
    co.epsilon = cfg.epsilon;
    co.sampler_budget = cfg.sampler_budget;
    co.seed = cfg.construction_seed;
    const LacunaryScheme lac = construct_scheme(sym, parse_case(cfg.osc), cfg.s, co);
    const IntegerScheme isch = rescale_to_integers(lac);
    err << "[scheme] constructed s=" << cfg.s << ", verifying\n";
    const ConditionReport rep = verify_conditions(isch, &sym);

    json verification;
    for (const auto& [letter, chk] : rep.operative) verification[std::string(1, letter)] = check_json(chk);
    json j{{"command", "scheme"},
           {"scheme", json::parse(scheme_to_json(isch))},
           {"verification", verification},
           {"d_as_printed", check_json(rep.d_as_printed)},
           {"i_as_printed", check_json(rep.i_as_printed)},
           {"all_pass", rep.all_pass()}};
    embed_meta(j, echo);

    Outputs outs;
    outs.code = rep.all_pass() ? 0 : 1;
    if (!rep.all_pass()) err << "[scheme] verification failed: " << rep.summary() << "\n";
    outs.primary = j.dump(2) + "\n";
    outs.files.emplace_back("scheme.json", outs.primary);
    return outs;
}

Outputs cmd_classify(const RunConfig& cfg, const json& echo, std::ostream& err) {
    const MultiplierSymbol sym = resolve_symbol(cfg.symbol);
    const RadialClassification cls = classify_radial(sym);
    const char* verdict = "Inconclusive";
    switch (cls.verdict) {
        case RadialCase::StarCondition: verdict = "StarCondition"; break;
        case RadialCase::IIa: verdict = "IIa"; break;
        case RadialCase::IIb: verdict = "IIb"; break;
        case RadialCase::Inconclusive: verdict = "Inconclusive"; break;
    }
    json dirs = json::array();
    for (const auto& d : cls.directions) {
        dirs.push_back(json{{"v", {d.v[0], d.v[1]}},
                            {"usable", d.usable},
                            {"converges_pos", d.converges_pos},
                            {"converges_neg", d.converges_neg},
                            {"limit_pos", d.limit_pos},
                            {"limit_neg", d.limit_neg}});
    }
    json j{{"command", "classify"},
           {"verdict", verdict},
           {"direction", {cls.direction[0], cls.direction[1]}},
           {"parity", cls.parity},
           {"a", cls.a},
           {"b", cls.b},
           {"omega_constant", cls.omega_constant},
           {"note", cls.note},
           {"directions", dirs}};
    embed_meta(j, echo);
    err << "[classify] " << cfg.symbol << " -> " << verdict << "\n";
    Outputs outs;
    outs.primary = j.dump(2) + "\n";
    outs.files.emplace_back("classify.json", outs.primary);
    return outs;
}

Outputs cmd_transfer_check(const RunConfig& cfg, const json& echo, std::ostream& err) {
    IntegerScheme sch;
    sch.scale = 1;
    sch.osc_case = OscCase::IIa;
    sch.s = cfg.s;
    sch.big_n = cfg.big_n;
    sch.epsilon = cfg.epsilon;
    sch.symbol_id = "collinear-ladder";
    sch.centers = collinear_centers(cfg.s, cfg.ratio);
    sch.radii.assign(cfg.s, BigRat(1, 2));

    const QuadratureSpec quad = quad_from(cfg);
    int theta = cfg.theta;
    bool searched = false;
    json trace = json::array();
    if (theta < 0) {
        const ThetaChoice tc = theta_search(sch, quad, cfg.theta_rel_tol, cfg.theta_max);
        theta = tc.theta;
        searched = true;
        for (const auto& [t, est] : tc.search_trace)
            trace.push_back(json{{"theta", t}, {"estimate", est_json(est)}});
        err << "[transfer-check] stabilized at theta=" << theta << "\n";
    }

    const PlaneFunction h = h_theta(sch, theta);
    const PlaneFunction w = fejer_transfer(dilated_sum_coefficients(sch, theta));
    const SumSet sum_set = SumSet::build(sch.centers);
    std::vector<Frequency> sums;
    for (const auto& [q, p] : sum_set.points()) sums.push_back(q);

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double width = 2.0 * std::ldexp(1.0, -theta);
    double worst = 0.0, total = 0.0;
    for (int i = 0; i < cfg.points; ++i) {
        const auto& q = sums[rng() % sums.size()];
        const double x = to_double(BigRat(q.k1)) + width * unit(rng);
        const double y = to_double(BigRat(q.k2)) + width * unit(rng);
        const double r =
            std::abs(h.eval(x, y) - w.eval(std::ldexp(x, theta), std::ldexp(y, theta)));
        worst = std::max(worst, r);
        total += r;
    }

    const NormEstimate nh = inv_ft_l1(h, 2048.0, quad);
    const NormEstimate nr = ratio_multiplier_l1(sch, theta, quad);

    json j{{"command", "transfer-check"},
           {"s", cfg.s},
           {"theta", theta},
           {"theta_searched", searched},
           {"points", cfg.points},
           {"max_residual", worst},
           {"mean_residual", total / cfg.points},
           {"h_inv_ft", est_json(nh)},
           {"ratio_inv_ft", est_json(nr)}};
    if (searched) j["theta_trace"] = trace;
    embed_meta(j, echo);

    Outputs outs;
    outs.primary = j.dump(2) + "\n";
    outs.files.emplace_back("transfer_check.json", outs.primary);
    return outs;
}

Outputs cmd_witness(const RunConfig& cfg, const json& echo, std::ostream& err) {
    const MultiplierSymbol sym = resolve_symbol(cfg.symbol);
    WitnessParams wp;
    wp.c_hat = cfg.c_hat;
    wp.big_n = cfg.big_n;
    wp.sampler_budget = cfg.sampler_budget;
    wp.construction_seed = cfg.construction_seed;
    wp.quad = quad_from(cfg);
    wp.theta_rel_tol = cfg.theta_rel_tol;
    wp.theta_max = cfg.theta_max;
    wp.direct_p = cfg.direct_p;

    std::vector<int> depths;
    for (int s = cfg.s_min; s <= cfg.s_max; ++s) depths.push_back(s);
    err << "[witness] " << cfg.symbol << " " << cfg.osc << " s=" << cfg.s_min << ".."
        << cfg.s_max << "\n";
    const auto reports = witness_report(sym, parse_case(cfg.osc), depths, wp);
    err << "[witness] " << reports.size() << " reports\n";

    json j = json::parse(witness_json(reports));
    embed_meta(j, echo);

    Outputs outs;
    outs.primary = witness_csv(reports) + meta_block(echo);
    outs.files.emplace_back("witness.csv", outs.primary);
    outs.files.emplace_back("witness.json", j.dump(2) + "\n");
    return outs;
}

struct Flags {
    std::optional<std::string> config_path, symbol, osc, variant, mode, out_dir;
    std::optional<int> s, s_min, s_max, big_n, sampler_budget, theta, theta_max, points, threads;
    std::optional<double> epsilon, theta_rel_tol, c_hat;
    std::optional<long long> ratio, samples;
    std::optional<std::uint64_t> grid_n, seed, construction_seed;
    std::optional<bool> direct_p;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config_path, "JSON config file; flags override its keys");
    sub->add_option("--symbol", f.symbol, "catalog id or expr:<formula in x1,x2>");
    sub->add_option("--case", f.osc, "oscillation case, IIa or IIb");
    sub->add_option("--variant", f.variant, "z-growth builder: alternating|exponential|product");
    sub->add_option("--mode", f.mode, "quadrature mode: auto|grid|mc");
    sub->add_option("--s", f.s, "ladder depth (single-ladder commands)");
    sub->add_option("--s-min", f.s_min, "first depth");
    sub->add_option("--s-max", f.s_max, "last depth");
    sub->add_option("--n", f.big_n, "separation exponent N");
    sub->add_option("--epsilon", f.epsilon, "symbol accuracy epsilon");
    sub->add_option("--ratio", f.ratio, "center ratio");
    sub->add_option("--samples", f.samples, "Monte Carlo sample count");
    sub->add_option("--grid-n", f.grid_n, "fixed grid points per axis");
    sub->add_option("--seed", f.seed, "quadrature RNG seed");
    sub->add_option("--construction-seed", f.construction_seed, "ladder sampler seed");
    sub->add_option("--budget", f.sampler_budget, "symbol evaluations per ladder level");
    sub->add_option("--theta", f.theta, "bump width exponent; -1 searches");
    sub->add_option("--theta-rel-tol", f.theta_rel_tol, "width search stabilization tolerance");
    sub->add_option("--theta-max", f.theta_max, "width search upper bound");
    sub->add_option("--c-hat", f.c_hat, "growth constant; 0 calibrates");
    sub->add_option("--points", f.points, "identity-check sample points");
    sub->add_option("--threads", f.threads, "worker threads; 0 = library default");
    sub->add_option("--direct-p", f.direct_p, "also estimate the sampled norm directly");
    sub->add_option("--out-dir", f.out_dir, "also write artifacts into this directory");
}

void apply_flags(RunConfig& c, const Flags& f) {
    if (f.symbol) c.symbol = *f.symbol;
    if (f.osc) c.osc = *f.osc;
    if (f.variant) c.variant = *f.variant;
    if (f.mode) c.mode = *f.mode;
    if (f.s) c.s = *f.s;
    if (f.s_min) c.s_min = *f.s_min;
    if (f.s_max) c.s_max = *f.s_max;
    if (f.big_n) c.big_n = *f.big_n;
    if (f.epsilon) c.epsilon = *f.epsilon;
    if (f.ratio) c.ratio = *f.ratio;
    if (f.samples) c.samples = *f.samples;
    if (f.grid_n) c.grid_n = *f.grid_n;
    if (f.seed) c.seed = *f.seed;
    if (f.construction_seed) c.construction_seed = *f.construction_seed;
    if (f.sampler_budget) c.sampler_budget = *f.sampler_budget;
    if (f.theta) c.theta = *f.theta;
    if (f.theta_rel_tol) c.theta_rel_tol = *f.theta_rel_tol;
    if (f.theta_max) c.theta_max = *f.theta_max;
    if (f.c_hat) c.c_hat = *f.c_hat;
    if (f.points) c.points = *f.points;
    if (f.threads) c.threads = *f.threads;
    if (f.direct_p) c.direct_p = *f.direct_p;
    if (f.out_dir) c.out_dir = *f.out_dir;
}

int emit(const Outputs& outs, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    out << outs.primary;
    if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        for (const auto& [name, text] : outs.files) {
            const auto path = std::filesystem::path(cfg.out_dir) / name;
            std::ofstream file(path, std::ios::binary);
            if (!file) throw ConfigError("cannot write " + path.string());
            file << text;
            err << "wrote " << path.string() << "\n";
        }
    }
    return outs.code;
}

}  // namespace

std::string version_string() { return kVersion; }

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"lacunary-ladder Fourier multiplier toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    Flags flags;
    const std::vector<std::string> names = {"riesz-norm", "z-growth",       "scheme",
                                            "classify",   "transfer-check", "witness"};
    const std::vector<std::string> help = {
        "L1 norms of the nonnegative center product and its mean-zero tail",
        "growth profile of the signed ladder sum (norm and norm/s per depth)",
        "construct a ladder for a symbol and verify every condition exactly",
        "radial behaviour of a symbol: star condition or oscillation case",
        "bump-sum vs lattice-transfer identity residuals and inverse-FT norms",
        "certified lower-bound pipeline: one report per depth, CSV + JSON"};
    for (size_t i = 0; i < names.size(); ++i) add_common(app.add_subcommand(names[i], help[i]), flags);

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("rieszlab");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "[config] " << e.what() << "\n";
        return 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();

    try {
        RunConfig cfg;
        if (flags.config_path) {
            std::ifstream file(*flags.config_path);
            if (!file) throw ConfigError("cannot read config file " + *flags.config_path);
            json j;
            try {
                j = json::parse(file);
            } catch (const json::exception& e) {
                throw ConfigError(std::string("config parse: ") + e.what());
            }
            apply_json(cfg, j);
        }
        apply_flags(cfg, flags);
        validate(cfg);
#ifdef _OPENMP
        if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif
        const json echo = config_json(cfg, command);

        Outputs outs;
        if (command == "riesz-norm") outs = cmd_riesz_norm(cfg, echo, err);
        else if (command == "z-growth") outs = cmd_z_growth(cfg, echo, err);
        else if (command == "scheme") outs = cmd_scheme(cfg, echo, err);
        else if (command == "classify") outs = cmd_classify(cfg, echo, err);
        else if (command == "transfer-check") outs = cmd_transfer_check(cfg, echo, err);
        else outs = cmd_witness(cfg, echo, err);
        return emit(outs, cfg, out, err);
    } catch (const ConfigError& e) {
        err << "[config] " << e.what() << "\n";
        return 2;
    } catch (const RepresentationCollision& e) {
        err << "[stage:frequency] " << e.what() << "\n";
        return 1;
    } catch (const ConstructionFailed& e) {
        err << "[stage:construct] " << e.what() << "\n";
        return 1;
    } catch (const ScaleOverflow& e) {
        err << "[stage:rescale] " << e.what() << "\n";
        return 1;
    } catch (const BumpOverlap& e) {
        err << "[stage:bump] " << e.what() << "\n";
        return 1;
    } catch (const NoStabilization& e) {
        err << "[stage:theta] " << e.what() << "\n";
        return 1;
    } catch (const SampleOnSingularity& e) {
        err << "[stage:sample] " << e.what() << "\n";
        return 1;
    } catch (const BallAssignmentAmbiguous& e) {
        err << "[stage:target] " << e.what() << "\n";
        return 1;
    } catch (const GapExceeded& e) {
        err << "[stage:gap] " << e.what() << "\n";
        return 1;
    } catch (const ResourceExceeded& e) {
        err << "[stage:resource] " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "[stage:math] " << e.what() << "\n";
        return 1;
    }
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace rieszlab
