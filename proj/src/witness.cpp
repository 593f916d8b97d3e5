#include "rieszlab/witness.hpp"

#include "rieszlab/errors.hpp"
#include "rieszlab/numeric.hpp"
#include "rieszlab/torus_metrics.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace rieszlab {

namespace {

const char* kTransferenceNote =
    "lower bound transfers to the plane operator norm by the de Leeuw restriction "
    "theorem, taken as an assumption and not re-verified numerically";

// (level 1-based, positive center side) of the unique ball containing q.
std::pair<int, bool> assign_ball(const IntegerScheme& scheme, const Frequency& q) {
    int level = 0;
    bool positive = true;
    int hits = 0;
    for (std::size_t k = 0; k < scheme.centers.size(); ++k) {
        const BigRat r2 = scheme.radii[k] * scheme.radii[k];
        for (int sign : {+1, -1}) {
            const BigInt dx = q.k1 - sign * scheme.centers[k].k1;
            const BigInt dy = q.k2 - sign * scheme.centers[k].k2;
            const BigInt d2 = dx * dx + dy * dy;
            if (BigRat(d2) <= r2) {
                ++hits;
                level = static_cast<int>(k) + 1;
                positive = sign > 0;
            }
        }
    }
    if (hits != 1) {
        std::ostringstream os;
        os << "sum point " << q.str() << " lies in " << hits
           << " of the per-level balls (expected exactly 1)";
        throw BallAssignmentAmbiguous(os.str());
    }
    return {level, positive};
}

bool same_terms(const SparseTrigPoly& a, const SparseTrigPoly& b, double scale_b) {
    for (const auto& [q, c] : a.terms())
        if (c != scale_b * b.coeff(q)) return false;
    for (const auto& [q, c] : b.terms())
        if (a.coeff(q) != scale_b * c) return false;
    return true;
}

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string format_hash(std::uint64_t h) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

nlohmann::json estimate_json(const NormEstimate& e) {
    nlohmann::json j;
    j["value"] = e.value;
    j["error_bound"] = e.error_bound;
    j["method"] = e.method_name();
    j["samples_or_gridsize"] = e.samples_or_gridsize;
    if (e.rng_seed) j["rng_seed"] = *e.rng_seed;
    return j;
}

}  // namespace

double calibrate_growth_constant(const QuadratureSpec& spec) {
    auto rows = growth_profile(
        GrowthBuilder::SymmetricZ,
        [](int s) { return power_centers(s, freq(1, 0), 16); }, 1, 6, spec);
    double best = rows.front().per_s;
    for (const auto& row : rows) best = std::min(best, row.per_s);
    return best;
}

SparseTrigPoly p_polynomial(const MultiplierSymbol& symbol, const IntegerScheme& scheme,
                            const PlaneFunction& h) {
    if (h.atoms.empty() || h.ratio_weighted)
        throw ConfigError("lattice sampling needs the plain disjoint-bump sum");
    if (h.atoms.size() != SumSet::build(scheme.centers).size())
        throw ConfigError("bump sum does not enumerate the scheme's signed sum set");

    std::vector<Frequency> window;
    window.reserve(h.atoms.size());
    for (const auto& atom : h.atoms) window.push_back(atom.center);
    // Sample at the original rational points q / scale, not the rescaled
    // integers: the symbol approximation holds on the rational balls, and a
    // non-homogeneous symbol takes different values at scale * q.
    const double eps = to_double(BigRat(BigRat(1) / BigRat(scheme.scale)));
    const auto samples = deleeuw_sample(symbol, eps, window);

    SparseTrigPoly p;
    for (const auto& atom : h.atoms) {
        const std::complex<double> c = samples.at(atom.center) * atom.weight;
        if (c != std::complex<double>{0.0, 0.0}) p.set(atom.center, c);
    }
    return p;
}

SparseTrigPoly z_target(const IntegerScheme& scheme, OscCase osc_case) {
    if (scheme.radii.size() != scheme.centers.size())
        throw ConfigError("scheme carries " + std::to_string(scheme.radii.size()) +
                          " radii for " + std::to_string(scheme.centers.size()) + " centers");
    const SumSet sums = SumSet::build(scheme.centers);

    SparseTrigPoly z;
    for (const auto& [q, rep] : sums.points()) {
        const auto [level, positive] = assign_ball(scheme, q);
        const double w = std::ldexp(1.0, -rep.weight);
        if (osc_case == OscCase::IIa) {
            z.set(q, (level % 2 == 0) ? w : -w);  // (-1)^level
        } else if (positive) {
            z.set(q, w);
        }
    }

    // The ball-driven coefficients must reproduce the ladder product
    // expansion exactly; a mismatch means some ball contains the wrong
    // depth's sums.
    const bool ok =
        osc_case == OscCase::IIa
            ? same_terms(z, z_polynomial(scheme.centers, alternating_signs(scheme.s)), 1.0)
            : same_terms(z, exp_polynomial(scheme.centers), 0.5);
    if (!ok)
        throw BallAssignmentAmbiguous(
            "ball containment disagrees with the ladder expansion: some sum point's "
            "unique ball is not its top level's");
    return z;
}

double gap_bound(const IntegerScheme& scheme, const SparseTrigPoly& p, const SparseTrigPoly& z) {
    const double bound = scheme.epsilon * std::pow(3.0, scheme.s);
    double exact = 0.0;
    for (const auto& [q, c] : p.terms()) exact += std::abs(c - z.coeff(q));
    for (const auto& [q, c] : z.terms())
        if (p.terms().find(q) == p.terms().end()) exact += std::abs(c);
    if (exact > bound) {
        std::ostringstream os;
        os << "coefficient gap " << format_double(exact) << " exceeds the certified bound "
           << format_double(bound) << " (accuracy " << scheme.epsilon << " at depth "
           << scheme.s << ")";
        throw GapExceeded(os.str());
    }
    return bound;
}

WitnessReport witness_report_for_scheme(const MultiplierSymbol& symbol,
                                        const IntegerScheme& scheme,
                                        const WitnessParams& params) {
    WitnessReport rep;
    rep.s = scheme.s;
    rep.osc_case = scheme.osc_case;
    rep.epsilon = scheme.epsilon;
    rep.c_hat = params.c_hat;
    rep.scheme_fingerprint = fnv1a64(scheme_to_json(scheme));

    rep.theta = theta_search(scheme, params.quad, params.theta_rel_tol, params.theta_max);
    const PlaneFunction h = h_theta(scheme, rep.theta.theta);

    const NormEstimate h_plain = inv_ft_l1(h, 2048.0, params.quad);
    rep.h_norm_upper.value = h_plain.value + rep.theta.ratio_norm.value;
    rep.h_norm_upper.error_bound = h_plain.error_bound + rep.theta.ratio_norm.error_bound;
    rep.h_norm_upper.method = NormMethod::MonteCarlo;
    rep.h_norm_upper.samples_or_gridsize = params.quad.mc_samples;
    rep.h_norm_upper.rng_seed = params.quad.seed;

    const SparseTrigPoly p = p_polynomial(symbol, scheme, h);
    const SparseTrigPoly z = z_target(scheme, scheme.osc_case);
    rep.pz_gap_bound = gap_bound(scheme, p, z);

    rep.z_norm = l1_norm(z, params.quad);
    rep.p_norm_lower = rep.z_norm.value - rep.z_norm.error_bound - rep.pz_gap_bound;
    if (params.direct_p) rep.p_norm_direct = l1_norm(p, params.quad);
    rep.ratio = rep.p_norm_lower / rep.h_norm_upper.value;
    return rep;
}

std::vector<WitnessReport> witness_report(const MultiplierSymbol& symbol, OscCase osc_case,
                                          const std::vector<int>& s_list,
                                          const WitnessParams& params) {
    WitnessParams local = params;
    if (local.c_hat <= 0.0) local.c_hat = calibrate_growth_constant(params.quad);

    std::vector<WitnessReport> out(s_list.size());
    std::vector<std::exception_ptr> failures(s_list.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(s_list.size()); ++i) {
        const int s = s_list[i];
        try {
            ConstructOptions opts;
            opts.big_n = local.big_n;
            opts.epsilon = local.c_hat * std::pow(3.0, -(s + 1)) * s;
            opts.sampler_budget = local.sampler_budget;
            opts.seed = local.construction_seed;
            IntegerScheme scheme =
                rescale_to_integers(construct_scheme(symbol, osc_case, s, opts));
            out[i] = witness_report_for_scheme(symbol, scheme, local);
        } catch (...) {
            failures[i] = std::current_exception();
        }
    }
    // Rethrow the failure at the smallest depth with its original type; the
    // upstream messages already carry their stage (condition, depth, width).
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);
    return out;
}

std::string witness_csv(const std::vector<WitnessReport>& reports) {
    std::ostringstream os;
    os << "s,case,theta,h_upper,h_upper_err,z_norm,z_norm_err,gap_bound,p_lower,"
          "p_direct,p_direct_err,ratio,epsilon,c_hat,scheme_fingerprint\n";
    for (const auto& r : reports) {
        os << r.s << ',' << to_string(r.osc_case) << ',' << r.theta.theta << ','
           << format_double(r.h_norm_upper.value) << ','
           << format_double(r.h_norm_upper.error_bound) << ','
           << format_double(r.z_norm.value) << ',' << format_double(r.z_norm.error_bound)
           << ',' << format_double(r.pz_gap_bound) << ',' << format_double(r.p_norm_lower)
           << ',';
        if (r.p_norm_direct)
            os << format_double(r.p_norm_direct->value) << ','
               << format_double(r.p_norm_direct->error_bound);
        else
            os << ',';
        os << ',' << format_double(r.ratio) << ',' << format_double(r.epsilon) << ','
           << format_double(r.c_hat) << ',' << format_hash(r.scheme_fingerprint) << '\n';
    }
    os << "# note: " << kTransferenceNote << '\n';
    return os.str();
}

std::string witness_json(const std::vector<WitnessReport>& reports) {
    nlohmann::json j;
    j["format"] = "rieszlab-witness/1";
    j["note"] = kTransferenceNote;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) {
        nlohmann::json e;
        e["s"] = r.s;
        e["case"] = to_string(r.osc_case);
        e["theta"] = r.theta.theta;
        nlohmann::json trace = nlohmann::json::array();
        for (const auto& [t, est] : r.theta.search_trace) {
            nlohmann::json probe;
            probe["theta"] = t;
            probe["estimate"] = estimate_json(est);
            trace.push_back(std::move(probe));
        }
        e["theta_trace"] = std::move(trace);
        e["h_norm_upper"] = estimate_json(r.h_norm_upper);
        e["z_norm"] = estimate_json(r.z_norm);
        if (r.p_norm_direct) e["p_norm_direct"] = estimate_json(*r.p_norm_direct);
        e["gap_bound"] = r.pz_gap_bound;
        e["p_norm_lower"] = r.p_norm_lower;
        e["ratio"] = r.ratio;
        e["epsilon"] = r.epsilon;
        e["c_hat"] = r.c_hat;
        e["scheme_fingerprint"] = format_hash(r.scheme_fingerprint);
        arr.push_back(std::move(e));
    }
    j["reports"] = std::move(arr);
    return j.dump(2);
}

}  // namespace rieszlab
