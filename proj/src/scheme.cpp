#include "rieszlab/scheme.hpp"

#include "rieszlab/errors.hpp"
#include "rieszlab/numeric.hpp"
#include "rieszlab/trig_poly.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rieszlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

BigRat pow2r(int e) {
    return e >= 0 ? BigRat(BigInt(1) << e) : BigRat(1, BigInt(1) << (-e));
}

BigRat rat_abs(const BigRat& r) { return r < 0 ? BigRat(-r) : r; }

BigRat sq(const BigRat& r) { return r * r; }

BigInt pow3(int e) {
    BigInt v = 1;
    for (int i = 0; i < e; ++i) v *= 3;
    return v;
}

// Maximum of |m(x) - target| over a deterministic sample of the closed ball
// B(center, radius): the center, four concentric rings, and a few seeded
// interior points.  Floating point on purpose — condition A is the only
// non-exact check in the verifier.
double ball_max_deviation(const MultiplierSymbol& symbol, double cx, double cy, double radius,
                          double target, int ring_angles, int interior, std::uint64_t seed,
                          long* eval_counter = nullptr) {
    double worst = std::abs(symbol.eval(cx, cy).real() - target);
    const double fractions[4] = {1.0, 0.75, 0.5, 0.25};
    for (double f : fractions) {
        for (int a = 0; a < ring_angles; ++a) {
            const double phi = 2.0 * kPi * (static_cast<double>(a) + 0.5) / ring_angles;
            const double x = cx + f * radius * std::cos(phi);
            const double y = cy + f * radius * std::sin(phi);
            worst = std::max(worst, std::abs(symbol.eval(x, y).real() - target));
        }
    }
    std::uint64_t st = seed;
    for (int i = 0; i < interior; ++i) {
        const double u = static_cast<double>(splitmix64(st) >> 11) * 0x1.0p-53;
        const double w = static_cast<double>(splitmix64(st) >> 11) * 0x1.0p-53;
        const double rr = radius * std::sqrt(u);
        const double x = cx + rr * std::cos(2.0 * kPi * w);
        const double y = cy + rr * std::sin(2.0 * kPi * w);
        worst = std::max(worst, std::abs(symbol.eval(x, y).real() - target));
    }
    if (eval_counter) *eval_counter += 1 + 4L * ring_angles + interior;
    return worst;
}

struct LevelTargets {
    double pos;  // target on B(+c^k, r_k)
    double neg;  // target on B(-c^k, r_k)
};

LevelTargets targets_for(OscCase osc_case, int k) {
    if (osc_case == OscCase::IIa) {
        const double t = (k % 2 == 0) ? 1.0 : -1.0;
        return {t, t};
    }
    return {1.0, 0.0};
}

}  // namespace

std::string to_string(OscCase c) { return c == OscCase::IIa ? "IIa" : "IIb"; }

OscCase osc_case_from_string(const std::string& name) {
    if (name == "IIa") return OscCase::IIa;
    if (name == "IIb") return OscCase::IIb;
    throw ConfigError("unknown oscillation case '" + name + "' (expected IIa or IIb)");
}

bool ConditionReport::all_pass() const {
    for (const auto& [letter, check] : operative)
        if (check.evaluated && !check.pass) return false;
    return true;
}

std::string ConditionReport::summary() const {
    std::ostringstream os;
    for (const auto& [letter, check] : operative) {
        os << letter << ':';
        if (!check.evaluated)
            os << "n/a";
        else if (check.pass)
            os << "pass";
        else
            os << "FAIL@" << check.first_violation;
        os << ' ';
    }
    os << "D(printed):" << (d_as_printed.pass ? "pass" : "FAIL") << ' ';
    os << "I(printed):" << (i_as_printed.pass ? "pass" : "FAIL");
    return os.str();
}

ConditionReport verify_conditions(const LacunaryScheme& scheme, const MultiplierSymbol* symbol,
                                  const VerifyOptions& opts) {
    const int s = scheme.s;
    if (s < 1 || scheme.centers.size() != static_cast<size_t>(s) ||
        scheme.radii.size() != static_cast<size_t>(s))
        throw ConfigError("scheme has inconsistent s / centers / radii sizes");
    for (const BigRat& r : scheme.radii)
        if (r <= 0) throw ConfigError("scheme radii must be positive");

    ConditionReport rep;
    const auto& c = scheme.centers;
    const auto& r = scheme.radii;
    const BigRat half_pow = pow2r(-scheme.big_n);  // 2^{-N}

    auto& A = rep.operative['A'];
    auto& B = rep.operative['B'];
    auto& C = rep.operative['C'];
    auto& D = rep.operative['D'];
    auto& E = rep.operative['E'];
    auto& F = rep.operative['F'];
    auto& G = rep.operative['G'];
    auto& H = rep.operative['H'];
    auto& I = rep.operative['I'];

    // B: r_n <= 2^{-N} r_{n+1}
    B.evaluated = true;
    B.pass = true;
    for (int n = 0; n + 1 < s; ++n) {
        if (!(r[n] <= half_pow * r[n + 1])) {
            B.pass = false;
            B.first_violation = n + 1;
            break;
        }
    }
    if (s == 1) B.note = "vacuous for s = 1";

    // C: exact rational coordinates (guaranteed by the representation).
    C.evaluated = true;
    C.pass = true;
    C.note = "centers stored as exact rationals";

    // D, operative orientation: |c^n| < 2^{-N} r_{n+1}; the printed
    // orientation |c^{n+1}| < 2^{-N} r_n is reported separately.
    D.evaluated = true;
    D.pass = true;
    for (int n = 0; n + 1 < s; ++n) {
        if (!(c[n].norm2() < sq(half_pow * r[n + 1]))) {
            D.pass = false;
            D.first_violation = n + 1;
            break;
        }
    }
    if (s == 1) D.note = "vacuous for s = 1";

    rep.d_as_printed.evaluated = true;
    rep.d_as_printed.pass = true;
    rep.d_as_printed.note = "|c^{n+1}| < 2^{-N} r_n";
    for (int n = 0; n + 1 < s; ++n) {
        if (!(c[n + 1].norm2() < sq(half_pow * r[n]))) {
            rep.d_as_printed.pass = false;
            rep.d_as_printed.first_violation = n + 1;
            break;
        }
    }

    // E: |c2|/|c1| <= 1/(3^{s+2} s), checked by cross multiplication.
    E.evaluated = true;
    E.pass = true;
    const BigInt slope_den = pow3(s + 2) * s;
    for (int n = 0; n < s; ++n) {
        if (c[n].x1 == 0 || !(rat_abs(c[n].x2) * slope_den <= rat_abs(c[n].x1))) {
            E.pass = false;
            E.first_violation = n + 1;
            break;
        }
    }

    // F: |c^n| < 2^{-N} |c^{n+1}|
    F.evaluated = true;
    F.pass = true;
    for (int n = 0; n + 1 < s; ++n) {
        if (!(c[n].norm2() * pow2(2 * static_cast<unsigned>(scheme.big_n)) < c[n + 1].norm2())) {
            F.pass = false;
            F.first_violation = n + 1;
            break;
        }
    }
    if (s == 1) F.note = "vacuous for s = 1";

    // G: closed balls B(+-c^n, r_n) must avoid both coordinate axes.
    G.evaluated = true;
    G.pass = true;
    for (int n = 0; n < s; ++n) {
        if (!(rat_abs(c[n].x1) > r[n] && rat_abs(c[n].x2) > r[n])) {
            G.pass = false;
            G.first_violation = n + 1;
            break;
        }
    }

    // H: per-coordinate |c^n_i| < 2^{-N} |c^{n+1}_i|
    H.evaluated = true;
    H.pass = true;
    const BigInt pn = pow2(static_cast<unsigned>(scheme.big_n));
    for (int n = 0; n + 1 < s; ++n) {
        if (!(rat_abs(c[n].x1) * pn < rat_abs(c[n + 1].x1) &&
              rat_abs(c[n].x2) * pn < rat_abs(c[n + 1].x2))) {
            H.pass = false;
            H.first_violation = n + 1;
            break;
        }
    }
    if (s == 1) H.note = "vacuous for s = 1";

    // I: every signed sum q with top index k satisfies
    // B(q, r_inner) subset of B(zeta_k c^k, r_k), by direct arithmetic.
    // Operative inner radius: r_1 (the smallest); printed: r_s.
    I.evaluated = true;
    I.pass = true;
    rep.i_as_printed.evaluated = true;
    rep.i_as_printed.pass = true;
    rep.i_as_printed.note = "inner radius r_s";
    if (s > 10) {
        I.evaluated = false;
        I.note = "sign-pattern enumeration skipped for s > 10";
        rep.i_as_printed.evaluated = false;
    } else {
        std::vector<int> zeta(s, -1);
        bool done = false;
        while (!done) {
            int top = -1;
            for (int j = 0; j < s; ++j)
                if (zeta[j] != 0) top = j;
            if (top >= 0) {
                RatVec2 q{0, 0};
                for (int j = 0; j < s; ++j) {
                    if (zeta[j] == 1)
                        q = q + c[j];
                    else if (zeta[j] == -1)
                        q = q - c[j];
                }
                RatVec2 outer = zeta[top] == 1 ? c[top] : RatVec2{-c[top].x1, -c[top].x2};
                const BigRat dist2 = (q - outer).norm2();
                if (I.pass) {
                    const BigRat slack = r[top] - r[0];
                    if (slack < 0 || dist2 > sq(slack)) {
                        I.pass = false;
                        I.first_violation = top + 1;
                    }
                }
                if (rep.i_as_printed.pass) {
                    const BigRat slack = r[top] - r[s - 1];
                    if (slack < 0 || dist2 > sq(slack)) {
                        rep.i_as_printed.pass = false;
                        rep.i_as_printed.first_violation = top + 1;
                    }
                }
            }
            // odometer over {-1,0,1}^s
            int i = 0;
            for (; i < s; ++i) {
                if (zeta[i] < 1) {
                    ++zeta[i];
                    break;
                }
                zeta[i] = -1;
            }
            done = (i == s);
        }
    }

    // A / A': float sampling of the symbol over both balls at each level.
    if (symbol != nullptr) {
        A.evaluated = true;
        A.pass = true;
        const double eps_eff = scheme.epsilon * (1.0 - opts.margin_fraction);
        double worst_all = 0.0;
        for (int k = 1; k <= s; ++k) {
            const LevelTargets tgt = targets_for(scheme.osc_case, k);
            const double cx = to_double(c[k - 1].x1);
            const double cy = to_double(c[k - 1].x2);
            const double rr = to_double(r[k - 1]);
            const double dev_pos =
                ball_max_deviation(*symbol, cx, cy, rr, tgt.pos, opts.ring_angles,
                                   opts.interior_samples, opts.seed ^ (2u * k));
            const double dev_neg =
                ball_max_deviation(*symbol, -cx, -cy, rr, tgt.neg, opts.ring_angles,
                                   opts.interior_samples, opts.seed ^ (2u * k + 1u));
            worst_all = std::max(worst_all, std::max(dev_pos, dev_neg));
            if (std::max(dev_pos, dev_neg) >= eps_eff) {
                A.pass = false;
                A.first_violation = k;
                break;
            }
        }
        std::ostringstream os;
        os << "max sampled |m - target| = " << worst_all << " vs eps " << scheme.epsilon;
        A.note = os.str();
    } else {
        A.evaluated = false;
        A.note = "no symbol supplied";
    }

    return rep;
}

ConditionReport verify_conditions(const IntegerScheme& scheme, const MultiplierSymbol* symbol,
                                  const VerifyOptions& opts) {
    return verify_conditions(to_rational(scheme), symbol, opts);
}

LacunaryScheme construct_scheme(const MultiplierSymbol& symbol, OscCase osc_case, int s,
                                const ConstructOptions& opts) {
    if (s < 1) throw ConfigError("construct_scheme: s must be >= 1");
    if (opts.epsilon <= 0) throw ConfigError("construct_scheme: epsilon must be positive");
    if (opts.big_n < 2) throw ConfigError("construct_scheme: N must be >= 2");

    // The classifier supplies the witness direction and which dyadic parity
    // approaches which limit; when its verdict does not match the requested
    // case we still try the default axis orientation and let the per-level
    // sampling fail honestly.
    const RadialClassification cls = classify_radial(symbol);
    double sign_x = 1.0;
    int par_plus = 0;  // scales 2^{-j}, j == par_plus (mod 2), should give the "+1" value
    if (osc_case == OscCase::IIa && cls.verdict == RadialCase::IIa) {
        if (std::fabs(cls.direction[1]) > 1e-12 ||
            std::fabs(std::fabs(cls.direction[0]) - 1.0) > 1e-12)
            throw ConstructionFailed(
                'E', s, "witness direction is not a coordinate axis; slope condition unattainable");
        sign_x = cls.direction[0] < 0 ? -1.0 : 1.0;
        par_plus = (std::fabs(cls.a - 1.0) <= std::fabs(cls.a + 1.0)) ? cls.parity
                                                                      : (cls.parity ^ 1);
    } else if (osc_case == OscCase::IIb && cls.verdict == RadialCase::IIb) {
        if (std::fabs(cls.direction[1]) > 1e-12 ||
            std::fabs(std::fabs(cls.direction[0]) - 1.0) > 1e-12)
            throw ConstructionFailed(
                'E', s, "witness direction is not a coordinate axis; slope condition unattainable");
        sign_x = cls.direction[0] < 0 ? -1.0 : 1.0;
        // A' wants m ~ 1 on the positive-side balls.
        if (std::fabs(cls.a - 1.0) <= 0.5) {
            par_plus = cls.parity;
        } else if (std::fabs(cls.b - 1.0) <= 0.5) {
            sign_x = -sign_x;
            par_plus = cls.parity;
        } else {
            par_plus = cls.parity;
        }
    }

    // Dyadic slope beta = 2^{-t} <= 1/(2 * 3^{s+2} s) keeps condition E with a
    // factor-2 margin.
    const BigInt slope_bound = 2 * pow3(s + 2) * s;
    const int t = static_cast<int>(bit_length(slope_bound - 1));

    LacunaryScheme scheme;
    scheme.osc_case = osc_case;
    scheme.s = s;
    scheme.big_n = opts.big_n;
    scheme.epsilon = opts.epsilon;
    scheme.symbol_id = symbol.id;
    scheme.centers.assign(s, RatVec2{0, 0});
    scheme.radii.assign(s, BigRat(1));

    const double eps_build = opts.epsilon * 0.9;  // headroom over the verifier margin
    const int N = opts.big_n;
    int j_prev = 0, g_prev = 0;

    for (int k = s; k >= 1; --k) {
        const LevelTargets tgt = targets_for(osc_case, k);
        // Parity of the dyadic exponent this level needs to hit its target.
        int want_parity;
        if (osc_case == OscCase::IIa)
            want_parity = (k % 2 == 0) ? par_plus : (par_plus ^ 1);
        else
            want_parity = par_plus;

        int j_min = (k == s) ? N + t + 4 : std::max(j_prev + N + 1, g_prev + N + 1) + 1;
        if (((j_min % 2) + 2) % 2 != want_parity) ++j_min;

        long evals = 0;
        bool found = false;
        for (int attempt = 0; attempt < 8 && !found; ++attempt) {
            const int j = j_min + 2 * attempt;
            if (j + t + 40 > 980) break;  // keep well inside double range
            RatVec2 c{pow2r(-j), pow2r(-j - t)};
            if (sign_x < 0) c.x1 = -c.x1;
            const double cx = to_double(c.x1);
            const double cy = to_double(c.x2);
            const int g0 = std::max(j + t + 2, (k == s) ? 0 : g_prev + N + 1);
            for (int h = 0; h <= 12 && !found; ++h) {
                const int g = g0 + h;
                const double rr = std::ldexp(1.0, -g);
                if (evals > opts.sampler_budget)
                    throw ConstructionFailed('A', k, "sampler budget exhausted at level " +
                                                         std::to_string(k));
                const double dev_pos = ball_max_deviation(symbol, cx, cy, rr, tgt.pos, 16, 24,
                                                          opts.seed ^ (17u * k + 3u), &evals);
                if (dev_pos >= eps_build) continue;
                const double dev_neg = ball_max_deviation(symbol, -cx, -cy, rr, tgt.neg, 16, 24,
                                                          opts.seed ^ (17u * k + 5u), &evals);
                if (dev_neg >= eps_build) continue;
                scheme.centers[k - 1] = c;
                scheme.radii[k - 1] = pow2r(-g);
                j_prev = j;
                g_prev = g;
                found = true;
            }
        }
        if (!found)
            throw ConstructionFailed(
                'A', k,
                "no center/radius at level " + std::to_string(k) + " brings the symbol within " +
                    std::to_string(opts.epsilon) + " of target " + std::to_string(tgt.pos) +
                    (tgt.pos == tgt.neg ? "" : "/" + std::to_string(tgt.neg)) +
                    " (symbol '" + symbol.id + "')");
    }

    // Defensive self-check: the output must satisfy the full operative set.
    ConditionReport rep = verify_conditions(scheme, &symbol);
    if (!rep.all_pass()) {
        for (const auto& [letter, check] : rep.operative)
            if (check.evaluated && !check.pass)
                throw ConstructionFailed(letter, check.first_violation,
                                         "constructed scheme failed its own verification: " +
                                             rep.summary());
    }
    return scheme;
}

IntegerScheme rescale_to_integers(const LacunaryScheme& scheme, int max_scale_bits) {
    BigInt scale = 1;
    for (const RatVec2& c : scheme.centers) {
        scale = boost::multiprecision::lcm(scale, denom(BigRat(c.x1)));
        scale = boost::multiprecision::lcm(scale, denom(BigRat(c.x2)));
    }
    if (static_cast<int>(bit_length(scale)) > max_scale_bits) {
        throw ScaleOverflow("common denominator needs " + std::to_string(bit_length(scale)) +
                            " bits, cap is " + std::to_string(max_scale_bits));
    }
    IntegerScheme out;
    out.scale = scale;
    out.osc_case = scheme.osc_case;
    out.s = scheme.s;
    out.big_n = scheme.big_n;
    out.epsilon = scheme.epsilon;
    out.symbol_id = scheme.symbol_id;
    out.centers.reserve(scheme.centers.size());
    for (const RatVec2& c : scheme.centers) {
        BigRat x = c.x1 * scale, y = c.x2 * scale;
        Frequency q{numer(x), numer(y)};
        out.centers.push_back(q);
    }
    for (const BigRat& r : scheme.radii) out.radii.push_back(r * scale);
    return out;
}

LacunaryScheme to_rational(const IntegerScheme& scheme) {
    LacunaryScheme out;
    out.osc_case = scheme.osc_case;
    out.s = scheme.s;
    out.big_n = scheme.big_n;
    out.epsilon = scheme.epsilon;
    out.symbol_id = scheme.symbol_id;
    for (const Frequency& q : scheme.centers)
        out.centers.push_back(RatVec2{BigRat(q.k1, scheme.scale), BigRat(q.k2, scheme.scale)});
    for (const BigRat& r : scheme.radii) out.radii.push_back(r / scheme.scale);
    return out;
}

std::vector<Frequency> lambda_points(const IntegerScheme& scheme) {
    SumSet set = SumSet::build(scheme.centers);
    std::vector<Frequency> out;
    out.reserve(set.size());
    for (const auto& [q, rep] : set.points()) out.push_back(q);
    return out;
}

std::string scheme_to_json(const IntegerScheme& scheme) {
    nlohmann::json j;
    j["format"] = "rieszlab-scheme/1";
    j["scale"] = scheme.scale.str();
    j["case"] = to_string(scheme.osc_case);
    j["s"] = scheme.s;
    j["N"] = scheme.big_n;
    j["epsilon"] = scheme.epsilon;
    j["symbol"] = scheme.symbol_id;
    nlohmann::json centers = nlohmann::json::array();
    for (const Frequency& q : scheme.centers)
        centers.push_back({q.k1.str(), q.k2.str()});
    j["centers"] = std::move(centers);
    nlohmann::json radii = nlohmann::json::array();
    for (const BigRat& r : scheme.radii)
        radii.push_back({numer(r).str(), denom(r).str()});
    j["radii"] = std::move(radii);
    return j.dump(2);
}

IntegerScheme scheme_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("scheme JSON parse error: ") + e.what());
    }
    try {
        if (j.at("format") != "rieszlab-scheme/1")
            throw ConfigError("unknown scheme format tag");
        IntegerScheme out;
        out.scale = BigInt(j.at("scale").get<std::string>());
        out.osc_case = osc_case_from_string(j.at("case").get<std::string>());
        out.s = j.at("s").get<int>();
        out.big_n = j.at("N").get<int>();
        out.epsilon = j.at("epsilon").get<double>();
        out.symbol_id = j.at("symbol").get<std::string>();
        for (const auto& c : j.at("centers"))
            out.centers.push_back(
                Frequency{BigInt(c.at(0).get<std::string>()), BigInt(c.at(1).get<std::string>())});
        for (const auto& r : j.at("radii"))
            out.radii.push_back(
                BigRat(BigInt(r.at(0).get<std::string>()), BigInt(r.at(1).get<std::string>())));
        if (out.centers.size() != static_cast<size_t>(out.s) ||
            out.radii.size() != static_cast<size_t>(out.s))
            throw ConfigError("scheme JSON: centers/radii length disagrees with s");
        return out;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("scheme JSON field error: ") + e.what());
    }
}

}  // namespace rieszlab
