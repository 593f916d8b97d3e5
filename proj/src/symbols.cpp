#include "rieszlab/symbols.hpp"

#include "rieszlab/errors.hpp"
#include "rieszlab/numeric.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <memory>
#include <sstream>

namespace rieszlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

double hypot2(double x, double y) { return std::sqrt(x * x + y * y); }

}  // namespace

const std::vector<MultiplierSymbol>& symbol_catalog() {
    static const std::vector<MultiplierSymbol> cat = [] {
        std::vector<MultiplierSymbol> v;

        MultiplierSymbol gauss;
        gauss.id = "gaussian";
        gauss.eval = [](double x1, double x2) {
            return std::complex<double>(std::exp(-(x1 * x1 + x2 * x2)), 0.0);
        };
        gauss.declared_class = SymbolClass::Continuous;
        gauss.sup_norm_hint = 1.0;
        gauss.description = "exp(-|xi|^2), smooth control with full limit 1 at the origin";
        v.push_back(std::move(gauss));

        MultiplierSymbol r1;
        r1.id = "riesz1";
        r1.eval = [](double x1, double x2) {
            return std::complex<double>(x1 / hypot2(x1, x2), 0.0);
        };
        r1.is_singular = [](double x1, double x2) { return x1 == 0.0 && x2 == 0.0; };
        r1.declared_class = SymbolClass::Homogeneous0;
        r1.sup_norm_hint = 1.0;
        r1.description = "xi1/|xi|, homogeneous of degree 0 with nonconstant radial limit";
        v.push_back(std::move(r1));

        MultiplierSymbol rp;
        rp.id = "riesz_prod";
        rp.eval = [](double x1, double x2) {
            return std::complex<double>(x1 * x2 / (x1 * x1 + x2 * x2), 0.0);
        };
        rp.is_singular = [](double x1, double x2) { return x1 == 0.0 && x2 == 0.0; };
        rp.declared_class = SymbolClass::Homogeneous0;
        rp.sup_norm_hint = 0.5;
        rp.description = "xi1*xi2/|xi|^2, homogeneous of degree 0";
        v.push_back(std::move(rp));

        MultiplierSymbol dc;
        dc.id = "dyadic_cos";
        dc.eval = [](double x1, double /*x2*/) {
            return std::complex<double>(std::cos(kPi * std::log2(std::fabs(x1))), 0.0);
        };
        dc.is_singular = [](double x1, double /*x2*/) { return x1 == 0.0; };
        dc.declared_class = SymbolClass::OscillatorySymmetric;
        dc.sup_norm_hint = 1.0;
        dc.description = "cos(pi*log2|xi1|): +1 at even dyadic scales, -1 at odd, even in xi";
        v.push_back(std::move(dc));

        MultiplierSymbol ds;
        ds.id = "dyadic_step";
        ds.eval = [](double x1, double x2) {
            const double sgn = x1 / hypot2(x1, x2);
            return std::complex<double>(
                0.5 * (1.0 + sgn * std::cos(kPi * std::log2(std::fabs(x1)))), 0.0);
        };
        ds.is_singular = [](double x1, double /*x2*/) { return x1 == 0.0; };
        ds.declared_class = SymbolClass::OscillatoryAsymmetric;
        ds.sup_norm_hint = 1.0;
        ds.description =
            "(1 + (xi1/|xi|)cos(pi*log2|xi1|))/2: along even dyadic scales 1 on the "
            "positive side, 0 on the negative";
        v.push_back(std::move(ds));

        return v;
    }();
    return cat;
}

const MultiplierSymbol* find_symbol(const std::string& id) {
    for (const auto& s : symbol_catalog())
        if (s.id == id) return &s;
    return nullptr;
}

// --- expression symbols --------------------------------------------------------

namespace {

struct ExprNode {
    enum Kind { Num, X1, X2, Add, Sub, Mul, Div, Neg, Abs, Cos, Sin, Exp, Log, Log2, Sqrt, Sign };
    Kind kind;
    double value = 0.0;
    std::unique_ptr<ExprNode> lhs, rhs;

    double eval(double x1, double x2) const {
        switch (kind) {
            case Num: return value;
            case X1: return x1;
            case X2: return x2;
            case Add: return lhs->eval(x1, x2) + rhs->eval(x1, x2);
            case Sub: return lhs->eval(x1, x2) - rhs->eval(x1, x2);
            case Mul: return lhs->eval(x1, x2) * rhs->eval(x1, x2);
            case Div: return lhs->eval(x1, x2) / rhs->eval(x1, x2);
            case Neg: return -lhs->eval(x1, x2);
            case Abs: return std::fabs(lhs->eval(x1, x2));
            case Cos: return std::cos(lhs->eval(x1, x2));
            case Sin: return std::sin(lhs->eval(x1, x2));
            case Exp: return std::exp(lhs->eval(x1, x2));
            case Log: return std::log(lhs->eval(x1, x2));
            case Log2: return std::log2(lhs->eval(x1, x2));
            case Sqrt: return std::sqrt(lhs->eval(x1, x2));
            case Sign: {
                double t = lhs->eval(x1, x2);
                return t > 0 ? 1.0 : (t < 0 ? -1.0 : 0.0);
            }
        }
        return 0.0;
    }
};

using NodePtr = std::unique_ptr<ExprNode>;

NodePtr make_node(ExprNode::Kind k, NodePtr l = nullptr, NodePtr r = nullptr) {
    auto n = std::make_unique<ExprNode>();
    n->kind = k;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
}

class ExprParser {
  public:
    explicit ExprParser(const std::string& src) : src_(src) {}

    NodePtr parse() {
        auto e = expr();
        skip_ws();
        if (pos_ != src_.size()) fail("trailing input");
        return e;
    }

  private:
    const std::string& src_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) {
        std::ostringstream os;
        os << "symbol expression error at offset " << pos_ << ": " << what;
        throw ConfigError(os.str());
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }
    bool consume(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        auto lhs = term();
        for (;;) {
            if (consume('+'))
                lhs = make_node(ExprNode::Add, std::move(lhs), term());
            else if (consume('-'))
                lhs = make_node(ExprNode::Sub, std::move(lhs), term());
            else
                return lhs;
        }
    }

    NodePtr term() {
        auto lhs = unary();
        for (;;) {
            if (consume('*'))
                lhs = make_node(ExprNode::Mul, std::move(lhs), unary());
            else if (consume('/'))
                lhs = make_node(ExprNode::Div, std::move(lhs), unary());
            else
                return lhs;
        }
    }

    NodePtr unary() {
        if (consume('-')) return make_node(ExprNode::Neg, unary());
        if (consume('+')) return unary();
        return primary();
    }

    NodePtr primary() {
        char c = peek();
        if (c == '(') {
            ++pos_;
            auto inner = expr();
            if (!consume(')')) fail("expected ')'");
            return inner;
        }
        if (c == '|') {
            ++pos_;
            auto inner = expr();
            if (!consume('|')) fail("expected closing '|'");
            return make_node(ExprNode::Abs, std::move(inner));
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return word();
        fail("expected a value");
    }

    NodePtr number() {
        skip_ws();
        size_t end = pos_;
        while (end < src_.size() &&
               (std::isdigit(static_cast<unsigned char>(src_[end])) || src_[end] == '.' ||
                src_[end] == 'e' || src_[end] == 'E' ||
                ((src_[end] == '+' || src_[end] == '-') && end > pos_ &&
                 (src_[end - 1] == 'e' || src_[end - 1] == 'E'))))
            ++end;
        auto n = make_node(ExprNode::Num);
        try {
            n->value = std::stod(src_.substr(pos_, end - pos_));
        } catch (const std::exception&) {
            fail("bad numeric literal");
        }
        pos_ = end;
        return n;
    }

    NodePtr word() {
        skip_ws();
        size_t end = pos_;
        while (end < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[end])) ||
                                     src_[end] == '_'))
            ++end;
        std::string w = src_.substr(pos_, end - pos_);
        pos_ = end;
        if (w == "x1" || w == "x") return make_node(ExprNode::X1);
        if (w == "x2" || w == "y") return make_node(ExprNode::X2);
        if (w == "pi") {
            auto n = make_node(ExprNode::Num);
            n->value = kPi;
            return n;
        }
        static const std::map<std::string, ExprNode::Kind> funcs = {
            {"abs", ExprNode::Abs},   {"cos", ExprNode::Cos},   {"sin", ExprNode::Sin},
            {"exp", ExprNode::Exp},   {"log", ExprNode::Log},   {"log2", ExprNode::Log2},
            {"sqrt", ExprNode::Sqrt}, {"sign", ExprNode::Sign}};
        auto it = funcs.find(w);
        if (it == funcs.end()) fail("unknown name '" + w + "'");
        if (!consume('(')) fail("expected '(' after '" + w + "'");
        auto arg = expr();
        if (!consume(')')) fail("expected ')'");
        return make_node(it->second, std::move(arg));
    }
};

}  // namespace

MultiplierSymbol parse_symbol_expression(const std::string& source) {
    auto root = std::shared_ptr<ExprNode>(ExprParser(source).parse().release());
    MultiplierSymbol sym;
    sym.id = "expr:" + source;
    sym.eval = [root](double x1, double x2) {
        return std::complex<double>(root->eval(x1, x2), 0.0);
    };
    sym.declared_class = SymbolClass::Custom;
    sym.description = "expression-defined symbol";
    return sym;
}

MultiplierSymbol resolve_symbol(const std::string& spec) {
    if (spec.rfind("expr:", 0) == 0) return parse_symbol_expression(spec.substr(5));
    if (const MultiplierSymbol* s = find_symbol(spec)) return *s;
    throw ConfigError("unknown symbol '" + spec + "' (not a catalog id or expr:...)");
}

// --- radial classification -----------------------------------------------------

namespace {

struct TailStats {
    bool finite = true;
    double spread = 0.0;
    double mean = 0.0;
};

TailStats tail_stats(const std::vector<double>& xs) {
    TailStats t;
    if (xs.empty()) {
        t.finite = false;
        return t;
    }
    double lo = xs[0], hi = xs[0], sum = 0.0;
    for (double x : xs) {
        if (!std::isfinite(x)) {
            t.finite = false;
            return t;
        }
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        sum += x;
    }
    t.spread = hi - lo;
    t.mean = sum / static_cast<double>(xs.size());
    return t;
}

std::vector<double> tail(const std::vector<double>& xs, size_t want) {
    size_t n = xs.size();
    size_t k = std::min(want, n);
    return std::vector<double>(xs.end() - static_cast<long>(k), xs.end());
}

std::vector<double> parity_slice(const std::vector<double>& xs, int j0, int parity) {
    std::vector<double> out;
    for (size_t i = 0; i < xs.size(); ++i)
        if ((j0 + static_cast<int>(i)) % 2 == parity) out.push_back(xs[i]);
    return out;
}

}  // namespace

RadialClassification classify_radial(const MultiplierSymbol& symbol, int direction_count,
                                     int scale_depth, double tol) {
    RadialClassification out;
    if (direction_count < 1) direction_count = 1;
    const int j0 = std::max(4, scale_depth - 36);
    const double gap = 10.0 * tol;

    bool any_usable = false;
    bool all_star = true;
    std::vector<double> omega_values;

    for (int d = 0; d < direction_count && out.verdict == RadialCase::Inconclusive; ++d) {
        const double phi = kPi * static_cast<double>(d) / static_cast<double>(direction_count);
        double v1 = std::cos(phi), v2 = std::sin(phi);
        if (d == 0) v1 = 1.0, v2 = 0.0;
        if (2 * d == direction_count) v1 = 0.0, v2 = 1.0;

        DirectionReport rep;
        rep.v = {v1, v2};
        std::vector<double> pos, neg;
        bool usable = true;
        for (int j = j0; j <= scale_depth && usable; ++j) {
            const double t = std::ldexp(1.0, -j);
            if (symbol.singular_at(t * v1, t * v2) || symbol.singular_at(-t * v1, -t * v2)) {
                usable = false;
                break;
            }
            const double mp = symbol.eval(t * v1, t * v2).real();
            const double mn = symbol.eval(-t * v1, -t * v2).real();
            if (!std::isfinite(mp) || !std::isfinite(mn)) {
                usable = false;
                break;
            }
            pos.push_back(mp);
            neg.push_back(mn);
        }
        rep.usable = usable;
        if (!usable) {
            out.directions.push_back(rep);
            continue;
        }
        any_usable = true;

        const size_t tail_len = 12;
        TailStats tp = tail_stats(tail(pos, tail_len));
        TailStats tn = tail_stats(tail(neg, tail_len));
        if (tp.finite && tn.finite && tp.spread < tol && tn.spread < tol) {
            rep.converges_pos = rep.converges_neg = true;
            rep.limit_pos = tp.mean;
            rep.limit_neg = tn.mean;
            out.directions.push_back(rep);
            omega_values.push_back(tp.mean);
            omega_values.push_back(tn.mean);
            continue;
        }

        // No per-ray limit: look for a two-value oscillation on dyadic parity.
        TailStats pe = tail_stats(tail(parity_slice(pos, j0, 0), 6));
        TailStats po = tail_stats(tail(parity_slice(pos, j0, 1), 6));
        TailStats ne = tail_stats(tail(parity_slice(neg, j0, 0), 6));
        TailStats no = tail_stats(tail(parity_slice(neg, j0, 1), 6));
        const bool split_ok = pe.finite && po.finite && ne.finite && no.finite &&
                              pe.spread < tol && po.spread < tol && ne.spread < tol &&
                              no.spread < tol;
        out.directions.push_back(rep);
        if (!split_ok) {
            all_star = false;
            out.note = "oscillation without a stable dyadic-parity pattern";
            continue;
        }
        const bool symmetric = std::fabs(pe.mean - ne.mean) < gap &&
                               std::fabs(po.mean - no.mean) < gap;
        const bool oscillates = std::fabs(pe.mean - po.mean) >= gap;
        if (symmetric && oscillates) {
            out.verdict = RadialCase::IIa;
            out.direction = {v1, v2};
            out.parity = 0;
            out.a = pe.mean;
            out.b = po.mean;
            return out;
        }
        if (std::fabs(pe.mean - ne.mean) >= gap) {
            out.verdict = RadialCase::IIb;
            out.direction = {v1, v2};
            out.parity = 0;
            out.a = pe.mean;
            out.b = ne.mean;
            return out;
        }
        if (std::fabs(po.mean - no.mean) >= gap) {
            out.verdict = RadialCase::IIb;
            out.direction = {v1, v2};
            out.parity = 1;
            out.a = po.mean;
            out.b = no.mean;
            return out;
        }
        all_star = false;
        out.note = "parity pattern neither symmetric-oscillatory nor asymmetric";
    }

    if (out.verdict == RadialCase::Inconclusive && any_usable && all_star) {
        out.verdict = RadialCase::StarCondition;
        TailStats os = tail_stats(omega_values);
        out.omega_constant = os.finite && os.spread < gap;
        if (!out.omega_constant)
            out.note = "nonconstant radial-limit profile (homogeneous-type obstruction)";
    }
    return out;
}

// --- probe / lattice sampling ---------------------------------------------------

std::vector<ProbeRow> sup_norm_probe(const MultiplierSymbol& symbol, std::array<double, 2> xi0,
                                     const TestProfile& profile, const std::vector<double>& lambdas) {
    const double m0 = std::abs(symbol.eval(xi0[0], xi0[1]));
    const double num = 2.0 * kPi * m0 * profile.hat_f0;
    std::vector<ProbeRow> rows;
    rows.reserve(lambdas.size());
    for (double lam : lambdas) {
        ProbeRow r;
        r.lambda = lam;
        r.ratio = lam == 0.0 ? m0 : num / (2.0 * kPi * profile.hat_f0 + lam * profile.grad_l1);
        rows.push_back(r);
    }
    return rows;
}

std::map<Frequency, std::complex<double>> deleeuw_sample(const MultiplierSymbol& symbol,
                                                         double eps_scale,
                                                         const std::vector<Frequency>& window) {
    std::map<Frequency, std::complex<double>> out;
    for (const Frequency& n : window) {
        const double x1 = eps_scale * to_double(n.k1);
        const double x2 = eps_scale * to_double(n.k2);
        if (symbol.singular_at(x1, x2))
            throw SampleOnSingularity("lattice point (" + n.str() + ") scaled by " +
                                      std::to_string(eps_scale) +
                                      " lies on the declared singular locus of '" + symbol.id +
                                      "'");
        out[n] = symbol.eval(x1, x2);
    }
    return out;
}

std::complex<double> symbol_at(const MultiplierSymbol& symbol, const RatVec2& point) {
    const double x1 = to_double(point.x1);
    const double x2 = to_double(point.x2);
    if (symbol.singular_at(x1, x2))
        throw SampleOnSingularity("point on the declared singular locus of '" + symbol.id + "'");
    return symbol.eval(x1, x2);
}

}  // namespace rieszlab
