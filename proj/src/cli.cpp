#include "qlu/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qlu/hypergroup.hpp"
#include "qlu/lufact.hpp"

namespace qlu::cli {

namespace {

using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Family { littleqjacobi, little0jacobi, qhahn, zerohahn };

const std::map<std::string, Family> kFamilies{{"littleqjacobi", Family::littleqjacobi},
                                              {"little0jacobi", Family::little0jacobi},
                                              {"qhahn", Family::qhahn},
                                              {"zerohahn", Family::zerohahn}};

const std::vector<std::string> kSuites{"orthogonality", "methods", "limits", "lu", "product", "padic", "all"};

/// Window of the convolution algebra checks.
constexpr long kAlgebraWindow = 32;
/// Grid for the N -> infinity comparison.
constexpr long kLargeN = 40;
constexpr double kLargeNBound = 1e-9;
/// Size cap for the float inverse checks; larger sizes run exactly only.
constexpr long kFloatInverseSize = 10;

struct Config {
    std::string command;
    std::string family_name = "littleqjacobi";
    Family family = Family::littleqjacobi;
    std::optional<std::string> a;
    std::optional<std::string> b;
    std::optional<std::string> q;
    long N = 4;
    std::optional<long> n_max;
    std::optional<long> x_max;
    std::optional<std::string> method;
    double tol = 1e-10;
    std::optional<std::string> precision;
    long cutoff = 30;
    std::string format = "csv";
    std::uint64_t seed = 0;
    long draws = 0;
    bool relaxed = false;
    std::optional<long> p;
    long r = 1;
    long d = 2;
    long m = 1;
    std::string suite = "all";

    bool rational() const
    {
        if (precision && *precision == "rational")
            return true;
        for (const auto& s : {a, b, q})
            if (s && is_fraction_literal(*s))
                return true;
        return false;
    }
};

// ---------------------------------------------------------------------------
// Formatting
// ---------------------------------------------------------------------------

json to_json(const Rational& v) { return to_string(v); }
json to_json(double v) { return v; }

std::string to_text(const Rational& v) { return to_string(v); }
std::string to_text(double v) { return to_string(v); }

/// Residuals are doubles in both modes; rational mode keeps exact zeros exact.
template <class T>
json residual_json(double v)
{
    if constexpr (is_exact_v<T>)
        return to_string(v);
    else
        return v;
}

template <class T>
T parse_scalar(const std::string& text, const char* what)
{
    try {
        return from_rational<T>(parse_rational(text));
    } catch (const std::exception& e) {
        throw UsageError(std::string("cannot parse --") + what + " '" + text + "': " + e.what());
    }
}

template <class T>
T parse_or(const std::optional<std::string>& text, const char* what, const char* fallback)
{
    return parse_scalar<T>(text ? *text : std::string(fallback), what);
}

template <class T>
T require(const std::optional<std::string>& text, const char* what)
{
    if (!text)
        throw UsageError(std::string("--") + what + " is required for this command");
    return parse_scalar<T>(*text, what);
}

bool is_q_family(Family f) { return f == Family::littleqjacobi || f == Family::qhahn; }
bool is_hahn_family(Family f) { return f == Family::qhahn || f == Family::zerohahn; }

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct Ranges {
    long n_max;
    long x_max;
};

Ranges eval_ranges(const Config& cfg)
{
    const long fallback = is_hahn_family(cfg.family) ? cfg.N : 4;
    Ranges r{cfg.n_max.value_or(fallback), cfg.x_max.value_or(fallback)};
    if (r.n_max < 0 || r.x_max < 0)
        throw UsageError("--n-max and --x-max must be nonnegative");
    if (is_hahn_family(cfg.family) && (r.n_max > cfg.N || r.x_max > cfg.N))
        throw UsageError("--n-max and --x-max must not exceed --N for finite families");
    return r;
}

template <class T>
json params_json(const Config& cfg, const T& a, const T& b, const T& q)
{
    json p{{"a", to_json(a)}, {"b", to_json(b)}, {"q", to_json(q)}};
    if (is_hahn_family(cfg.family))
        p["N"] = cfg.N;
    return p;
}

template <class T>
int cmd_eval(const Config& cfg, std::ostream& out)
{
    const T a = require<T>(cfg.a, "a");
    const T b = require<T>(cfg.b, "b");
    const T q = is_q_family(cfg.family) ? parse_or<T>(cfg.q, "q", "1/2") : T(0);
    const Ranges rg = eval_ranges(cfg);

    std::function<T(long, long)> value;
    std::string method_name = "closed";
    switch (cfg.family) {
    case Family::littleqjacobi: {
        const LittleQJacobiParams<T> p{a, b, q, cfg.relaxed};
        p.validate();
        const JacobiMethod m = parse_jacobi_method(cfg.method.value_or("lu_series"));
        method_name = to_string(m);
        value = [p, m](long n, long x) { return little_qjacobi(n, GridPoint::at(x), p, m); };
        break;
    }
    case Family::little0jacobi: {
        LittleQJacobiParams<T>{a, b, T(0), cfg.relaxed}.validate();
        value = [a, b](long n, long x) { return little_0jacobi(n, GridPoint::at(x), a, b); };
        break;
    }
    case Family::qhahn: {
        const QHahnParams<T> p{a, b, cfg.N, q, cfg.relaxed};
        p.validate();
        const HahnMethod m = parse_hahn_method(cfg.method.value_or("lu_series"));
        method_name = to_string(m);
        value = [p, m](long n, long x) { return qhahn(n, x, p, m); };
        break;
    }
    case Family::zerohahn: {
        QHahnParams<T>{a, b, cfg.N, T(0), cfg.relaxed}.validate();
        const long N = cfg.N;
        value = [a, b, N](long n, long x) { return zero_hahn(n, x, a, b, N); };
        break;
    }
    }

    if (cfg.format == "csv") {
        out << "n,x,value,method\n";
        for (long n = 0; n <= rg.n_max; ++n)
            for (long x = 0; x <= rg.x_max; ++x)
                out << n << ',' << x << ',' << to_text(value(n, x)) << ',' << method_name << '\n';
        return kPass;
    }
    json rows = json::array();
    for (long n = 0; n <= rg.n_max; ++n)
        for (long x = 0; x <= rg.x_max; ++x)
            rows.push_back({{"n", n}, {"x", x}, {"value", to_json(value(n, x))}});
    json doc{{"command", "eval"},
             {"family", cfg.family_name},
             {"precision", scalar_traits<T>::name},
             {"params", params_json(cfg, a, b, q)},
             {"method", method_name},
             {"rows", rows}};
    out << doc.dump(2) << '\n';
    return kPass;
}

// ---------------------------------------------------------------------------
// factor
// ---------------------------------------------------------------------------

template <class T>
json matrix_json(const TriangularMatrix<T>& m)
{
    json rows = json::array();
    for (std::size_t i = 0; i < m.size(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.size(); ++j)
            row.push_back(to_json(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

template <class T>
void matrix_csv(std::ostream& out, const char* name, const TriangularMatrix<T>& m)
{
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j)
            if (m.in_structure(i, j))
                out << name << ',' << i << ',' << j << ',' << to_text(m(i, j)) << '\n';
}

template <class T>
bool within(double residual, double tol)
{
    if constexpr (is_exact_v<T>)
        return residual == 0;
    else
        return residual <= tol;
}

template <class T>
int cmd_factor(const Config& cfg, std::ostream& out)
{
    const T a = require<T>(cfg.a, "a");
    const T b = require<T>(cfg.b, "b");
    const T q = is_q_family(cfg.family) ? parse_or<T>(cfg.q, "q", "1/2") : T(0);
    if (cfg.cutoff < 0)
        throw UsageError("--cutoff must be nonnegative");
    const std::size_t size = static_cast<std::size_t>(is_hahn_family(cfg.family) ? cfg.N + 1 : cfg.cutoff + 1);

    json doc{{"command", "factor"},
             {"family", cfg.family_name},
             {"precision", scalar_traits<T>::name},
             {"params", params_json(cfg, a, b, q)},
             {"size", size}};

    if (q == 0) {
        // the dual grid degenerates; emit the q = 0 factors of the little 0-Jacobi matrix
        if (is_hahn_family(cfg.family))
            QHahnParams<T>{a, b, cfg.N, T(0), cfg.relaxed}.validate();
        const NormalizedLU<T> lu = zero_lu(a, b, size);
        double residual = 0;
        for (std::size_t n = 0; n < size; ++n)
            for (std::size_t x = 0; x < size; ++x) {
                T s(0);
                for (std::size_t k = 0; k <= std::min(n, x); ++k)
                    s += lu.L(n, k) * lu.U(k, x);
                residual = std::max(
                    residual, abs_diff(s, little_0jacobi(static_cast<long>(n), GridPoint::at(static_cast<long>(x)), a, b)));
            }
        const bool pass = within<T>(residual, cfg.tol);
        if (cfg.format == "csv") {
            out << "matrix,row,col,value\n";
            matrix_csv(out, "L0", lu.L);
            matrix_csv(out, "U0", lu.U);
            out << "residual,,," << to_string(residual) << '\n';
        } else {
            doc["L0"] = matrix_json(lu.L);
            doc["U0"] = matrix_json(lu.U);
            doc["residual"] = residual_json<T>(residual);
            doc["pass"] = pass;
            out << doc.dump(2) << '\n';
        }
        return pass ? kPass : kCheckFailure;
    }

    OrthogonalSystem<T> sys;
    DeltaMethod dm = DeltaMethod::limit_formula;
    if (cfg.method) {
        static const std::map<std::string, DeltaMethod> names{{"limit_formula", DeltaMethod::limit_formula},
                                                              {"closed_jacobi", DeltaMethod::closed_jacobi},
                                                              {"closed_hahn", DeltaMethod::closed_hahn},
                                                              {"sixphi4", DeltaMethod::sixphi4}};
        auto it = names.find(*cfg.method);
        if (it == names.end())
            throw UsageError("unknown delta method '" + *cfg.method + "'");
        dm = it->second;
    }
    if (cfg.family == Family::qhahn)
        sys = build_system(QHahnParams<T>{a, b, cfg.N, q, cfg.relaxed});
    else
        sys = build_system(LittleQJacobiParams<T>{a, b, q, cfg.relaxed}, cfg.cutoff);
    const Factorization<T> f = factor(sys, dm);
    const bool pass = within<T>(f.residual, cfg.tol);

    if (cfg.format == "csv") {
        out << "matrix,row,col,value\n";
        matrix_csv(out, "B", f.B);
        for (std::size_t k = 0; k < f.D.size(); ++k)
            out << "D," << k << ',' << k << ',' << to_text(f.D[k]) << '\n';
        matrix_csv(out, "C", f.C);
        out << "residual,,," << to_string(f.residual) << '\n';
        out << "expansion_residual,,," << to_string(f.expansion_residual) << '\n';
    } else {
        json D = json::array();
        for (const T& v : f.D)
            D.push_back(to_json(v));
        doc["delta_method"] = std::string(to_string(dm));
        doc["B"] = matrix_json(f.B);
        doc["D"] = D;
        doc["C"] = matrix_json(f.C);
        doc["residual"] = residual_json<T>(f.residual);
        doc["expansion_residual"] = residual_json<T>(f.expansion_residual);
        if (cfg.family != Family::qhahn) {
            // residuals of the truncated system at doubling cutoffs; reported, not asserted
            json curve = json::array();
            for (long c = 1; c < cfg.cutoff; c *= 2) {
                const Factorization<T> g =
                    factor(build_system(LittleQJacobiParams<T>{a, b, q, cfg.relaxed}, c), dm);
                curve.push_back({{"cutoff", c},
                                 {"residual", residual_json<T>(g.residual)},
                                 {"expansion_residual", residual_json<T>(g.expansion_residual)}});
            }
            curve.push_back({{"cutoff", cfg.cutoff},
                             {"residual", residual_json<T>(f.residual)},
                             {"expansion_residual", residual_json<T>(f.expansion_residual)}});
            doc["cutoff_curve"] = curve;
        }
        doc["pass"] = pass;
        out << doc.dump(2) << '\n';
    }
    return pass ? kPass : kCheckFailure;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct GridPointParams {
    Rational a;
    Rational b;
    Rational q;
    long N;
};

/// Raw mt19937_64 output keeps draws identical across standard libraries.
class Drawer {
public:
    explicit Drawer(std::uint64_t seed) : rng_(seed) {}

    long uniform(long lo, long hi) { return lo + static_cast<long>(rng_() % static_cast<std::uint64_t>(hi - lo + 1)); }

    /// num/den in (0,1), den <= 16
    Rational unit()
    {
        const long den = uniform(2, 16);
        Rational v(uniform(1, den - 1), den);
        v.canonicalize();
        return v;
    }

    /// num/den in [-1,1), den <= 16
    Rational below_one()
    {
        const long den = uniform(1, 16);
        Rational v(uniform(-den, den - 1), den);
        v.canonicalize();
        return v;
    }

private:
    std::mt19937_64 rng_;
};

std::vector<GridPointParams> family_grid(const Config& cfg)
{
    std::vector<GridPointParams> grid;
    if (cfg.a) {
        if (!cfg.b)
            throw UsageError("--b is required together with --a");
        grid.push_back({parse_scalar<Rational>(*cfg.a, "a"), parse_scalar<Rational>(*cfg.b, "b"),
                        parse_scalar<Rational>(cfg.q.value_or("1/2"), "q"), cfg.N});
    }
    Drawer draw(cfg.seed);
    for (long i = 0; i < cfg.draws; ++i) {
        GridPointParams g;
        g.a = draw.unit();
        g.b = draw.below_one();
        g.q = draw.unit();
        g.N = draw.uniform(1, 8);
        grid.push_back(g);
    }
    return grid;
}

std::vector<PadicParams> padic_grid(const Config& cfg)
{
    std::vector<PadicParams> grid;
    if (cfg.p)
        grid.push_back({*cfg.p, cfg.r, cfg.d, cfg.m});
    // a separate stream so that adding the padic suite does not shift other draws
    Drawer draw(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    static const long primes[] = {2, 3, 5, 7, 11, 13};
    for (long i = 0; i < cfg.draws; ++i) {
        PadicParams pp;
        pp.p = primes[draw.uniform(0, 5)];
        pp.r = draw.uniform(1, 3);
        pp.d = draw.uniform(2, 6);
        pp.m = draw.uniform(1, pp.d - 1);
        grid.push_back(pp);
    }
    return grid;
}

class Report {
public:
    explicit Report(bool exact) : exact_(exact) {}

    void add(const std::string& suite, const json& params, const std::string& check,
             const std::function<std::pair<double, double>()>& run)
    {
        json rec{{"suite", suite}, {"params", params}, {"check", check}};
        try {
            auto [residual, bound] = run();
            const bool pass = residual <= bound;
            rec["residual"] = exact_ ? json(to_string(residual)) : json(residual);
            rec["bound"] = bound;
            rec["pass"] = pass;
            all_pass_ = all_pass_ && pass;
        } catch (const std::exception& e) {
            rec["residual"] = nullptr;
            rec["bound"] = nullptr;
            rec["pass"] = false;
            rec["error"] = e.what();
            all_pass_ = false;
        }
        records_.push_back(std::move(rec));
    }

    const json& records() const { return records_; }
    bool pass() const { return all_pass_; }

private:
    bool exact_;
    json records_ = json::array();
    bool all_pass_ = true;
};

template <class T>
json point_json(const GridPointParams& g)
{
    return json{{"a", to_json(from_rational<T>(g.a))},
                {"b", to_json(from_rational<T>(g.b))},
                {"q", to_json(from_rational<T>(g.q))},
                {"N", g.N}};
}

/// Bound used by identity-style checks: exact zero in rational mode.
template <class T>
double exact_or(double tol)
{
    return is_exact_v<T> ? 0.0 : tol;
}

template <class T>
void suite_orthogonality(Report& rep, const Config& cfg, const GridPointParams& g, long n_max)
{
    const T a = from_rational<T>(g.a), b = from_rational<T>(g.b), q = from_rational<T>(g.q);
    const json pj = point_json<T>(g);
    const double tol = cfg.tol;
    rep.add("orthogonality", pj, "little_qjacobi", [&] {
        const LittleQJacobiParams<T> p{a, b, q, cfg.relaxed};
        double worst = 0;
        for (long m = 0; m <= n_max; ++m)
            for (long n = 0; n <= n_max; ++n) {
                const OrthogonalityResult r = verify_orthogonality(p, m, n, tol);
                worst = std::max(worst, r.residual + r.tail_bound);
            }
        return std::pair{worst, tol};
    });
    rep.add("orthogonality", pj, "little_0jacobi", [&] {
        const LittleQJacobiParams<T> p{a, b, T(0), cfg.relaxed};
        double worst = 0;
        for (long m = 0; m <= n_max; ++m)
            for (long n = 0; n <= n_max; ++n)
                worst = std::max(worst, verify_orthogonality(p, m, n, tol).residual);
        return std::pair{worst, exact_or<T>(tol)};
    });
    for (const T& qq : {q, T(0)}) {
        rep.add("orthogonality", pj, qq == 0 ? "zero_hahn" : "qhahn", [&] {
            const QHahnParams<T> p{a, b, g.N, qq, cfg.relaxed};
            double worst = 0;
            const long top = std::min(n_max, g.N);
            for (long m = 0; m <= top; ++m)
                for (long n = 0; n <= top; ++n)
                    worst = std::max(worst, verify_orthogonality(p, m, n).residual);
            return std::pair{worst, exact_or<T>(tol)};
        });
    }
}

template <class T>
void suite_methods(Report& rep, const Config& cfg, const GridPointParams& g, long n_max, long x_max)
{
    const T a = from_rational<T>(g.a), b = from_rational<T>(g.b), q = from_rational<T>(g.q);
    const json pj = point_json<T>(g);
    rep.add("methods", pj, "little_qjacobi_agreement", [&] {
        const LittleQJacobiParams<T> p{a, b, q, cfg.relaxed};
        double worst = 0;
        for (long n = 0; n <= n_max; ++n)
            for (long x = 0; x <= x_max; ++x) {
                std::vector<T> v;
                for (JacobiMethod m : kJacobiMethods)
                    v.push_back(little_qjacobi(n, GridPoint::at(x), p, m));
                for (std::size_t i = 0; i < v.size(); ++i)
                    for (std::size_t j = i + 1; j < v.size(); ++j)
                        worst = std::max(worst, rel_diff(v[i], v[j]));
            }
        return std::pair{worst, cfg.tol};
    });
    rep.add("methods", pj, "qhahn_agreement", [&] {
        const QHahnParams<T> p{a, b, g.N, q, cfg.relaxed};
        double worst = 0;
        for (long n = 0; n <= std::min(n_max, g.N); ++n)
            for (long x = 0; x <= std::min(x_max, g.N); ++x) {
                std::vector<T> v;
                for (HahnMethod m : kHahnMethods)
                    v.push_back(qhahn(n, x, p, m));
                for (std::size_t i = 0; i < v.size(); ++i)
                    for (std::size_t j = i + 1; j < v.size(); ++j)
                        worst = std::max(worst, rel_diff(v[i], v[j]));
            }
        return std::pair{worst, cfg.tol};
    });
    for (IdentityKind kind :
         {IdentityKind::duality_qhahn, IdentityKind::reversed_vs_direct, IdentityKind::hahn_identification}) {
        // the dual chains divide by a and b
        if (kind != IdentityKind::reversed_vs_direct && (g.a == 0 || g.b == 0))
            continue;
        rep.add("methods", pj, std::string(to_string(kind)), [&] {
            const QHahnParams<T> p{a, b, g.N, q, true};
            double worst = 0;
            for (long n = 0; n <= g.N; ++n)
                for (long x = 0; x <= g.N; ++x)
                    worst = std::max(worst, to_double(verify_identity(kind, n, x, p)));
            return std::pair{worst, cfg.tol};
        });
    }
}

template <class T>
void suite_limits(Report& rep, const Config& cfg, const GridPointParams& g, long n_max, long x_max)
{
    const T a = from_rational<T>(g.a), b = from_rational<T>(g.b);
    std::vector<Rational> qs;
    if (cfg.q)
        qs.push_back(parse_scalar<Rational>(*cfg.q, "q"));
    else
        qs = {Rational(1, 1000), Rational(1, 10000)};
    for (const Rational& qr : qs) {
        GridPointParams gq = g;
        gq.q = qr;
        const json pj = point_json<T>(gq);
        const T q = from_rational<T>(qr);
        const double bound = 10 * qr.get_d();
        rep.add("limits", pj, "q_to_zero_little_qjacobi", [&] {
            const LittleQJacobiParams<T> p{a, b, q, cfg.relaxed};
            double worst = 0;
            for (long n = 0; n <= n_max; ++n)
                for (long x = 0; x <= x_max; ++x)
                    worst = std::max(worst, to_double(limit_q_to_zero(n, x, p)));
            return std::pair{worst, bound};
        });
        rep.add("limits", pj, "q_to_zero_qhahn", [&] {
            const QHahnParams<T> p{a, b, g.N, q, cfg.relaxed};
            double worst = 0;
            for (long n = 0; n <= std::min(n_max, g.N); ++n)
                for (long x = 0; x <= std::min(x_max, g.N); ++x)
                    worst = std::max(worst, to_double(limit_q_to_zero(n, x, p)));
            return std::pair{worst, bound};
        });
        rep.add("limits", pj, "asymptotic", [&] {
            const LittleQJacobiParams<T> p{a, b, q, cfg.relaxed};
            double worst = 0;
            for (long n = 2; n <= n_max; ++n)
                for (long x = 1; x <= n - 1; ++x)
                    worst = std::max(worst, to_double(limit_asymptotic(n, x, p)));
            return std::pair{worst, bound};
        });
    }
    GridPointParams gN = g;
    gN.q = Rational(1, 2);
    gN.N = kLargeN;
    rep.add("limits", point_json<T>(gN), "n_to_infinity", [&] {
        const QHahnParams<T> p{a, b, kLargeN, T(from_rational<T>(gN.q)), cfg.relaxed};
        double worst = 0;
        for (long n = 0; n <= n_max; ++n)
            for (long x = 0; x <= x_max; ++x)
                worst = std::max(worst, to_double(limit_n_to_infinity(n, x, p)));
        return std::pair{worst, kLargeNBound};
    });
}

/// Largest row sum of |X||Y|, the scale of the rounding error in X*Y.
template <class T>
double product_scale(const Matrix<T>& X, const Matrix<T>& Y)
{
    double scale = 0;
    for (std::size_t i = 0; i < X.rows(); ++i)
        for (std::size_t j = 0; j < Y.cols(); ++j) {
            double s = 0;
            for (std::size_t k = 0; k < X.cols(); ++k)
                s += std::abs(to_double(X(i, k))) * std::abs(to_double(Y(k, j)));
            scale = std::max(scale, s);
        }
    return scale;
}

/// Residual of the closed-form inverses and its bound: exact in rational mode,
/// 1e-8 or the rounding bound of the product in float mode.
template <class T>
std::pair<double, double> inverse_residual(std::span<const T> grid)
{
    const std::size_t n = grid.size();
    const Matrix<T> C = cellular_matrix(grid).dense();
    const Matrix<T> B = dual_matrix(grid).dense();
    const Matrix<T> Ci = invert_triangular(cellular_matrix(grid), grid).dense();
    const Matrix<T> Bi = invert_triangular(dual_matrix(grid), grid).dense();
    const Matrix<T> I = Matrix<T>::identity(n);
    double worst = 0, bound = 1e-8;
    for (const auto& [X, Y] : {std::pair{&Ci, &C}, std::pair{&Bi, &B}, std::pair{&C, &Ci}, std::pair{&B, &Bi}}) {
        worst = std::max(worst, max_abs_diff(*X * *Y, I));
        bound = std::max(bound, 64 * 1.1e-16 * product_scale(*X, *Y));
    }
    return {worst, is_exact_v<T> ? 0.0 : bound};
}

template <class T>
void lu_checks(Report& rep, const Config& cfg, const json& pj, const std::string& tag,
               const std::function<OrthogonalSystem<T>()>& build, const std::vector<DeltaMethod>& methods,
               long ul_max)
{
    const double tol = cfg.tol;
    std::optional<OrthogonalSystem<T>> sys;
    auto get = [&]() -> const OrthogonalSystem<T>& {
        if (!sys)
            sys = build();
        return *sys;
    };
    rep.add("lu", pj, "factor_" + tag, [&] {
        const Factorization<T> f = factor(get(), methods.front());
        return std::pair{f.residual, exact_or<T>(tol)};
    });
    rep.add("lu", pj, "delta_agreement_" + tag, [&] {
        const auto& s = get();
        const std::size_t top = std::min<std::size_t>(s.size(), 11);
        double worst = 0;
        for (std::size_t m = 0; m < top; ++m) {
            const T ref = delta(static_cast<long>(m), s, methods.front());
            for (std::size_t i = 1; i < methods.size(); ++i)
                worst = std::max(worst, rel_diff(ref, delta(static_cast<long>(m), s, methods[i])));
        }
        return std::pair{worst, exact_or<T>(tol)};
    });
    rep.add("lu", pj, "ul_value_" + tag, [&] {
        const auto& s = get();
        const std::vector<T> d = deltas(s, methods[1]);
        double worst = 0;
        for (long n = 0; n <= ul_max; ++n)
            for (long x = 0; x <= ul_max; ++x)
                worst = std::max(worst, abs_diff(ul_value(n, x, s, std::span<const T>(d)),
                                                 s.values(static_cast<std::size_t>(n), static_cast<std::size_t>(x))));
        // truncated sums are approximate even in exact arithmetic
        const bool exact = is_exact_v<T> && s.index_set == IndexSet::finite;
        return std::pair{worst, exact ? 0.0 : tol};
    });
    rep.add("lu", pj, "biorthogonality_" + tag, [&] {
        const BiorthogonalityResult r = verify_biorthogonality(get());
        const bool exact = is_exact_v<T> && get().index_set == IndexSet::finite;
        return std::pair{r.residual(), exact ? 0.0 : tol + r.tail_bound};
    });
    const auto inverse_check = [&](const std::string& name, const std::vector<T> OrthogonalSystem<T>::*grid) {
        rep.add("lu", pj, name + tag, [&] {
            const auto& s = get();
            const std::size_t n = is_exact_v<T> ? s.size() : std::min<std::size_t>(s.size(), kFloatInverseSize);
            return inverse_residual(std::span<const T>((s.*grid).data(), n));
        });
    };
    inverse_check("inverse_", &OrthogonalSystem<T>::y);
    inverse_check("dual_inverse_", &OrthogonalSystem<T>::z);
}

template <class T>
void suite_lu(Report& rep, const Config& cfg, const GridPointParams& g, long n_max)
{
    const T a = from_rational<T>(g.a), b = from_rational<T>(g.b), q = from_rational<T>(g.q);
    const json pj = point_json<T>(g);
    lu_checks<T>(
        rep, cfg, pj, "qhahn", [&] { return build_system(QHahnParams<T>{a, b, g.N, q, cfg.relaxed}); },
        {DeltaMethod::limit_formula, DeltaMethod::closed_hahn, DeltaMethod::sixphi4}, g.N);
    json pl = pj;
    pl.erase("N");
    pl["cutoff"] = cfg.cutoff;
    lu_checks<T>(
        rep, cfg, pl, "little_qjacobi",
        [&] { return build_system(LittleQJacobiParams<T>{a, b, q, cfg.relaxed}, cfg.cutoff); },
        {DeltaMethod::limit_formula, DeltaMethod::closed_jacobi, DeltaMethod::sixphi4},
        std::min(n_max, cfg.cutoff / 3));
    rep.add("lu", pj, "vandermonde", [&] {
        std::vector<T> y;
        for (long i = 0; i <= 10; ++i)
            y.push_back(ipow(q, i));
        // in float mode the terms reach q^{-n(n+1)/2} before cancelling, so the
        // residual is held to 1e-12 or the rounding bound of the largest term
        double worst = 0, bound = 1e-12;
        for (long n = 0; n <= 10; ++n)
            for (long m = 0; m <= n; ++m) {
                worst = std::max(worst, to_double(verify_vandermonde_identity(m, n, std::span<const T>(y))));
                for (long k = m; k <= n; ++k) {
                    T t(1);
                    for (long j = 0; j < m; ++j)
                        t *= y[j] - y[k];
                    for (long j = 0; j <= n; ++j)
                        if (j != k)
                            t /= y[j] - y[k];
                    bound = std::max(bound, 64 * 1.1e-16 * static_cast<double>(n + 1) * std::abs(to_double(t)));
                }
            }
        return std::pair{worst, is_exact_v<T> ? 0.0 : bound};
    });
    rep.add("lu", pj, "zero_lu", [&] {
        const std::size_t size = static_cast<std::size_t>(n_max + 1);
        const NormalizedLU<T> lu = zero_lu(a, b, size);
        double worst = 0;
        for (std::size_t n = 0; n < size; ++n)
            for (std::size_t x = 0; x < size; ++x) {
                T s(0);
                for (std::size_t k = 0; k <= std::min(n, x); ++k)
                    s += lu.L(n, k) * lu.U(k, x);
                worst = std::max(worst, abs_diff(s, little_0jacobi(static_cast<long>(n),
                                                                   GridPoint::at(static_cast<long>(x)), a, b)));
            }
        return std::pair{worst, exact_or<T>(cfg.tol)};
    });
}

template <class T>
void suite_product(Report& rep, const Config& cfg, const GridPointParams& g, long n_max, long x_max)
{
    const T a = from_rational<T>(g.a), b = from_rational<T>(g.b);
    json pj{{"a", to_json(a)}, {"b", to_json(b)}};
    const double bound = exact_or<T>(cfg.tol);
    rep.add("product", pj, "linearization", [&] {
        double worst = 0;
        for (long x = 0; x <= x_max; ++x)
            for (long y = 0; y <= x_max; ++y)
                worst = std::max(worst, to_double(verify_linearization(n_max, x, y, a, b)));
        return std::pair{worst, bound};
    });
    rep.add("product", pj, "sym_coeff", [&] {
        double worst = 0;
        for (long x = 0; x <= x_max; ++x)
            for (long y = 0; y <= x_max; ++y)
                for (long z = 0; z <= x_max; ++z) {
                    const T ref = sym_coeff(x, y, z, a, b);
                    worst = std::max(worst, abs_diff(ref, sym_coeff(x, y, z, a, b, SymMethod::spherical_sum)));
                    worst = std::max(worst, abs_diff(ref, sym_coeff(y, z, x, a, b, SymMethod::spherical_sum)));
                    worst = std::max(worst, abs_diff(ref, sym_coeff(z, y, x, a, b)));
                }
        return std::pair{worst, bound};
    });
    rep.add("product", pj, "nonnegativity_region", [&] {
        const NonnegScan s = scan_nonnegativity(a, b);
        return std::pair{s.consistent() ? 0.0 : 1.0, 0.0};
    });
    const ConvAlgebra<T> alg(a, b, kAlgebraWindow);
    rep.add("product", pj, "star_tables", [&] { return std::pair{to_double(verify_star_tables(alg)), bound}; });
    rep.add("product", pj, "ghat_product_formula",
            [&] { return std::pair{to_double(verify_ghat_product_formula(alg)), bound}; });
    rep.add("product", pj, "idempotents", [&] { return std::pair{to_double(verify_idempotent_functions(alg)), bound}; });
}

void suite_padic(Report& rep, const PadicParams& pp, long x_max)
{
    const json pj{{"p", pp.p}, {"r", pp.r}, {"d", pp.d}, {"m", pp.m}};
    rep.add("padic", pj, "nonnegativity_region", [&] {
        const auto [a, b] = padic_params(pp);
        return std::pair{nonneg_region(a, b) ? 0.0 : 1.0, 0.0};
    });
    rep.add("padic", pj, "laguerre_measure", [&] {
        double worst = 0;
        for (long j = 0; j <= x_max; ++j)
            worst = std::max(worst, to_double(laguerre_measure_check(pp.p, pp.r, pp.m, j)));
        return std::pair{worst, 0.0};
    });
    rep.add("padic", pj, "orbit_measure_total", [&] {
        const auto [a, b] = padic_params(pp);
        const OrbitMeasure<Rational> mu = orbit_measure(a, b);
        Rational total = nu(kAlgebraWindow, mu);
        for (long k = 0; k < kAlgebraWindow; ++k)
            total += mu.mu(k);
        return std::pair{abs_diff(total, Rational(1)), 0.0};
    });
}

template <class T>
int cmd_verify(const Config& cfg, std::ostream& out)
{
    if (std::find(kSuites.begin(), kSuites.end(), cfg.suite) == kSuites.end())
        throw UsageError("unknown suite '" + cfg.suite + "'");
    if (cfg.draws < 0)
        throw UsageError("--draws must be nonnegative");
    const long n_max = cfg.n_max.value_or(4);
    const long x_max = cfg.x_max.value_or(4);
    if (n_max < 0 || x_max < 0)
        throw UsageError("--n-max and --x-max must be nonnegative");
    auto wants = [&](const char* s) { return cfg.suite == "all" || cfg.suite == s; };

    const std::vector<GridPointParams> grid = family_grid(cfg);
    for (const GridPointParams& g : grid) {
        const LittleQJacobiParams<Rational> check{g.a, g.b, g.q, cfg.relaxed};
        if (!cfg.relaxed && (!check.in_region() || g.q == 0 || g.N < 1))
            throw UsageError("grid point outside the valid region (0 < a < 1, b < 1, 0 < q < 1, N >= 1)");
    }
    Report rep(is_exact_v<T>);
    for (const GridPointParams& g : grid) {
        if (wants("orthogonality"))
            suite_orthogonality<T>(rep, cfg, g, n_max);
        if (wants("methods"))
            suite_methods<T>(rep, cfg, g, n_max, x_max);
        if (wants("limits"))
            suite_limits<T>(rep, cfg, g, n_max, x_max);
        if (wants("lu"))
            suite_lu<T>(rep, cfg, g, n_max);
        if (wants("product"))
            suite_product<T>(rep, cfg, g, n_max, x_max);
    }
    if (wants("padic"))
        for (const PadicParams& pp : padic_grid(cfg))
            suite_padic(rep, pp, x_max);

    json doc{{"seed", cfg.seed},
             {"suite", cfg.suite},
             {"precision", scalar_traits<T>::name},
             {"records", rep.records()},
             {"pass", rep.pass()}};
    out << doc.dump(2) << '\n';
    return rep.pass() ? kPass : kCheckFailure;
}

// ---------------------------------------------------------------------------
// Argument parsing
// ---------------------------------------------------------------------------

void add_common(CLI::App* sub, Config& cfg)
{
    sub->add_option("--family", cfg.family_name, "littleqjacobi | little0jacobi | qhahn | zerohahn")
        ->check(CLI::IsMember({"littleqjacobi", "little0jacobi", "qhahn", "zerohahn"}));
    sub->add_option("--a", cfg.a, "parameter a (decimal or p/q)");
    sub->add_option("--b", cfg.b, "parameter b (decimal or p/q)");
    sub->add_option("--q", cfg.q, "base q (decimal or p/q)");
    sub->add_option("--N", cfg.N, "q-Hahn degree bound")->check(CLI::PositiveNumber);
    sub->add_option("--n-max", cfg.n_max, "largest degree n");
    sub->add_option("--x-max", cfg.x_max, "largest grid index x");
    sub->add_option("--method", cfg.method, "evaluation method (eval) or delta method (factor)");
    sub->add_option("--tol", cfg.tol, "tolerance for float checks")->check(CLI::NonNegativeNumber);
    sub->add_option("--precision", cfg.precision, "f64 | rational; fraction literals force rational")
        ->check(CLI::IsMember({"f64", "rational"}));
    sub->add_option("--cutoff", cfg.cutoff, "truncation cutoff for little q-Jacobi systems");
    sub->add_option("--format", cfg.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", cfg.seed, "seed for randomized parameter draws");
    sub->add_option("--draws", cfg.draws, "number of random parameter points (verify)");
    sub->add_flag("--relaxed", cfg.relaxed, "skip parameter-region validation");
    sub->add_option("--p", cfg.p, "prime for the p-adic suite");
    sub->add_option("--r", cfg.r, "residue degree for the p-adic suite");
    sub->add_option("--d", cfg.d, "dimension d for the p-adic suite");
    sub->add_option("--m", cfg.m, "block size m for the p-adic suite");
}

template <class T>
int dispatch(const Config& cfg, std::ostream& out)
{
    if (cfg.command == "eval")
        return cmd_eval<T>(cfg, out);
    if (cfg.command == "factor")
        return cmd_factor<T>(cfg, out);
    return cmd_verify<T>(cfg, out);
}

int error_record(std::ostream& err, const std::string& kind, const std::string& message, int code)
{
    err << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
    return code;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Little q-Jacobi and q-Hahn functions, LU factorizations and product formulas", "qlu"};
    app.require_subcommand(1);
    Config cfg;
    CLI::App* eval = app.add_subcommand("eval", "tabulate p_n(x) for n <= n-max, x <= x-max");
    CLI::App* factor = app.add_subcommand("factor", "factor the evaluation matrix as B D C");
    CLI::App* verify = app.add_subcommand("verify", "run verification suites and print a JSON report");
    for (CLI::App* sub : {eval, factor, verify})
        add_common(sub, cfg);
    verify->add_option("suite", cfg.suite, "orthogonality | methods | limits | lu | product | padic | all");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        return error_record(err, "usage", e.what(), kUsageError);
    }
    for (CLI::App* sub : {eval, factor, verify})
        if (sub->parsed())
            cfg.command = sub->get_name();
    cfg.family = kFamilies.at(cfg.family_name);

    try {
        return cfg.rational() ? dispatch<Rational>(cfg, out) : dispatch<double>(cfg, out);
    } catch (const UsageError& e) {
        return error_record(err, "usage", e.what(), kUsageError);
    } catch (const DomainError& e) {
        return error_record(err, "parameter", e.what(), kUsageError);
    } catch (const SingularError& e) {
        return error_record(err, "singular", e.what(), kCheckFailure);
    } catch (const ConvergenceError& e) {
        return error_record(err, "convergence", e.what(), kCheckFailure);
    }
}

} // namespace qlu::cli
