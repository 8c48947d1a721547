#ifndef QLU_FAMILIES_HPP
#define QLU_FAMILIES_HPP

#include <string>
#include <string_view>
#include <vector>

#include "qlu/qseries.hpp"

namespace qlu {

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

/// Rescaled little q-Jacobi parameters: p_n^{a,b;q}(x) = p_n(q^x; a/q, b/q; q).
/// The valid region is 0 < a < 1, b < 1, 0 <= q < 1. With `relaxed` set,
/// evaluation proceeds outside it (used by the pure identity checks).
template <class T>
struct LittleQJacobiParams {
    T a;
    T b;
    T q;
    bool relaxed = false;

    bool in_region() const;
    void validate() const;
};

/// Rescaled q-Hahn parameters: Q_n^{a,b,N;q}(x) = Q_n(q^{x-N}; a/q, b/q, N; q).
/// Valid when (0 < a < 1 and b < 1) or (a > q^{1-N} and b > q^{1-N}).
template <class T>
struct QHahnParams {
    T a;
    T b;
    long N = 1;
    T q;
    bool relaxed = false;

    bool in_region() const;
    void validate() const;
};

/// A point of the little q-Jacobi grid: a nonnegative integer or infinity.
class GridPoint {
public:
    enum class Kind { finite, infinity };

    static GridPoint at(long x);
    static GridPoint infinity() { return GridPoint(Kind::infinity, 0); }

    Kind kind() const { return kind_; }
    bool is_infinite() const { return kind_ == Kind::infinity; }
    long index() const;

    /// q^x, or 0 at infinity.
    template <class T>
    T qpow(const T& q) const;

    friend bool operator==(const GridPoint&, const GridPoint&) = default;

private:
    GridPoint(Kind k, long x) : kind_(k), x_(x) {}
    Kind kind_;
    long x_;
};

template <class T>
T GridPoint::qpow(const T& q) const
{
    return is_infinite() ? T(0) : ipow(q, x_);
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

enum class JacobiMethod { phi21, phi31, lu_series, haran, dual_phi21, ul_series };
enum class HahnMethod { phi32, lu_series, haran, reversed, ul_series };

inline constexpr JacobiMethod kJacobiMethods[] = {JacobiMethod::phi21,     JacobiMethod::phi31,
                                                  JacobiMethod::lu_series, JacobiMethod::haran,
                                                  JacobiMethod::dual_phi21, JacobiMethod::ul_series};
inline constexpr HahnMethod kHahnMethods[] = {HahnMethod::phi32, HahnMethod::lu_series, HahnMethod::haran,
                                              HahnMethod::reversed, HahnMethod::ul_series};

std::string_view to_string(JacobiMethod m);
std::string_view to_string(HahnMethod m);
JacobiMethod parse_jacobi_method(std::string_view s);
HahnMethod parse_hahn_method(std::string_view s);

/// Controls for the two genuinely infinite evaluations (ul_series and the
/// infinite q-products inside little q-Jacobi weights).
struct Truncation {
    double tol = 1e-15;
    long max_terms = 5000;
};

/// p_n^{a,b;q}(x). q = 0 is routed to the closed-form limit functions.
template <class T>
T little_qjacobi(long n, GridPoint x, const LittleQJacobiParams<T>& p,
                 JacobiMethod method = JacobiMethod::lu_series, const Truncation& trunc = {});

/// Lower-triangular factor L^q_{n,k} of P^q = L^q U^q (row n, column k <= n).
template <class T>
T little_qjacobi_lower(long n, long k, const LittleQJacobiParams<T>& p);

/// Upper-triangular factor U^q_{k,x} = (q^x; q^{-1})_k.
template <class T>
T little_qjacobi_upper(long k, GridPoint x, const T& q);

/// Little 0-Jacobi function: piecewise constant in x, exceptional at x = n-1.
template <class T>
T little_0jacobi(long n, GridPoint x, const T& a, const T& b);

/// Q_n^{a,b,N;q}(x) for 0 <= n, x <= N. q = 0 is routed to zero_hahn.
template <class T>
T qhahn(long n, long x, const QHahnParams<T>& p, HahnMethod method = HahnMethod::lu_series);

/// 0-Hahn function: little 0-Jacobi restricted to 0..N.
template <class T>
T zero_hahn(long n, long x, const T& a, const T& b, long N);

/// Standard q-Hahn Q_n(X; alpha, beta, N | q) with the lattice value X = q^{-x}
/// passed directly, i.e. 3phi2(q^{-n}, alpha beta q^{n+1}, X; alpha q, q^{-N}; q, q).
template <class T>
T qhahn_standard(long n, const T& lattice_value, const T& alpha, const T& beta, long N, const T& base);

/// Standard dual q-Hahn R_n(mu(x); gamma, delta, N | q) with mu(x) = q^{-x} + gamma delta q^{x+1}:
/// 3phi2(q^{-n}, q^{-x}, gamma delta q^{x+1}; gamma q, q^{-N}; q, q).
template <class T>
T dual_qhahn_standard(long n, long x, const T& gamma, const T& delta, long N, const T& base);

// ---------------------------------------------------------------------------
// Weights
// ---------------------------------------------------------------------------

template <class T>
T weight(const LittleQJacobiParams<T>& p, long x, const Truncation& trunc = {});
template <class T>
T dual_weight(const LittleQJacobiParams<T>& p, long n);
template <class T>
T weight(const QHahnParams<T>& p, long x);
template <class T>
T dual_weight(const QHahnParams<T>& p, long n);

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

/// Outcome of an orthogonality sum. `residual` is |sum - delta_{mn}/omega_n|
/// over the summed range; `tail_bound` bounds what was left out (0 for
/// finite sums and for q = 0, where the tail is summed in closed form).
struct OrthogonalityResult {
    double residual = 0;
    double tail_bound = 0;
    long points = 0;
};

template <class T>
OrthogonalityResult verify_orthogonality(const LittleQJacobiParams<T>& p, long m, long n, double tol,
                                         long max_points = 4000);
template <class T>
OrthogonalityResult verify_orthogonality(const QHahnParams<T>& p, long m, long n);

/// |p_n^{a,b;q}(x) - p_n^{a,b;0}(x)|
template <class T>
T limit_q_to_zero(long n, long x, const LittleQJacobiParams<T>& p);

/// |Q_n^{a,b,N;q}(x) - Q_n^{a,b,N;0}(x)|
template <class T>
T limit_q_to_zero(long n, long x, const QHahnParams<T>& p);

/// |Q_n^{a,b,N;q}(x) - p_n^{a,b;q}(x)|
template <class T>
T limit_n_to_infinity(long n, long x, const QHahnParams<T>& p);

/// |q^{-(n-x)(n-x-1)/2} p_n^{a,b;q}(x) - (-a)^{n-x}/(1-a)| for 1 <= x <= n-1.
template <class T>
T limit_asymptotic(long n, long x, const LittleQJacobiParams<T>& p);

enum class IdentityKind { duality_qhahn, reversed_vs_direct, hahn_identification };

std::string_view to_string(IdentityKind k);

/// Largest absolute difference along the chain of equal expressions for the
/// chosen identity, after the normalizing prefactors.
template <class T>
T verify_identity(IdentityKind kind, long n, long x, const QHahnParams<T>& p);

} // namespace qlu

#endif
