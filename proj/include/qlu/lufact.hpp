#ifndef QLU_LUFACT_HPP
#define QLU_LUFACT_HPP

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "qlu/families.hpp"

namespace qlu {

template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, const T& fill = T(0)) : rows_(rows), cols_(cols), data_(rows * cols, fill)
    {
    }

    static Matrix identity(std::size_t n)
    {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = T(1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    /// Entrywise equality; exact in rational mode.
    friend bool operator==(const Matrix& lhs, const Matrix& rhs)
    {
        return lhs.rows_ == rhs.rows_ && lhs.cols_ == rhs.cols_ && lhs.data_ == rhs.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

template <class T>
Matrix<T> operator*(const Matrix<T>& lhs, const Matrix<T>& rhs);

template <class T>
Matrix<T> transpose(const Matrix<T>& m);

/// max_{i,j} |lhs(i,j) - rhs(i,j)|
template <class T>
double max_abs_diff(const Matrix<T>& lhs, const Matrix<T>& rhs);

enum class Orientation { lower, upper };

/// Square matrix with structural zeros on one side of the diagonal.
template <class T>
class TriangularMatrix {
public:
    TriangularMatrix(std::size_t n, Orientation o) : orientation_(o), entries_(n, n) {}

    /// Adopts a dense matrix; throws DomainError if an entry on the
    /// structurally-zero side is nonzero.
    TriangularMatrix(Matrix<T> dense, Orientation o);

    Orientation orientation() const { return orientation_; }
    std::size_t size() const { return entries_.rows(); }

    bool in_structure(std::size_t i, std::size_t j) const
    {
        return orientation_ == Orientation::lower ? j <= i : i <= j;
    }

    const T& operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }
    void set(std::size_t i, std::size_t j, const T& v);

    const Matrix<T>& dense() const { return entries_; }

private:
    Orientation orientation_;
    Matrix<T> entries_;
};

enum class IndexSet { finite, truncated_infinite };

/// Discrete orthogonal system prepared for factorization: grid y_x, dual grid
/// z_n, weights, the values p_n(y_nu) and the row-normalized evaluation
/// matrix p_n(y_x) / p_n(y_nu).
///
/// The unnormalized matrix is P_{n,x} = p_at_nu[n] * values(n,x). Storing the
/// normalized form keeps float systems with large cutoffs in range.
template <class T>
struct OrthogonalSystem {
    IndexSet index_set = IndexSet::finite;
    std::vector<T> y;
    std::vector<T> z;
    std::vector<T> w;
    /// Dual weights of the normalized functions; the dual weights of the
    /// unnormalized p_n are omega[n] / p_at_nu[n]^2.
    std::vector<T> omega;
    std::vector<T> p_at_nu;
    T y_nu;
    Matrix<T> values;
    std::variant<std::monostate, LittleQJacobiParams<T>, QHahnParams<T>> family;

    std::size_t size() const { return y.size(); }
    T evaluation(std::size_t n, std::size_t x) const { return p_at_nu[n] * values(n, x); }

    /// Throws DomainError when the grids repeat, weights are not positive, or
    /// the vectors disagree in length.
    void validate() const;
};

/// Truncated little q-Jacobi system on x, n = 0..cutoff with y_nu = 0.
template <class T>
OrthogonalSystem<T> build_system(const LittleQJacobiParams<T>& p, long cutoff, const Truncation& trunc = {});

/// q-Hahn system on 0..N with y_nu = y_N = q^N.
template <class T>
OrthogonalSystem<T> build_system(const QHahnParams<T>& p);

/// c_k(y) = prod_{j<k} (grid_j - y)
template <class T>
T cellular(long k, const T& y, std::span<const T> grid);

/// C_{k,x} = c_k(y_x), upper triangular.
template <class T>
TriangularMatrix<T> cellular_matrix(std::span<const T> grid);

/// B_{n,k} = prod_{i<k} (z_i - z_n), lower triangular.
template <class T>
TriangularMatrix<T> dual_matrix(std::span<const T> zgrid);

/// Closed-form inverse of a cellular (upper) or dual (lower) matrix built on
/// `grid`:
///   (C^{-1})_{k,n} = prod_{j<=n, j!=k} (y_j - y_k)^{-1}
///   (B^{-1})_{m,n} = prod_{i<=m, i!=n} (z_i - z_n)^{-1}
/// Throws SingularError on repeated grid values and DomainError if M is not
/// the matrix the grid generates.
template <class T>
TriangularMatrix<T> invert_triangular(const TriangularMatrix<T>& m, std::span<const T> grid);

enum class DeltaMethod { limit_formula, closed_jacobi, closed_hahn, sixphi4 };

std::string_view to_string(DeltaMethod m);

/// Diagonal entry delta_m of P = B D C.
template <class T>
T delta(long m, const OrthogonalSystem<T>& sys, DeltaMethod method = DeltaMethod::limit_formula);

template <class T>
std::vector<T> deltas(const OrthogonalSystem<T>& sys, DeltaMethod method = DeltaMethod::limit_formula);

template <class T>
struct Factorization {
    TriangularMatrix<T> B;
    std::vector<T> D;
    TriangularMatrix<T> C;
    /// max |P - BDC| with row n divided by p_n(y_nu)
    double residual = 0;
    /// max |P C^{-1} - B D|, same row scaling; compares the expansion
    /// coefficients obtained by solving against the closed-form B.
    double expansion_residual = 0;
};

template <class T>
Factorization<T> factor(const OrthogonalSystem<T>& sys, DeltaMethod method = DeltaMethod::limit_formula);

/// Row-normalized factors: L = diag(p_nu)^{-1} B D diag(prod y_j), U = diag(prod y_j)^{-1} C,
/// so that values = L U and U_{k,x} = (q^x; q^{-1})_k on the q-lattices.
template <class T>
struct NormalizedLU {
    TriangularMatrix<T> L;
    TriangularMatrix<T> U;
};

template <class T>
NormalizedLU<T> normalized_lu(const OrthogonalSystem<T>& sys, std::span<const T> delta_values);

/// The q = 0 factors L^0, U^0 of the little 0-Jacobi matrix.
template <class T>
NormalizedLU<T> zero_lu(const T& a, const T& b, std::size_t size);

/// Upper-times-lower expansion of p_n(y_x)/p_n(y_nu). Finite systems sum over
/// k = max(n,x)..N; truncated systems stop after three consecutive terms below
/// tol * |partial sum| and throw ConvergenceError if the cutoff comes first.
template <class T>
T ul_value(long n, long x, const OrthogonalSystem<T>& sys, std::span<const T> delta_values, double tol = 1e-15);

struct BiorthogonalityResult {
    /// max |omega_n sum_x p_n p_m w_x - delta_{nm}|
    double primal = 0;
    /// max |w_x sum_n p_n(x) p_n(x') omega_n - delta_{xx'}|
    double dual = 0;
    /// indices checked: all for finite systems, the leading half for truncated ones
    std::size_t block = 0;
    /// Bound on what the x-sums of the primal identity leave out beyond the
    /// cutoff (0 for finite systems). The dual sums are reported raw.
    double tail_bound = 0;

    double residual() const { return primal > dual ? primal : dual; }
};

template <class T>
BiorthogonalityResult verify_biorthogonality(const OrthogonalSystem<T>& sys);

/// sum_{k=m}^{n} prod_{j<m} (y_j - y_k) prod_{j<=n, j!=k} (y_j - y_k)^{-1} - delta_{mn}
template <class T>
T verify_vandermonde_identity(long m, long n, std::span<const T> grid);

} // namespace qlu

#endif
