#ifndef QLU_QSERIES_HPP
#define QLU_QSERIES_HPP

#include <optional>
#include <vector>

#include "qlu/scalar.hpp"

namespace qlu {

/// (a; base)_k = prod_{j<k} (1 - a base^j). Any nonzero base is allowed.
template <class T>
T qpoch(const T& a, const T& base, long k);

/// (a; base)_k with base^{-1}, i.e. prod_{j<k} (1 - a base^{-j}).
/// Spelled out because the reversed symbol (q^x; q^{-1})_k is everywhere.
template <class T>
T qpoch_rev(const T& a, const T& base, long k);

/// (a; base)_inf for 0 <= base < 1. Factors are multiplied until
/// |a base^j| < tol; the index at which that happens is deterministic.
template <class T>
T qpoch_inf(const T& a, const T& base, double tol = 1e-17);

/// Terminating or truncated r-phi-s in the Gasper-Rahman convention:
///
///   sum_k  prod(num)_k / prod(den)_k  ((-1)^k q^{k(k-1)/2})^{1+s-r}  z^k / (q;q)_k
///
/// With max_terms unset the series must terminate through a numerator equal to
/// base^{-n}; otherwise exactly max_terms terms are summed.
template <class T>
struct SeriesSpec {
    std::vector<T> numerators;
    std::vector<T> denominators;
    T base;
    T argument;
    std::optional<long> max_terms;
};

/// Smallest n >= 0 such that some numerator equals base^{-n}. Exact equality
/// in rational mode; |u - base^{-n}| <= 1e-9 base^{-n} in float mode.
template <class T>
std::optional<long> termination_index(const std::vector<T>& numerators, const T& base);

template <class T>
T basic_hyp(const SeriesSpec<T>& spec);

} // namespace qlu

#endif
