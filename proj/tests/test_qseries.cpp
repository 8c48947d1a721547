#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "qlu/qseries.hpp"

using namespace qlu;

namespace {
const Rational kHalf(1, 2);
const Rational kQuarter(1, 4);
} // namespace

TEST_CASE("qpoch: empty product, vanishing factor, direct product")
{
    CHECK(qpoch(Rational(3, 7), kHalf, 0) == 1);
    CHECK(qpoch(Rational(1), kHalf, 3) == 0);
    CHECK(qpoch(kHalf, kHalf, 2) == Rational(3, 8));
    CHECK(qpoch(0.5, 0.5, 2) == doctest::Approx(0.375));
}

TEST_CASE("qpoch: one-step recurrence and bases above one")
{
    for (const Rational& q : {kHalf, Rational(3), Rational(-2, 3)})
        for (const Rational& a : {Rational(1, 3), Rational(-5, 2)})
            for (long k = 0; k < 50; ++k)
                CHECK(qpoch(a, q, k + 1) == qpoch(a, q, k) * (1 - a * ipow(q, k)));
    CHECK(qpoch(Rational(2), Rational(3), 4) == oracle::poch(Rational(2), Rational(3), 4));
}

TEST_CASE("qpoch_rev is the symbol in base 1/q")
{
    const Rational q(2, 5);
    for (long k = 0; k < 8; ++k)
        CHECK(qpoch_rev(ipow(q, 6), q, k) == oracle::poch(ipow(q, 6), 1 / q, k));
    // (q^x; q^{-1})_k vanishes once k > x
    CHECK(qpoch_rev(ipow(q, 3), q, 4) == 0);
}

TEST_CASE("qpoch_inf")
{
    CHECK(qpoch_inf(0.0, 0.5) == 1.0);
    CHECK(qpoch_inf(0.3, 0.0) == doctest::Approx(0.7));
    const double ref = qpoch(0.5, 0.5, 50);
    CHECK(std::abs(qpoch_inf(0.5, 0.5, 1e-15) - ref) <= 1e-12 * std::abs(ref));
    CHECK_THROWS_AS(qpoch_inf(0.5, 1.0), DomainError);
    CHECK_THROWS_AS(qpoch_inf(0.5, -0.1), DomainError);
    // rational mode truncates at the same index
    CHECK(std::abs(to_double(qpoch_inf(kHalf, kHalf, 1e-15)) - ref) <= 1e-12 * std::abs(ref));
}

TEST_CASE("termination_index")
{
    const Rational q(1, 3);
    CHECK(termination_index<Rational>({Rational(2), ipow(q, -4), ipow(q, -2)}, q) == 2);
    CHECK(!termination_index<Rational>({Rational(2), Rational(5)}, q).has_value());
    CHECK(termination_index<double>({std::pow(1.0 / 3, -5) * (1 + 1e-12)}, 1.0 / 3) == 5);
    CHECK(!termination_index<double>({std::pow(1.0 / 3, -5) * (1 + 1e-6)}, 1.0 / 3).has_value());
}

TEST_CASE("basic_hyp: trivial shapes")
{
    const Rational q(1, 2);
    SeriesSpec<Rational> unit{{Rational(1), ipow(q, -3)}, {Rational(1, 5)}, q, Rational(7, 3), std::nullopt};
    CHECK(basic_hyp(unit) == 1);
    SeriesSpec<Rational> zero_arg{{ipow(q, -3), Rational(2, 3)}, {Rational(1, 5)}, q, Rational(0), std::nullopt};
    CHECK(basic_hyp(zero_arg) == 1);
}

TEST_CASE("basic_hyp: 2phi1 at n = 1 reproduces the linear little q-Jacobi function")
{
    const Rational a = kHalf, b = kQuarter, q = kHalf;
    const long x = 1;
    SeriesSpec<Rational> s{{ipow(q, -1), a * b}, {a}, q, ipow(q, x + 1), std::nullopt};
    CHECK(basic_hyp(s) == Rational(1, 8));
    CHECK(basic_hyp(s) == 1 - ipow(q, x) * (1 - a * b) / (1 - a));
}

TEST_CASE("basic_hyp agrees with the term-by-term oracle in every balance class")
{
    const Rational q(2, 5);
    const std::vector<std::vector<Rational>> nums{
        {ipow(q, -4), Rational(1, 3)},
        {ipow(q, -5), Rational(1, 3), Rational(-2, 7)},
        {ipow(q, -3), Rational(3, 4), Rational(5), Rational(-1, 9)},
    };
    const std::vector<Rational> den{Rational(1, 6)};
    for (const auto& num : nums) {
        SeriesSpec<Rational> s{num, den, q, Rational(3, 11), std::nullopt};
        const long n = *termination_index(num, q);
        CHECK(basic_hyp(s) == oracle::phi(num, den, q, Rational(3, 11), n + 1));
    }
}

TEST_CASE("basic_hyp: max_terms past the termination index changes nothing")
{
    const Rational q(1, 3);
    SeriesSpec<Rational> s{{ipow(q, -3), Rational(2, 5)}, {Rational(1, 7)}, q, Rational(5, 2), std::nullopt};
    const Rational ref = basic_hyp(s);
    for (long m : {4L, 5L, 40L}) {
        s.max_terms = m;
        CHECK(basic_hyp(s) == ref);
    }
}

TEST_CASE("basic_hyp: errors")
{
    const Rational q(1, 2);
    SeriesSpec<Rational> nonterm{{Rational(1, 3)}, {Rational(1, 5)}, q, q, std::nullopt};
    CHECK_THROWS_AS(basic_hyp(nonterm), DomainError);
    // (q^{-2}; q)_2 in the denominator vanishes before the q^{-4} numerator terminates
    SeriesSpec<Rational> singular{{ipow(q, -4)}, {ipow(q, -1)}, q, q, std::nullopt};
    CHECK_THROWS_AS(basic_hyp(singular), SingularError);
}

TEST_CASE("float evaluation stays within its conditioning bound")
{
    // error <= c eps sum_k |t_k|, where the t_k are the exact terms
    const Rational q(3, 5);
    for (long n = 0; n <= 12; ++n) {
        const std::vector<Rational> num{ipow(q, -n), Rational(2, 9), Rational(-3, 4)};
        const std::vector<Rational> den{Rational(1, 8), Rational(5, 7)};
        const Rational exact = basic_hyp(SeriesSpec<Rational>{num, den, q, q, std::nullopt});
        Rational magnitude(0);
        for (long k = 0; k <= n; ++k)
            magnitude += abs(oracle::phi(num, den, q, q, k + 1) - oracle::phi(num, den, q, q, k));
        std::vector<double> fnum, fden;
        for (const auto& v : num)
            fnum.push_back(v.get_d());
        for (const auto& v : den)
            fden.push_back(v.get_d());
        const double approx = basic_hyp(SeriesSpec<double>{fnum, fden, q.get_d(), q.get_d(), std::nullopt});
        CHECK(std::abs(approx - exact.get_d()) <= 64 * (n + 1) * 2.3e-16 * magnitude.get_d());
    }
}
