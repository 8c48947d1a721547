#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "qlu/families.hpp"

using namespace qlu;

namespace {

using LQJ = LittleQJacobiParams<Rational>;
using QH = QHahnParams<Rational>;

const Rational kHalf(1, 2);
const Rational kQuarter(1, 4);

GridPoint at(long x) { return GridPoint::at(x); }

} // namespace

TEST_CASE("parameter regions")
{
    CHECK_NOTHROW((LQJ{kHalf, Rational(-3), kHalf}.validate()));
    CHECK_NOTHROW((LQJ{kHalf, kQuarter, Rational(0)}.validate()));
    CHECK_THROWS_AS((LQJ{Rational(1), kQuarter, kHalf}.validate()), DomainError);
    CHECK_THROWS_AS((LQJ{kHalf, Rational(1), kHalf}.validate()), DomainError);
    CHECK_THROWS_AS((LQJ{kHalf, kQuarter, Rational(1)}.validate()), DomainError);
    CHECK_NOTHROW((LQJ{Rational(2), Rational(3), kHalf, true}.validate()));

    // second branch: a, b > q^{1-N}
    CHECK_NOTHROW((QH{Rational(9), Rational(9), 4, kHalf}.validate()));
    CHECK_THROWS_AS((QH{Rational(7), Rational(9), 4, kHalf}.validate()), DomainError);
    CHECK_THROWS_AS((QH{kHalf, kQuarter, 0, kHalf}.validate()), DomainError);
}

TEST_CASE("GridPoint")
{
    CHECK(at(3).qpow(kHalf) == Rational(1, 8));
    CHECK(GridPoint::infinity().qpow(kHalf) == 0);
    CHECK_THROWS_AS(GridPoint::infinity().index(), DomainError);
    CHECK_THROWS_AS(GridPoint::at(-1), DomainError);
    CHECK(at(2) == at(2));
    CHECK(!(at(2) == GridPoint::infinity()));
}

TEST_CASE("method names round-trip")
{
    for (auto m : kJacobiMethods)
        CHECK(parse_jacobi_method(to_string(m)) == m);
    for (auto m : kHahnMethods)
        CHECK(parse_hahn_method(to_string(m)) == m);
    CHECK_THROWS_AS(parse_jacobi_method("phi99"), DomainError);
}

TEST_CASE("little q-Jacobi: simple values for every method")
{
    const LQJ p{kHalf, kQuarter, kHalf};
    for (auto m : kJacobiMethods) {
        CAPTURE(to_string(m));
        // the infinite series is truncated, so it is exact only to its tolerance
        const double tol = m == JacobiMethod::ul_series ? 1e-14 : 0.0;
        CHECK(rel_diff(little_qjacobi(0, at(4), p, m), Rational(1)) <= tol);
        CHECK(rel_diff(little_qjacobi(1, at(1), p, m), Rational(1, 8)) <= tol);
        CHECK(little_qjacobi(3, GridPoint::infinity(), p, m) == 1);
    }
}

TEST_CASE("little q-Jacobi: exact methods agree with the series oracle")
{
    for (const Rational& a : {Rational(1, 4), Rational(2, 3)})
        for (const Rational& b : {Rational(-1, 2), Rational(0), Rational(3, 5)})
            for (const Rational& q : {Rational(1, 3), Rational(3, 4)}) {
                const LQJ p{a, b, q};
                for (long n = 0; n <= 7; ++n)
                    for (long x = 0; x <= 7; ++x) {
                        const Rational ref = oracle::little_qjacobi(n, x, a, b, q);
                        for (auto m : kJacobiMethods) {
                            if (m == JacobiMethod::ul_series)
                                continue;
                            CAPTURE(to_string(m));
                            CHECK(little_qjacobi(n, at(x), p, m) == ref);
                        }
                    }
            }
}

TEST_CASE("little q-Jacobi: the infinite upper-times-lower series converges to the polynomial")
{
    const LQJ p{kHalf, Rational(-1, 2), Rational(2, 3)};
    for (long n = 0; n <= 6; ++n)
        for (long x = 0; x <= 6; ++x) {
            const Rational ref = oracle::little_qjacobi(n, x, p.a, p.b, p.q);
            const Rational ul = little_qjacobi(n, at(x), p, JacobiMethod::ul_series);
            CHECK(rel_diff(ul, ref) <= 1e-12);
        }
    const LittleQJacobiParams<double> pf{0.5, -0.5, 2.0 / 3};
    CHECK(rel_diff(little_qjacobi(3, at(2), pf, JacobiMethod::ul_series),
                   oracle::little_qjacobi(3, 2, p.a, p.b, p.q).get_d()) <= 1e-12);
    CHECK_THROWS_AS(little_qjacobi(3, at(2), p, JacobiMethod::ul_series, Truncation{1e-15, 2}),
                    ConvergenceError);
}

TEST_CASE("little q-Laguerre: b = 0 through every method")
{
    const LQJ p{Rational(2, 5), Rational(0), kHalf};
    for (long n = 0; n <= 6; ++n)
        for (long x = 0; x <= 6; ++x) {
            const Rational ref = oracle::little_qjacobi(n, x, p.a, Rational(0), p.q);
            for (auto m : kJacobiMethods)
                CHECK(rel_diff(little_qjacobi(n, at(x), p, m), ref) <= 1e-12);
        }
}

TEST_CASE("little q-Jacobi: float methods agree with the exact value")
{
    // The plain 2phi1 sums alternating terms of size q^{-nk} near x = 0 and
    // loses up to eps q^{-n(n+1)/2} there, so it is compared in rational mode only.
    const LittleQJacobiParams<double> pf{0.25, -0.5, 0.5};
    for (long n = 0; n <= 10; ++n)
        for (long x = 0; x <= 10; ++x) {
            const double ref = oracle::little_qjacobi(n, x, kQuarter, Rational(-1, 2), kHalf).get_d();
            for (auto m : kJacobiMethods)
                if (m != JacobiMethod::phi21)
                    CHECK(std::abs(little_qjacobi(n, at(x), pf, m) - ref) <= 1e-10 * std::max(1.0, std::abs(ref)));
        }
}

TEST_CASE("polynomiality in q^x")
{
    const LQJ p{Rational(1, 3), Rational(1, 5), Rational(3, 5)};
    for (long n = 1; n <= 6; ++n) {
        std::vector<Rational> xs, ys;
        for (long x = 0; x <= n; ++x) {
            xs.push_back(ipow(p.q, x));
            ys.push_back(little_qjacobi(n, at(x), p));
        }
        const long held_out = n + 3;
        const Rational interp = oracle::lagrange(xs, ys, ipow(p.q, held_out));
        CHECK(interp == little_qjacobi(n, at(held_out), p));
        CHECK(oracle::lagrange(xs, ys, Rational(0)) == little_qjacobi(n, GridPoint::infinity(), p));
    }
}

TEST_CASE("little 0-Jacobi closed form")
{
    const Rational a = kHalf, b = kQuarter;
    CHECK(little_0jacobi(3, at(1), a, b) == 0);
    CHECK(little_0jacobi(3, at(2), a, b) == -1);
    CHECK(little_0jacobi(1, at(0), a, b) == Rational(-3, 4));
    CHECK(little_0jacobi(1, at(5), a, b) == 1);
    CHECK(little_0jacobi(4, GridPoint::infinity(), a, b) == 1);
    CHECK(little_0jacobi(0, at(0), a, b) == 1);
    for (long n = 0; n <= 8; ++n)
        for (long x = 0; x <= 8; ++x)
            CHECK(little_0jacobi(n, at(x), a, b) == oracle::little_0jacobi(n, x, a, b));
    // q = 0 is routed to the closed form for every method
    const LQJ p0{a, b, Rational(0)};
    for (auto m : kJacobiMethods)
        CHECK(little_qjacobi(1, at(0), p0, m) == Rational(-3, 4));
}

TEST_CASE("q-Hahn: trivial values and the recorded fixture")
{
    const QH p{kHalf, kQuarter, 4, kHalf};
    for (auto m : kHahnMethods) {
        CAPTURE(to_string(m));
        for (long x = 0; x <= 4; ++x)
            CHECK(qhahn(0, x, p, m) == 1);
        for (long n = 0; n <= 4; ++n)
            CHECK(qhahn(n, 4, p, m) == 1);
        CHECK(qhahn(1, 0, p, m) == Rational(-3, 4));
    }
    CHECK(oracle::qhahn(1, 0, kHalf, kQuarter, 4, kHalf) == Rational(-3, 4));
}

TEST_CASE("q-Hahn: every method agrees with the series oracle")
{
    for (const Rational& a : {Rational(1, 3), Rational(3, 4)})
        for (const Rational& b : {Rational(-1, 2), Rational(1, 2)})
            for (const Rational& q : {Rational(1, 2), Rational(2, 3)})
                for (long N : {1L, 3L, 6L}) {
                    const QH p{a, b, N, q};
                    for (long n = 0; n <= N; ++n)
                        for (long x = 0; x <= N; ++x) {
                            const Rational ref = oracle::qhahn(n, x, a, b, N, q);
                            for (auto m : kHahnMethods) {
                                CAPTURE(to_string(m));
                                CHECK(qhahn(n, x, p, m) == ref);
                            }
                        }
                }
    // the second parameter branch
    const QH big{Rational(10), Rational(12), 3, kHalf};
    for (long n = 0; n <= 3; ++n)
        for (long x = 0; x <= 3; ++x)
            for (auto m : kHahnMethods)
                CHECK(qhahn(n, x, big, m) == oracle::qhahn(n, x, big.a, big.b, 3, big.q));
}

TEST_CASE("0-Hahn is little 0-Jacobi on 0..N")
{
    CHECK(zero_hahn(2, 5, kHalf, kQuarter, 6) == 1);
    CHECK(zero_hahn(0, 0, kHalf, kQuarter, 6) == 1);
    CHECK(zero_hahn(2, 1, kHalf, kQuarter, 6) == -1);
    for (long N = 1; N <= 6; ++N)
        for (long n = 0; n <= N; ++n)
            for (long x = 0; x <= N; ++x)
                CHECK(zero_hahn(n, x, Rational(1, 3), Rational(-2), N) ==
                      little_0jacobi(n, at(x), Rational(1, 3), Rational(-2)));
    CHECK_THROWS_AS(zero_hahn(1, 7, kHalf, kQuarter, 6), DomainError);
}

TEST_CASE("standard q-Hahn and dual q-Hahn are the plain 3phi2 forms")
{
    const Rational q(1, 3), al(2, 5), be(1, 7), ga(1, 4), de(3, 8);
    const long N = 4;
    for (long n = 0; n <= N; ++n)
        for (long x = 0; x <= N; ++x) {
            CHECK(qhahn_standard(n, ipow(q, -x), al, be, N, q) ==
                  oracle::phi({ipow(q, -n), al * be * ipow(q, n + 1), ipow(q, -x)}, {al * q, ipow(q, -N)}, q, q,
                              N + 1));
            CHECK(dual_qhahn_standard(n, x, ga, de, N, q) ==
                  oracle::phi({ipow(q, -n), ipow(q, -x), ga * de * ipow(q, x + 1)}, {ga * q, ipow(q, -N)}, q, q,
                              N + 1));
        }
}

TEST_CASE("weights")
{
    const Rational a = kHalf, b = kQuarter;
    const LQJ p0{a, b, Rational(0)};
    CHECK(weight(p0, 0) == Rational(4, 7));
    CHECK(weight(p0, 2) == (1 - a) * (1 - b) * a * a / (1 - a * b));
    CHECK(dual_weight(p0, 0) == 1);
    CHECK(dual_weight(p0, 1) == Rational(4, 3));

    const LQJ p{a, b, kHalf};
    const QH h{a, b, 5, kHalf};
    CHECK(dual_weight(p, 0) == 1);
    CHECK(dual_weight(h, 0) == 1);
    for (long k = 0; k <= 5; ++k) {
        CHECK(weight(p, k) > 0);
        CHECK(dual_weight(p, k) > 0);
        CHECK(weight(h, k) > 0);
        CHECK(dual_weight(h, k) > 0);
    }
    // the q-Hahn weights sum to one
    Rational total(0);
    for (long x = 0; x <= 5; ++x)
        total += weight(h, x);
    CHECK(total == 1);
}

TEST_CASE("orthogonality at q = 0 is a finite identity")
{
    const LQJ p0{kHalf, kQuarter, Rational(0)};
    // p_1 takes -3/4 at x = 0 and 1 elsewhere: sum = (4/7)(9/16) + (1 - 4/7) = 3/4
    Rational s = Rational(9, 16) * weight(p0, 0) + (1 - weight(p0, 0));
    CHECK(s == Rational(3, 4));
    CHECK(s == 1 / dual_weight(p0, 1));
    for (long m = 0; m <= 8; ++m)
        for (long n = 0; n <= 8; ++n) {
            const auto r = verify_orthogonality(p0, m, n, 1e-12);
            CHECK(r.residual == 0);
            CHECK(r.tail_bound == 0);
        }
}

TEST_CASE("orthogonality of q-Hahn is exact")
{
    const QH p{Rational(1, 3), Rational(-1, 2), 5, Rational(2, 3)};
    for (long m = 0; m <= 5; ++m)
        for (long n = 0; n <= 5; ++n)
            CHECK(verify_orthogonality(p, m, n).residual == 0);
    // sum_x Q_3^2 w_x times omega_3 is one
    Rational s(0);
    for (long x = 0; x <= 5; ++x)
        s += oracle::qhahn(3, x, p.a, p.b, 5, p.q) * oracle::qhahn(3, x, p.a, p.b, 5, p.q) * weight(p, x);
    CHECK(s * dual_weight(p, 3) == 1);
}

TEST_CASE("orthogonality of little q-Jacobi with a certified tail")
{
    const LittleQJacobiParams<double> p{0.5, 0.25, 0.5};
    for (long m = 0; m <= 6; ++m)
        for (long n = 0; n <= 6; ++n) {
            const auto r = verify_orthogonality(p, m, n, 1e-12);
            CHECK(r.residual <= 1e-9);
            CHECK(r.tail_bound <= 1e-12);
            CHECK(r.points > 0);
        }
    CHECK_THROWS_AS(verify_orthogonality(p, 2, 2, 1e-12, 3), ConvergenceError);
}

TEST_CASE("q -> 0 limits")
{
    const double q = 1e-4;
    const LittleQJacobiParams<double> p{0.5, 0.25, q};
    CHECK(limit_q_to_zero(2, 5, p) <= 10 * q);
    CHECK(limit_asymptotic(3, 1, p) <= 10 * q);
    CHECK_THROWS_AS(limit_asymptotic(3, 0, p), DomainError);
    CHECK_THROWS_AS(limit_asymptotic(3, 3, p), DomainError);
    const QHahnParams<double> h{0.5, 0.25, 10, q};
    for (long n = 0; n <= 10; ++n)
        for (long x = 0; x <= 10; ++x)
            CHECK(limit_q_to_zero(n, x, h) <= 10 * q);
    // the rational path at a tiny q is also within the bound
    const LQJ pr{kHalf, kQuarter, Rational(1, 10000)};
    CHECK(to_double(limit_q_to_zero(2, 5, pr)) <= 1e-3);
}

TEST_CASE("N -> infinity limit")
{
    const QHahnParams<double> h{0.5, 0.25, 40, 0.5};
    for (long n = 0; n <= 10; ++n)
        for (long x = 0; x <= 10; ++x)
            CHECK(limit_n_to_infinity(n, x, h) <= 1e-9);
}

TEST_CASE("duality and identification identities")
{
    const QH p{kHalf, Rational(1, 3), 3, kHalf, true};
    CHECK(verify_identity(IdentityKind::duality_qhahn, 2, 1, p) == 0);
    CHECK(verify_identity(IdentityKind::hahn_identification, 1, 2, p) == 0);
    for (auto k : {IdentityKind::duality_qhahn, IdentityKind::reversed_vs_direct, IdentityKind::hahn_identification})
        for (long N = 1; N <= 5; ++N)
            for (long n = 0; n <= N; ++n)
                for (long x = 0; x <= N; ++x) {
                    const QH pp{Rational(2, 7), Rational(-3, 5), N, Rational(3, 5), true};
                    CHECK(verify_identity(k, n, x, pp) == 0);
                }
    // base q^{-1} > 1 makes the dual side ill-conditioned in float; small N only
    const QHahnParams<double> pf{0.5, 1.0 / 3, 4, 0.5, true};
    for (long n = 0; n <= 4; ++n)
        CHECK(verify_identity(IdentityKind::duality_qhahn, n, 4 - n, pf) <= 1e-10);
}
