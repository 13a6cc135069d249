#include <gtest/gtest.h>

#include <complex>

#include "hmiw/characters.hpp"

using namespace hmiw;

namespace {

// Direct double-precision Gauss sum oracle.
std::complex<double> gauss_direct(const DirichletCharacter& chi) {
    std::complex<double> s = 0;
    const double tau = 2 * std::acos(-1.0);
    for (u64 a = 0; a < chi.modulus(); ++a) {
        int k = chi.exponent((i64)a);
        if (k < 0) continue;
        s += std::polar(1.0, tau * (double(k) / chi.order() + double(a) / chi.modulus()));
    }
    return s;
}

u64 euler_phi(u64 n) {
    u64 r = n;
    for (auto [q, e] : factor_small(n)) r = r / q * (q - 1);
    return r;
}

// Number of primitive characters of conductor f (Jordan-type formula).
u64 primitive_count(u64 f) {
    u64 r = 1;
    for (auto [q, e] : factor_small(f)) {
        u64 qe = 1;
        for (int i = 0; i < e; ++i) qe *= q;
        if (e == 1) r *= q - 2;
        else r *= qe / (q * q) * (q - 1) * (q - 1);
    }
    return r;
}

}  // namespace

TEST(Characters, Kronecker) {
    auto c5 = kronecker_character(5);
    EXPECT_EQ(c5.value_int(2), -1);
    EXPECT_EQ(c5.parity(), Parity::even);
    EXPECT_EQ(c5.conductor(), 5u);
    auto c4 = kronecker_character(-4);
    EXPECT_EQ(c4.value_int(3), -1);
    EXPECT_EQ(c4.parity(), Parity::odd);
    auto c8 = kronecker_character(8);
    EXPECT_EQ(c8.value_int(7), 1);
    EXPECT_EQ(c8.parity(), Parity::even);
    EXPECT_THROW(kronecker_character(20), std::invalid_argument);
    EXPECT_THROW(kronecker_character(3), std::invalid_argument);
}

TEST(Characters, GroupStructure) {
    for (u64 m = 1; m <= 150; ++m) {
        auto chars = all_characters(m);
        ASSERT_EQ(chars.size(), euler_phi(m)) << m;
        u64 prim = 0;
        for (auto& c : chars) {
            if (c.is_primitive()) ++prim;
            // multiplicativity and order
            for (u64 a = 1; a < m; a += 7)
                for (u64 b = 1; b < m; b += 5) {
                    int ka = c.exponent(a), kb = c.exponent(b), kab = c.exponent(a * b);
                    if (ka < 0 || kb < 0) {
                        EXPECT_LT(kab, 0);
                        continue;
                    }
                    EXPECT_EQ((ka + kb) % (int)c.order(), kab);
                }
            // conductor property: trivial on units ≡ 1 mod f
            for (u64 a = 1; a < m; a += c.conductor())
                if (c.is_unit(a)) EXPECT_EQ(c.exponent(a), 0);
        }
        EXPECT_EQ(prim, primitive_count(m)) << m;
    }
}

TEST(Characters, PrimitiveAndInduce) {
    auto c5 = kronecker_character(5);
    auto c20 = c5.induce(20);
    EXPECT_EQ(c20.conductor(), 5u);
    EXPECT_FALSE(c20.is_primitive());
    EXPECT_EQ(c20.primitive(), c5);
    auto prod = kronecker_character(-3) * kronecker_character(-4);
    EXPECT_EQ(prod.primitive(), kronecker_character(12));
}

TEST(Characters, InduceQuadratic) {
    auto F2 = make_field(2);
    auto e = induce_quadratic(F2, 20149);
    EXPECT_EQ(e.chi1.conductor(), 20149u);
    EXPECT_EQ(e.chi2.conductor(), 8u * 20149u);
    auto e5 = induce_quadratic(F2, 5);
    EXPECT_EQ(e5.chi1, kronecker_character(5));
    EXPECT_EQ(e5.chi2, kronecker_character(40));
    auto F3 = make_field(3);
    auto e7 = induce_quadratic(F3, 7);
    EXPECT_EQ(e7.chi1.conductor(), 28u);
    EXPECT_EQ(e7.chi2.conductor(), 21u);
    EXPECT_THROW(induce_quadratic(F3, 15), std::invalid_argument);
    EXPECT_THROW(induce_quadratic(F2, 9), std::invalid_argument);
}

TEST(Characters, ValueOnIdeal) {
    auto F2 = make_field(2);
    auto e = induce_quadratic(F2, 20149);
    EXPECT_EQ(value_on_ideal(e, IdealQF{}), 1);
    EXPECT_EQ(value_on_ideal(e, ideal_of_integer(F2, 3)), 1);
    EXPECT_EQ(value_on_ideal(e, IdealQF::prime(7, PrimeTag::split1)), kronecker(20149, 7));
    EXPECT_EQ(value_on_ideal(e, e.conductor_ideal), 0);
    // agrees with chi1(N𝔞) for d = 2
    for (auto& I : ideals_up_to(F2, 2000)) {
        mpz_class n = I.norm();
        EXPECT_EQ(value_on_ideal(e, I), e.chi1.value_int(n.get_si())) << I.str();
    }
}

TEST(Characters, ValueOnIdealMultiplicative) {
    auto F2 = make_field(2);
    for (long m : {5L, 13L, 20149L}) {
        auto e = induce_quadratic(F2, m);
        auto all = ideals_up_to(F2, 300);
        for (auto& a : all)
            for (auto& b : all) {
                if (a.norm() * b.norm() > 10000) continue;
                EXPECT_EQ(value_on_ideal(e, ideal_mul(a, b)), value_on_ideal(e, a) * value_on_ideal(e, b));
            }
    }
}

TEST(Characters, EulerProduct) {
    for (auto [d, m] : std::vector<std::pair<long, long>>{{2, 5}, {2, 20149}, {3, 7}, {5, 3}, {13, 3}, {6, 5}}) {
        auto F = make_field(d);
        auto e = induce_quadratic(F, m);
        for (u64 p : primes_up_to(500)) {
            if (e.m % (long)p == 0) continue;
            // Π_𝔭 (1 − ε(𝔭)X^{f}) vs (1 − a X)(1 − b X), coefficients of X, X²
            long c1 = 0, c2 = 0;
            auto st = splitting_type(F, p);
            if (st == Splitting::inert) {
                c2 = -value_on_prime(e, p, PrimeTag::inert);
            } else if (st == Splitting::split) {
                int v1 = value_on_prime(e, p, PrimeTag::split1), v2 = value_on_prime(e, p, PrimeTag::split2);
                c1 = -(v1 + v2);
                c2 = v1 * v2;
            } else {
                c1 = -value_on_prime(e, p, PrimeTag::ramified);
            }
            int a = e.chi1.value_int(p), b = e.chi2.value_int(p);
            EXPECT_EQ(c1, -(a + b)) << d << " " << m << " " << p;
            EXPECT_EQ(c2, a * b) << d << " " << m << " " << p;
        }
        // chi1·chi2 = χ_F on primes coprime to conductors
        auto chiF = kronecker_character(F.disc);
        for (u64 p : primes_up_to(1000)) {
            int a = e.chi1.value_int(p), b = e.chi2.value_int(p), c = chiF.value_int(p);
            if (a && b && c) EXPECT_EQ(a * b, c);
        }
        // totally even: both factors even
        EXPECT_EQ(e.chi1.parity(), Parity::even);
        EXPECT_EQ(e.chi2.parity(), Parity::even);
    }
}

TEST(Characters, GaussSumQuadratic) {
    DirichletCharacter triv;
    auto g1 = gauss_sum(triv);
    EXPECT_TRUE(g1.exact);
    EXPECT_EQ(g1.radicand, 1u);
    auto g5 = gauss_sum(kronecker_character(5));
    EXPECT_EQ(g5.radicand, 5u);
    EXPECT_FALSE(g5.imaginary);
    auto g3 = gauss_sum(kronecker_character(-3));
    EXPECT_TRUE(g3.imaginary);
    for (long D : {5L, -3L, -4L, 8L, -8L, 12L, 13L, -7L, 40L, 21L, 28L, -20L}) {
        auto chi = kronecker_character(D);
        auto g = gauss_sum(chi);
        auto z = gauss_direct(chi);
        EXPECT_NEAR(z.real(), g.re_d, 1e-9) << D;
        EXPECT_NEAR(z.imag(), g.im_d, 1e-9) << D;
    }
    EXPECT_THROW(gauss_sum(kronecker_character(5).induce(10)), std::invalid_argument);
}

TEST(Characters, GaussSumGeneral) {
    for (u64 f : {5u, 7u, 9u, 13u, 16u, 35u}) {
        for (auto& chi : primitive_characters(f)) {
            if (chi.order() <= 2) continue;
            auto g = gauss_sum(chi);
            EXPECT_LE(g.radius, 1e-30);
            auto z = gauss_direct(chi);
            EXPECT_NEAR(z.real(), g.re_d, 1e-9);
            EXPECT_NEAR(z.imag(), g.im_d, 1e-9);
            // |τ|² = f from the high-precision midpoints
            mpf_class re(g.re, 256), im(g.im, 256);
            mpf_class n2 = re * re + im * im - mpf_class(f);
            EXPECT_LT(abs(n2), 1e-30);
        }
    }
}

TEST(Characters, CycloArithmetic) {
    auto z = Cyclo::zeta_pow(3, 1);
    auto s = Cyclo(3, 1) + z + z * z;
    EXPECT_TRUE(s.is_zero());
    auto phi12 = cyclotomic_poly(12);
    EXPECT_EQ(phi12.size(), 5u);  // x⁴ − x² + 1
    EXPECT_EQ(phi12[0], 1);
    EXPECT_EQ(phi12[2], -1);
    EXPECT_EQ(phi12[4], 1);
    mpq_class r;
    EXPECT_TRUE((z * Cyclo::zeta_pow(3, 2)).is_rational(&r));
    EXPECT_EQ(r, 1);
}
