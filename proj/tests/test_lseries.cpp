#include <gtest/gtest.h>

#include <chrono>

#include "hmiw/lseries.hpp"

using namespace hmiw;

namespace {

// f^{n−1} Σ χ(a) B_n(a/f), evaluated term by term.
Cyclo gen_bernoulli_direct(const DirichletCharacter& chi, unsigned n) {
    auto P = bernoulli_poly(n);
    u64 f = chi.modulus();
    Cyclo s(chi.order());
    for (u64 a = 1; a <= f; ++a) {
        int k = chi.exponent((i64)a);
        if (k < 0) continue;
        s.add_term(k, eval_poly(P, mpq_class((unsigned long)a, (unsigned long)f)));
    }
    return s * mpq_class(pow_z(mpz_class((unsigned long)f), n - 1));
}

}  // namespace

TEST(LSeries, Bernoulli) {
    EXPECT_EQ(bernoulli(0), 1);
    EXPECT_EQ(bernoulli(1), mpq_class(-1, 2));
    EXPECT_EQ(bernoulli(2), mpq_class(1, 6));
    EXPECT_EQ(bernoulli(3), 0);
    EXPECT_EQ(bernoulli(12), mpq_class(-691, 2730));
    EXPECT_EQ(bernoulli(20), mpq_class(-174611, 330));
    EXPECT_THROW(bernoulli(10001), std::invalid_argument);
}

TEST(LSeries, VonStaudtClausen) {
    for (unsigned n = 2; n <= 60; n += 2) {
        mpz_class den = 1;
        for (u64 p : primes_up_to(n + 1))
            if (n % (p - 1) == 0) den *= (unsigned long)p;
        EXPECT_EQ(mpz_class(bernoulli(n).get_den()), den) << n;
    }
}

TEST(LSeries, GenBernoulliExamples) {
    DirichletCharacter triv;
    EXPECT_EQ(gen_bernoulli_rational(triv, 2), mpq_class(1, 6));
    auto c5 = kronecker_character(5);
    EXPECT_EQ(gen_bernoulli_rational(c5, 2), mpq_class(4, 5));
    EXPECT_EQ(gen_bernoulli_rational(c5, 1), 0);
    EXPECT_EQ(gen_bernoulli_rational(kronecker_character(40), 2), 28);
}

TEST(LSeries, GenBernoulliAgainstDirect) {
    for (u64 f = 1; f <= 40; ++f) {
        for (auto& chi : primitive_characters(f)) {
            for (unsigned n = 1; n <= 5; ++n) EXPECT_EQ(gen_bernoulli(chi, n), gen_bernoulli_direct(chi, n)) << f << " " << n;
        }
    }
}

TEST(LSeries, ParityVanishing) {
    for (u64 f = 3; f <= 100; ++f) {
        for (auto& chi : primitive_characters(f)) {
            for (unsigned n = 1; n <= 6; ++n) {
                bool even_n = n % 2 == 0;
                if ((chi.parity() == Parity::even) != even_n) EXPECT_TRUE(gen_bernoulli(chi, n).is_zero()) << f << " " << n;
            }
        }
    }
}

TEST(LSeries, DirichletLValues) {
    DirichletCharacter triv;
    EXPECT_EQ(dirichlet_L_neg(triv, 2).rational_value(), mpq_class(-1, 12));
    auto l5 = dirichlet_L_neg(kronecker_character(5), 2).rational_value();
    EXPECT_EQ(l5, mpq_class(-2, 5));
    EXPECT_EQ(l5 * mpq_class(-1, 12), mpq_class(1, 30));  // ζ_{ℚ(√5)}(−1)
    EXPECT_EQ(dirichlet_L_neg(kronecker_character(-3), 1).rational_value(), mpq_class(1, 3));
    auto z0 = dirichlet_L_neg(triv, 1);
    EXPECT_TRUE(z0.pole_flag);
    EXPECT_EQ(z0.rational_value(), mpq_class(-1, 2));  // ζ(0)
}

TEST(LSeries, DenominatorBound) {
    for (long D : {5L, 8L, 12L, 13L, 40L, -3L, -4L, -7L, 21L, 28L}) {
        auto chi = kronecker_character(D);
        for (unsigned n = 1; n <= 6; ++n) {
            mpq_class v = dirichlet_L_neg(chi, n).rational_value();
            mpz_class bound = 4 * n * pow_z(mpz_class((unsigned long)chi.conductor()), n);
            EXPECT_LE(mpz_class(v.get_den()), bound);
        }
    }
}

TEST(LSeries, LValueM20149) {
    auto t0 = std::chrono::steady_clock::now();
    auto F = make_field(2);
    auto eps = induce_quadratic(F, 20149);
    auto L = hecke_L_neg_induced(eps, 2);
    mpq_class v = L.rational_value();
    EXPECT_EQ(v, mpq_class(mpz_class("373322926540")));
    EXPECT_EQ(v, 4 * 5 * 281 * 4951 * mpq_class(13417));
    EXPECT_EQ(gen_bernoulli_rational(eps.chi1, 2), 268340);
    EXPECT_EQ(gen_bernoulli_rational(eps.chi2, 2), 5564924);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_LT(secs, 5.0);
}

TEST(LSeries, StripEuler) {
    auto F = make_field(2);
    auto eps = induce_quadratic(F, 20149);
    auto L = hecke_L_neg_induced(eps, 2);
    EXPECT_EQ(strip_euler(L, std::vector<IdealQF>{}).rational_value(), L.rational_value());
    auto s3 = strip_euler(L, {ideal_of_integer(F, 3)});
    EXPECT_EQ(s3.rational_value(), -8 * L.rational_value());
    EXPECT_EQ(strip_euler(L, {eps.conductor_ideal}).rational_value(), L.rational_value());
    // multiplicative over disjoint sets
    std::vector<IdealQF> A{ideal_of_integer(F, 3), IdealQF::prime(7, PrimeTag::split1)};
    std::vector<IdealQF> B{IdealQF::prime(2, PrimeTag::ramified), IdealQF::prime(7, PrimeTag::split2)};
    std::vector<IdealQF> AB = A;
    AB.insert(AB.end(), B.begin(), B.end());
    EXPECT_EQ(strip_euler(strip_euler(L, A), B).rational_value(), strip_euler(L, AB).rational_value());
    EXPECT_EQ(s3.stripped.size(), 1u);
}

TEST(LSeries, IdealSeriesMatchesEulerProduct) {
    // Σ_{N𝔞 = k} ε(𝔞) equals the Dirichlet convolution of chi1 and chi2, k ≤ 10⁴.
    for (auto [d, m] : std::vector<std::pair<long, long>>{{2, 5}, {2, 20149}, {3, 7}}) {
        auto F = make_field(d);
        auto eps = induce_quadratic(F, m);
        const u64 B = 10000;
        std::vector<long> lhs(B + 1, 0), rhs(B + 1, 0);
        for (auto& I : ideals_up_to(F, B)) lhs[I.norm().get_ui()] += value_on_ideal(eps, I);
        for (u64 a = 1; a <= B; ++a)
            for (u64 b = 1; a * b <= B; ++b) rhs[a * b] += eps.chi1.value_int(a) * eps.chi2.value_int(b);
        for (u64 k = 1; k <= B; ++k) ASSERT_EQ(lhs[k], rhs[k]) << d << " " << m << " " << k;
    }
}
