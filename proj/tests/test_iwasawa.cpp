#include <gtest/gtest.h>

#include <chrono>
#include <random>

#include "hmiw/iwasawa.hpp"

using namespace hmiw;

namespace {

mpz_class rnd(std::mt19937_64& g, const mpz_class& mod) {
    mpz_class r = 0;
    for (int i = 0; i < 4; ++i) r = (r << 64) + mpz_class(static_cast<unsigned long>(g()));
    return r % mod;
}

// p^μ · (T^λ + p·(lower terms)) · (random unit)
IwasawaElement random_element(std::mt19937_64& g, u64 p, long N, long M, long mu, long lam) {
    mpz_class mod = ppow(p, N);
    std::vector<mpz_class> d(static_cast<size_t>(M), 0);
    for (long i = 0; i < lam; ++i) d[static_cast<size_t>(i)] = p * rnd(g, mod);
    d[static_cast<size_t>(lam)] = 1;
    std::vector<mpz_class> u(static_cast<size_t>(M));
    for (auto& c : u) c = rnd(g, mod);
    if (u[0] % static_cast<unsigned long>(p) == 0) u[0] += 1;
    auto D = IwasawaElement::from_coeffs(p, N, M, d);
    auto U = IwasawaElement::from_coeffs(p, N, M, u);
    return (D * U).scaled(ppow(p, mu));
}

// Σ_{k≤K} (−1)^{k+1} z^k / k in exact rationals.
mpq_class log_series_exact(const mpq_class& z, int K) {
    mpq_class s = 0, zk = 1;
    for (int k = 1; k <= K; ++k) {
        zk *= z;
        s += (k % 2 ? 1 : -1) * zk / k;
    }
    return s;
}

}  // namespace

TEST(Padic, ArithmeticAgainstRationals) {
    std::mt19937_64 g(7);
    for (u64 p : {3u, 5u, 7u, 281u}) {
        for (int t = 0; t < 300; ++t) {
            mpq_class x(static_cast<long>(g() % 2001) - 1000, static_cast<long>(g() % 500) + 1);
            mpq_class y(static_cast<long>(g() % 2001) - 1000, static_cast<long>(g() % 500) + 1);
            x.canonicalize();
            y.canonicalize();
            long N = 12;
            auto X = Padic::from_rat(x, p, N), Y = Padic::from_rat(y, p, N);
            EXPECT_TRUE((X + Y).equal_mod(Padic::from_rat(x + y, p, N), (X + Y).precision()));
            auto XY = X * Y;
            EXPECT_TRUE(XY.equal_mod(Padic::from_rat(x * y, p, 40), XY.precision()));
            if (y != 0 && Y.val() < N) {
                auto Q = X / Y;
                EXPECT_TRUE(Q.equal_mod(Padic::from_rat(x / y, p, 40), Q.precision()));
            }
        }
    }
}

TEST(Padic, PrecisionTracking) {
    auto a = Padic::from_int(25, 5, 10);  // 5² + O(5^10)
    auto b = Padic::from_int(3, 5, 4);
    EXPECT_EQ((a * b).precision(), 6);
    EXPECT_EQ((a + b).precision(), 4);
    EXPECT_EQ((b / a).precision(), 2);
    EXPECT_EQ((b / a).val(), -2);
    EXPECT_THROW(b / Padic::from_int(0, 5, 4), PrecisionError);
    EXPECT_THROW(a.equal_mod(b, 5), PrecisionError);
}

TEST(Padic, Teichmuller) {
    for (u64 p : {5u, 7u, 13u}) {
        for (long a = 1; a < static_cast<long>(p); ++a) {
            auto w = teichmuller(a, p, 15);
            Padic x = Padic::from_int(1, p, 15);
            for (u64 i = 0; i < p - 1; ++i) x = x * w;
            EXPECT_TRUE(x.equal_mod(Padic::from_int(1, p, 15), 15));
            EXPECT_EQ(w.residue() % p, static_cast<unsigned long>(a));
        }
    }
}

TEST(Padic, Logarithm) {
    for (u64 p : {5u, 7u}) {
        long N = 15;
        // against the exact truncated series; terms past K are O(p^N)
        auto L = log_p(mpz_class(1 + p), p, N);
        EXPECT_TRUE(L.equal_mod(Padic::from_rat(log_series_exact(mpq_class(p), 40), p, N), N));
        // homomorphism on 1 + pℤ
        for (long x = 1; x < 200; x += static_cast<long>(p))
            for (long y = 1; y < 200; y += static_cast<long>(p)) {
                auto lhs = log_p(mpz_class(x * y), p, N);
                auto rhs = log_p(mpz_class(x), p, N) + log_p(mpz_class(y), p, N);
                EXPECT_TRUE(lhs.equal_mod(rhs, N));
            }
        EXPECT_EQ(log_p(mpz_class(1 + p), p, N).val(), 1);
    }
    EXPECT_THROW(log_p(mpz_class(2), 5, 10), std::invalid_argument);
}

TEST(Iwasawa, LambdaMuExamples) {
    auto f = IwasawaElement::from_coeffs(5, 10, 8, {5, 0, 1});
    auto r = lambda_mu(f);
    EXPECT_EQ(r.mu, 0);
    EXPECT_EQ(r.lambda, 2);
    EXPECT_TRUE(r.certified);
    auto g = IwasawaElement::from_coeffs(5, 10, 8, {5, 5});
    r = lambda_mu(g);
    EXPECT_EQ(r.mu, 1);
    EXPECT_EQ(r.lambda, 0);
    // (T − p)(T − p²)·(1 + 2T)
    auto a = IwasawaElement::from_coeffs(5, 10, 8, {-5, 1});
    auto b = IwasawaElement::from_coeffs(5, 10, 8, {-25, 1});
    auto u = IwasawaElement::from_coeffs(5, 10, 8, {1, 2});
    r = lambda_mu(a * b * u);
    EXPECT_EQ(r.mu, 0);
    EXPECT_EQ(r.lambda, 2);
    EXPECT_THROW(lambda_mu(IwasawaElement(5, 10, 8)), PrecisionError);
}

TEST(Iwasawa, WeierstrassExamples) {
    auto f = IwasawaElement::from_coeffs(5, 10, 8, {-5, 0, 1});
    auto w = weierstrass_prepare(f);
    EXPECT_EQ(w.lambda, 2);
    EXPECT_EQ(w.distinguished, (std::vector<mpz_class>{ppow(5, 10) - 5, 0, 1}));
    EXPECT_TRUE(w.unit.agrees_with(IwasawaElement::from_coeffs(5, 10, 8, {1}), w.N, w.M));

    auto g = IwasawaElement::from_coeffs(5, 12, 16, {1, 1, 0, 5}) * IwasawaElement::from_coeffs(5, 12, 16, {-5, 1});
    auto wg = weierstrass_prepare(g);
    EXPECT_EQ(wg.lambda, 1);
    EXPECT_EQ(wg.distinguished[0], ppow(5, 12) - 5);

    auto u = IwasawaElement::from_coeffs(5, 10, 8, {3, 7, 11});
    auto wu = weierstrass_prepare(u);
    EXPECT_EQ(wu.lambda, 0);
    EXPECT_EQ(wu.mu, 0);
    EXPECT_EQ(wu.distinguished, std::vector<mpz_class>{1});

    auto big = IwasawaElement::from_coeffs(5, 10, 8, {5, 5, 5, 5, 5, 1});
    EXPECT_THROW(weierstrass_prepare(big), PrecisionError);
}

TEST(Iwasawa, WeierstrassReconstruction) {
    std::mt19937_64 g(11);
    for (u64 p : {5u, 7u}) {
        for (int t = 0; t < 50; ++t) {
            long mu = static_cast<long>(g() % 3), lam = static_cast<long>(g() % 6);
            auto f = random_element(g, p, 20, 32, mu, lam);
            auto w = weierstrass_prepare(f);
            EXPECT_EQ(w.mu, mu);
            EXPECT_EQ(w.lambda, lam);
            for (long i = 0; i < lam; ++i) EXPECT_EQ(w.distinguished[static_cast<size_t>(i)] % p, 0);
            auto P = IwasawaElement::from_coeffs(p, w.N, w.M, w.distinguished);
            auto rebuilt = (P * w.unit).scaled(ppow(p, mu));
            EXPECT_TRUE(rebuilt.agrees_with(f, w.N, w.M));
        }
    }
}

TEST(Iwasawa, LambdaMuAdditive) {
    // 10³ random pairs, p ∈ {5, 7}, M = 32
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 g(2024);
    int checked = 0;
    for (int t = 0; t < 1000; ++t) {
        u64 p = t % 2 ? 5 : 7;
        auto f = random_element(g, p, 20, 32, static_cast<long>(g() % 4), static_cast<long>(g() % 8));
        auto h = random_element(g, p, 20, 32, static_cast<long>(g() % 4), static_cast<long>(g() % 8));
        auto a = lambda_mu(f), b = lambda_mu(h), c = lambda_mu(f * h);
        ASSERT_TRUE(a.certified && b.certified && c.certified);
        EXPECT_EQ(c.mu, a.mu + b.mu);
        EXPECT_EQ(c.lambda, a.lambda + b.lambda);
        auto u = random_element(g, p, 20, 32, 0, 0);
        auto d = lambda_mu(f * u);
        EXPECT_EQ(d.mu, a.mu);
        EXPECT_EQ(d.lambda, a.lambda);
        ++checked;
    }
    EXPECT_EQ(checked, 1000);
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 5.0);
}

TEST(Iwasawa, UnitInverse) {
    std::mt19937_64 g(3);
    auto u = random_element(g, 7, 15, 20, 0, 0);
    auto one = IwasawaElement::from_coeffs(7, 15, 20, {1});
    EXPECT_EQ(u * u.inverse(), one);
    EXPECT_THROW(IwasawaElement::from_coeffs(7, 15, 20, {7, 1}).inverse(), std::domain_error);
}

TEST(Iwasawa, BinomialSeries) {
    // (1+T)^c for c ∈ ℤ is the binomial polynomial
    for (long c : {0L, 1L, 2L, 5L, 13L}) {
        auto s = binomial_series(Padic::from_int(c, 5, 40), 16);
        for (long j = 0; j < 16; ++j) EXPECT_EQ(s.coeffs()[static_cast<size_t>(j)], binom(mpz_class(c), j) % ppow(5, s.p_precision()));
    }
    // (1+T)^a·(1+T)^b = (1+T)^{a+b} for p-adic a, b
    auto a = log_ratio(11, 6, 5, 30), b = log_ratio(21, 6, 5, 30);
    auto lhs = binomial_series(a, 12) * binomial_series(b, 12);
    auto rhs = binomial_series(a + b, 12);
    EXPECT_TRUE(lhs.agrees_with(rhs, 20, 12));
}

TEST(Iwasawa, EulerFactorExamples) {
    long N = 10, M = 16;
    auto one = IwasawaElement::constant(Padic::from_int(1, 5, N), M);
    EXPECT_EQ(euler_factor(Padic::from_int(0, 5, N), 7, 6, N, M), one);
    // Nq = 36 = 6²: 1 − 36^{−1}(1+T)²
    auto e = euler_factor(Padic::from_int(1, 5, N), 36, 6, N, M);
    auto inv36 = (Padic::from_int(1, 5, N) / Padic::from_int(36, 5, N)).residue();
    auto expect = one - IwasawaElement::from_coeffs(5, N, M, {1, 2, 1}).scaled(inv36);
    EXPECT_EQ(e, expect);
    // ⟨Nq⟩ = 1: Nq a Teichmüller representative
    auto w = teichmuller(2, 5, N + 4).residue();
    auto e2 = euler_factor(Padic::from_int(1, 5, N), w, 6, N, M);
    auto inv = (Padic::from_int(1, 5, N) / Padic::from_int(w, 5, N)).residue();
    EXPECT_EQ(e2, one - IwasawaElement::from_coeffs(5, N, M, {inv}));
    EXPECT_THROW(euler_factor(Padic::from_int(1, 5, N), 10, 6, N, M), std::invalid_argument);
    // value at T = 0
    auto e3 = euler_factor(Padic::from_int(-1, 5, N), 7, 6, N, M);
    auto v = (Padic::from_int(1, 5, N) + Padic::from_int(1, 5, N) / Padic::from_int(7, 5, N)).residue();
    EXPECT_EQ(evaluate(e3).c[0], v);
}

TEST(Iwasawa, EulerFactorLambda) {
    // λ(1 − a(1+T)^c) read off brute-force valuations: 0 when 1 − a is a unit
    for (long q : {2L, 3L, 7L, 11L, 13L, 17L, 19L, 23L}) {
        for (long chi : {1L, -1L}) {
            auto e = euler_factor(Padic::from_int(chi, 5, 12), q, 6, 12, 24);
            mpq_class a0 = 1 - mpq_class(chi, q);
            auto lm = lambda_mu(e);
            if (vp(a0, 5) == 0) EXPECT_EQ(lm.lambda, 0);
            long best = 99, idx = -1;
            for (long i = 0; i < 24; ++i) {
                auto c = e.coeffs()[static_cast<size_t>(i)];
                if (c != 0 && vp(c, 5) < best) best = vp(c, 5), idx = i;
            }
            EXPECT_EQ(lm.lambda, idx);
            EXPECT_EQ(lm.mu, best);
        }
    }
}

TEST(Iwasawa, EvaluateAtRootsOfUnity) {
    auto f = IwasawaElement::from_coeffs(5, 10, 8, {1, 1});
    EXPECT_EQ(evaluate(f).c[0], 1);
    // (1+T)^c at ζ−1 is ζ^c
    for (unsigned k : {1u, 2u}) {
        for (long c : {0L, 1L, 3L, 7L, 26L}) {
            auto s = binomial_series(Padic::from_int(c, 5, 60), 120);
            auto v = evaluate(s, k);
            auto z = cyclo_power(5, k, v.N, c);
            EXPECT_EQ(v, z) << k << " " << c;
        }
    }
    EXPECT_EQ(evaluate(f, 1).N, 2);
    EXPECT_THROW(evaluate(f, 2), PrecisionError);
}
