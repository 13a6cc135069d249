#pragma once

#include "hmiw/padic.hpp"

#include <vector>

namespace hmiw {

/// Element of ℤ_p[[T]] mod (p^N, T^M); coefficients are representatives in [0, p^N).
class IwasawaElement {
  public:
    IwasawaElement() = default;
    IwasawaElement(u64 p, long N, long M) : p_(p), N_(N), a_(static_cast<size_t>(M), 0) {
        if (N < 0 || M < 1) throw std::invalid_argument("IwasawaElement: need N >= 0, M >= 1");
        mod_ = ppow(p, N);
    }
    static IwasawaElement from_coeffs(u64 p, long N, long M, const std::vector<mpz_class>& c) {
        IwasawaElement f(p, N, M);
        for (size_t i = 0; i < c.size() && i < f.a_.size(); ++i) f.a_[i] = c[i];
        f.reduce();
        return f;
    }
    static IwasawaElement constant(const Padic& c, long M) {
        IwasawaElement f(c.prime(), c.precision(), M);
        f.a_[0] = c.residue();
        f.reduce();
        return f;
    }

    u64 prime() const { return p_; }
    long p_precision() const { return N_; }
    long T_precision() const { return static_cast<long>(a_.size()); }
    const std::vector<mpz_class>& coeffs() const { return a_; }
    Padic coeff(long i) const { return Padic::from_int(a_.at(static_cast<size_t>(i)), p_, N_); }
    void set(long i, const mpz_class& v) {
        a_.at(static_cast<size_t>(i)) = v;
        reduce();
    }
    bool is_zero() const {
        for (auto& c : a_)
            if (c != 0) return false;
        return true;
    }

    IwasawaElement truncate(long N, long M) const {
        IwasawaElement r(p_, std::min(N, N_), std::min(M, T_precision()));
        for (size_t i = 0; i < r.a_.size(); ++i) r.a_[i] = a_[i];
        r.reduce();
        return r;
    }

    friend IwasawaElement operator+(const IwasawaElement& f, const IwasawaElement& g) {
        auto [x, y] = common(f, g);
        for (size_t i = 0; i < x.a_.size(); ++i) x.a_[i] += y.a_[i];
        x.reduce();
        return x;
    }
    friend IwasawaElement operator-(const IwasawaElement& f, const IwasawaElement& g) {
        auto [x, y] = common(f, g);
        for (size_t i = 0; i < x.a_.size(); ++i) x.a_[i] -= y.a_[i];
        x.reduce();
        return x;
    }
    friend IwasawaElement operator*(const IwasawaElement& f, const IwasawaElement& g) {
        auto [x, y] = common(f, g);
        size_t M = x.a_.size();
        IwasawaElement r(x.p_, x.N_, static_cast<long>(M));
        for (size_t i = 0; i < M; ++i) {
            if (x.a_[i] == 0) continue;
            for (size_t j = 0; i + j < M; ++j) r.a_[i + j] += x.a_[i] * y.a_[j];
        }
        r.reduce();
        return r;
    }
    IwasawaElement scaled(const mpz_class& c) const {
        IwasawaElement r = *this;
        for (auto& v : r.a_) v *= c;
        r.reduce();
        return r;
    }
    /// Inverse of a unit (a₀ ∈ ℤ_p^×).
    IwasawaElement inverse() const {
        if (N_ == 0 || a_[0] % static_cast<unsigned long>(p_) == 0)
            throw std::domain_error("IwasawaElement: constant term is not a unit");
        size_t M = a_.size();
        mpz_class inv0;
        mpz_invert(inv0.get_mpz_t(), a_[0].get_mpz_t(), mod_.get_mpz_t());
        IwasawaElement r(p_, N_, static_cast<long>(M));
        r.a_[0] = inv0;
        for (size_t k = 1; k < M; ++k) {
            mpz_class s = 0;
            for (size_t i = 1; i <= k; ++i) s += a_[i] * r.a_[k - i];
            r.a_[k] = -s * inv0 % mod_;
        }
        r.reduce();
        return r;
    }
    bool operator==(const IwasawaElement& o) const { return p_ == o.p_ && N_ == o.N_ && a_ == o.a_; }

    /// Equality mod (p^N, T^M) after reducing both to the common precision.
    bool agrees_with(const IwasawaElement& o, long N, long M) const {
        auto x = truncate(N, M), y = o.truncate(N, M);
        auto [u, v] = common(x, y);
        return u.a_ == v.a_;
    }

  private:
    static std::pair<IwasawaElement, IwasawaElement> common(const IwasawaElement& f, const IwasawaElement& g) {
        if (f.p_ != g.p_) throw std::invalid_argument("IwasawaElement: mismatched primes");
        long N = std::min(f.N_, g.N_), M = std::min(f.T_precision(), g.T_precision());
        return {f.truncate(N, M), g.truncate(N, M)};
    }
    void reduce() {
        for (auto& v : a_) {
            v %= mod_;
            if (v < 0) v += mod_;
        }
    }

    u64 p_ = 2;
    long N_ = 0;
    mpz_class mod_ = 1;
    std::vector<mpz_class> a_;
};

struct LambdaMu {
    long mu = 0;
    long lambda = 0;
    bool certified = false;
};

/// μ = min v_p(a_i), λ = least index attaining it; the tail beyond T^M is assumed not to lower μ.
inline LambdaMu lambda_mu(const IwasawaElement& f) {
    LambdaMu r;
    long best = f.p_precision();
    long idx = -1;
    for (long i = 0; i < f.T_precision(); ++i) {
        const auto& c = f.coeffs()[static_cast<size_t>(i)];
        if (c == 0) continue;
        long v = vp(c, f.prime());
        if (v < best) {
            best = v;
            idx = i;
        }
    }
    if (idx < 0) throw PrecisionError("lambda_mu: indistinguishable-from-zero");
    r.mu = best;
    r.lambda = idx;
    r.certified = best < f.p_precision();
    return r;
}

struct WeierstrassData {
    long mu = 0;
    long lambda = 0;
    std::vector<mpz_class> distinguished;  // monic, degree λ, lowest first
    IwasawaElement unit;
    bool certified = false;
    long N = 0, M = 0;  // reconstruction holds mod (p^N, T^M)
};

/// f = p^μ·P·U by Weierstrass division of T^λ by f/p^μ.
inline WeierstrassData weierstrass_prepare(const IwasawaElement& f) {
    auto lm = lambda_mu(f);
    u64 p = f.prime();
    long N = f.p_precision() - lm.mu, M = f.T_precision(), lam = lm.lambda;
    if (!lm.certified) throw PrecisionError("weierstrass_prepare: invariants not certified");
    if (M - lam < std::max(lam, 1L))
        throw PrecisionError("weierstrass_prepare: need M >= " + std::to_string(2 * lam + 1) + " (have " +
                             std::to_string(M) + ")");
    mpz_class pm = ppow(p, lm.mu);
    std::vector<mpz_class> g(static_cast<size_t>(M));
    for (long i = 0; i < M; ++i) g[static_cast<size_t>(i)] = f.coeffs()[static_cast<size_t>(i)] / pm;
    auto G = IwasawaElement::from_coeffs(p, N, M, g);
    long Mq = M - lam;
    // C = τ(G), the shifted tail, a unit
    std::vector<mpz_class> tail(g.begin() + lam, g.end());
    auto C = IwasawaElement::from_coeffs(p, N, Mq, tail);
    auto Cinv = C.inverse();
    // h = T^λ; iterate q_k = C^{-1}·τ(h_k), h_{k+1} = h_k − q_k·G
    auto h = IwasawaElement(p, N, M);
    h.set(lam, 1);
    IwasawaElement q(p, N, Mq);
    for (long it = 0; it <= N + 1; ++it) {
        std::vector<mpz_class> th(h.coeffs().begin() + lam, h.coeffs().end());
        auto TH = IwasawaElement::from_coeffs(p, N, Mq, th);
        if (TH.is_zero()) break;
        auto qk = Cinv * TH;
        q = q + qk;
        std::vector<mpz_class> qkM(qk.coeffs());
        qkM.resize(static_cast<size_t>(M), 0);
        h = h - IwasawaElement::from_coeffs(p, N, M, qkM) * G;
    }
    WeierstrassData w;
    w.mu = lm.mu;
    w.lambda = lam;
    w.distinguished.assign(static_cast<size_t>(lam) + 1, 0);
    mpz_class mod = ppow(p, N);
    for (long i = 0; i < lam; ++i) {
        mpz_class v = -h.coeffs()[static_cast<size_t>(i)] % mod;
        if (v < 0) v += mod;
        w.distinguished[static_cast<size_t>(i)] = v;
    }
    w.distinguished[static_cast<size_t>(lam)] = 1;
    w.unit = q.inverse();
    w.N = N;
    w.M = Mq;
    w.certified = true;
    return w;
}

/// (1+T)^c for integral c; output precision is N if c is known to N + v_p((M−1)!).
inline IwasawaElement binomial_series(const Padic& c, long M) {
    u64 p = c.prime();
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(M - 1));
    long N = c.precision() - vp(f, p);
    if (N < 1) throw PrecisionError("binomial_series: exponent precision too low");
    std::vector<mpz_class> a(static_cast<size_t>(M));
    for (long j = 0; j < M; ++j) a[static_cast<size_t>(j)] = binom_padic(c, static_cast<unsigned long>(j)).residue();
    return IwasawaElement::from_coeffs(p, N, M, a);
}

/// Working precision for c so that binomial_series(c, M) is known to p^N.
inline long exponent_precision(u64 p, long N, long M) {
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(std::max(M - 1, 0L)));
    return N + vp(f, p);
}

/// log_p⟨x⟩ / log_p u, the exponent c with ⟨x⟩ = u^c.
inline Padic log_ratio(const mpz_class& x, const mpz_class& u, u64 p, long N) {
    long W = N + 2;
    auto lx = log_p(one_unit_part(x, p, W + 1));
    auto lu = log_p(Padic::from_int(u, p, W + 1));
    if (lu.val() != 1) throw std::invalid_argument("log_ratio: u must generate 1 + pZ_p");
    return (lx / lu).with_precision(N);
}

/// 1 − χq·Nq^{−1}·(1+T)^c with c = log_p⟨Nq⟩ / log_p u.
inline IwasawaElement euler_factor(const Padic& chi_q, const mpz_class& Nq, const mpz_class& u, long N, long M) {
    u64 p = chi_q.prime();
    if (Nq % static_cast<unsigned long>(p) == 0) throw std::invalid_argument("euler_factor: p divides Nq");
    auto one = IwasawaElement::constant(Padic::from_int(1, p, N), M);
    if (chi_q.with_precision(N).is_zero()) return one;
    Padic c = log_ratio(Nq, u, p, exponent_precision(p, N, M));
    auto ser = binomial_series(c, M).truncate(N, M);
    Padic k = (chi_q / Padic::from_int(Nq, p, N + 1)).with_precision(N);
    return one - ser.scaled(k.residue());
}

/// Element of ℤ_p[ζ] with ζ of order p^k, in the power basis 1, ζ, …, ζ^{φ−1}, known mod p^N.
struct CycloPadic {
    u64 p = 2;
    unsigned k = 0;
    long N = 0;
    std::vector<mpz_class> c;
    bool operator==(const CycloPadic& o) const { return p == o.p && k == o.k && N == o.N && c == o.c; }
};

/// f(ζ−1); k = 0 gives f(0). Precision min(N, ⌊M/φ(p^k)⌋).
inline CycloPadic evaluate(const IwasawaElement& f, unsigned k = 0) {
    u64 p = f.prime();
    CycloPadic r;
    r.p = p;
    r.k = k;
    if (k == 0) {
        r.N = f.p_precision();
        r.c = {f.coeffs()[0]};
        return r;
    }
    mpz_class pk1 = ppow(p, k - 1);
    long phi = static_cast<long>((p - 1) * pk1.get_ui());
    long N = std::min(f.p_precision(), f.T_precision() / phi);
    if (N < 1) throw PrecisionError("evaluate: need M >= " + std::to_string(phi) + " for k = " + std::to_string(k));
    mpz_class mod = ppow(p, N);
    size_t n = static_cast<size_t>(phi);
    long step = static_cast<long>(pk1.get_ui());
    // reduce x^n by Φ_{p^k}(x) = Σ_{i<p} x^{i·p^{k−1}}
    auto reduce = [&](std::vector<mpz_class>& v) {
        for (size_t i = v.size(); i-- > n;) {
            if (v[i] == 0) continue;
            mpz_class t = v[i];
            v[i] = 0;
            size_t base = i - n;
            for (long j = 0; j < static_cast<long>(p) - 1; ++j) v[base + static_cast<size_t>(j * step)] -= t;
        }
        v.resize(n);
        for (auto& x : v) {
            x %= mod;
            if (x < 0) x += mod;
        }
    };
    // Horner in X = ζ − 1
    std::vector<mpz_class> acc(n, 0);
    for (long j = f.T_precision(); j-- > 0;) {
        std::vector<mpz_class> nxt(n + 1, 0);
        for (size_t i = 0; i < n; ++i) {
            nxt[i + 1] += acc[i];
            nxt[i] -= acc[i];
        }
        nxt[0] += f.coeffs()[static_cast<size_t>(j)];
        reduce(nxt);
        acc = nxt;
    }
    r.N = N;
    r.c = acc;
    return r;
}

/// ζ^e in the same representation.
inline CycloPadic cyclo_power(u64 p, unsigned k, long N, const mpz_class& e) {
    mpz_class pk = ppow(p, k), pk1 = ppow(p, k - 1);
    size_t n = static_cast<size_t>((p - 1) * pk1.get_ui());
    mpz_class em = e % pk;
    if (em < 0) em += pk;
    size_t i = em.get_ui();
    std::vector<mpz_class> v(std::max(n, i + 1), 0);
    v[i] = 1;
    mpz_class mod = ppow(p, N);
    size_t step = pk1.get_ui();
    for (size_t t = v.size(); t-- > n;) {
        if (v[t] == 0) continue;
        mpz_class c = v[t];
        v[t] = 0;
        for (size_t j = 0; j + 1 < p; ++j) v[t - n + j * step] -= c;
    }
    v.resize(n);
    for (auto& x : v) {
        x %= mod;
        if (x < 0) x += mod;
    }
    return {p, k, N, v};
}

}  // namespace hmiw
