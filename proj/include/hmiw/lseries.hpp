#pragma once

#include "hmiw/characters.hpp"

#include <mutex>
#include <shared_mutex>
#include <variant>

namespace hmiw {

namespace detail {
struct BernoulliCache {
    std::shared_mutex mu;
    std::vector<mpq_class> vals{mpq_class(1)};
};
inline BernoulliCache& bernoulli_cache() {
    static BernoulliCache c;
    return c;
}
}  // namespace detail

/// B_n with B_1 = −1/2, from Σ_{k≤n} C(n+1,k)B_k = 0. Cached; concurrent readers, one writer.
inline mpq_class bernoulli(unsigned n) {
    if (n > 10000) throw std::invalid_argument("bernoulli: n > 10^4");
    auto& c = detail::bernoulli_cache();
    {
        std::shared_lock lk(c.mu);
        if (n < c.vals.size()) return c.vals[n];
    }
    std::unique_lock lk(c.mu);
    while (c.vals.size() <= n) {
        unsigned m = static_cast<unsigned>(c.vals.size());
        if (m > 1 && m % 2 == 1) {
            c.vals.emplace_back(0);
            continue;
        }
        mpq_class s = 0;
        mpz_class C = 1;  // C(m+1, k)
        for (unsigned k = 0; k < m; ++k) {
            if (c.vals[k] != 0) s += mpq_class(C) * c.vals[k];
            C = C * (m + 1 - k) / (k + 1);
        }
        c.vals.push_back(-s / mpq_class(m + 1));
    }
    return c.vals[n];
}

/// Coefficients of B_n(x), lowest degree first.
inline std::vector<mpq_class> bernoulli_poly(unsigned n) {
    std::vector<mpq_class> c(n + 1);
    mpz_class C = 1;
    for (unsigned k = 0; k <= n; ++k) {
        c[n - k] = mpq_class(C) * bernoulli(k);
        C = C * (n - k) / (k + 1);
    }
    return c;
}

inline mpq_class eval_poly(const std::vector<mpq_class>& c, const mpq_class& x) {
    mpq_class r = 0;
    for (size_t i = c.size(); i-- > 0;) r = r * x + c[i];
    return r;
}

/// Power sums S_j = Σ_{a=1}^{f} χ(a)·a^j, j = 0..n, split by exponent class of χ(a).
inline std::vector<std::vector<mpz_class>> character_power_sums(const DirichletCharacter& chi, unsigned n) {
    u64 f = chi.modulus();
    std::vector<std::vector<mpz_class>> S(n + 1, std::vector<mpz_class>(chi.order(), 0));
    for (u64 a = 1; a <= f; ++a) {
        int k = chi.exponent(static_cast<i64>(a));
        if (k < 0) continue;
        mpz_class A = static_cast<unsigned long>(a), pw = 1;
        for (unsigned j = 0; j <= n; ++j) {
            S[j][k] += pw;
            pw *= A;
        }
    }
    return S;
}

/// B_{n,χ} = Σ_k C(n,k)·B_k·f^{k−1}·S_{n−k}, as an element of ℚ(ζ_order).
inline Cyclo gen_bernoulli(const DirichletCharacter& chi, unsigned n) {
    if (n < 1) throw std::invalid_argument("gen_bernoulli: n >= 1");
    if (!chi.is_primitive()) throw std::invalid_argument("gen_bernoulli: character must be primitive");
    u64 f = chi.modulus();
    auto S = character_power_sums(chi, n);
    Cyclo out(chi.order());
    mpz_class C = 1;
    mpq_class fpow(1, static_cast<unsigned long>(f));  // f^{k−1}
    for (unsigned k = 0; k <= n; ++k) {
        mpq_class w = mpq_class(C) * bernoulli(k) * fpow;
        if (w != 0)
            for (unsigned r = 0; r < chi.order(); ++r)
                if (S[n - k][r] != 0) out.c[r] += w * mpq_class(S[n - k][r]);
        C = C * (n - k) / (k + 1);
        fpow *= static_cast<unsigned long>(f);
    }
    return out;
}

/// Rational B_{n,χ} for characters of order ≤ 2.
inline mpq_class gen_bernoulli_rational(const DirichletCharacter& chi, unsigned n) {
    mpq_class v;
    if (!gen_bernoulli(chi, n).is_rational(&v)) throw std::logic_error("gen_bernoulli_rational: not rational");
    return v;
}

struct LValueRecord {
    std::variant<DirichletCharacter, HeckeCharacterQF> character;
    long s = 0;
    Cyclo value;
    std::vector<std::string> stripped;
    bool pole_flag = false;  // trivial character at s = 0

    bool rational(mpq_class* out = nullptr) const { return value.is_rational(out); }
    mpq_class rational_value() const {
        mpq_class v;
        if (!value.is_rational(&v)) throw std::logic_error("LValueRecord: value not rational");
        return v;
    }
};

/// L(1−n, χ) = −B_{n,χ}/n.
inline LValueRecord dirichlet_L_neg(const DirichletCharacter& chi, unsigned n) {
    LValueRecord r;
    r.character = chi;
    r.s = 1 - static_cast<long>(n);
    r.value = gen_bernoulli(chi, n) * mpq_class(-1, n);
    r.pole_flag = chi.is_trivial() && n == 1;
    return r;
}

/// L_F(1−n, ε) = L(1−n, chi1)·L(1−n, chi2).
inline LValueRecord hecke_L_neg_induced(const HeckeCharacterQF& eps, unsigned n) {
    mpq_class a = dirichlet_L_neg(eps.chi1, n).rational_value();
    mpq_class b = a == 0 ? mpq_class(0) : dirichlet_L_neg(eps.chi2, n).rational_value();
    LValueRecord r;
    r.character = eps;
    r.s = 1 - static_cast<long>(n);
    r.value = Cyclo(1, a * b);
    return r;
}

/// Multiplies by Π_{𝔮∈Σ₀}(1 − ε(𝔮)N(𝔮)^{n−1}) at s = 1−n.
inline LValueRecord strip_euler(const LValueRecord& L, const std::vector<IdealQF>& sigma0) {
    const auto* eps = std::get_if<HeckeCharacterQF>(&L.character);
    if (!eps) throw std::invalid_argument("strip_euler: ideal set needs a Hecke character");
    LValueRecord r = L;
    unsigned long k = static_cast<unsigned long>(-L.s);  // n − 1
    for (auto& q : sigma0) {
        if (!q.is_prime()) throw std::invalid_argument("strip_euler: Σ₀ must contain prime ideals");
        int e = value_on_ideal(*eps, q);
        mpq_class factor = 1 - e * mpq_class(pow_z(q.norm(), k));
        r.value *= factor;
        r.stripped.push_back(q.str());
    }
    return r;
}

/// Dirichlet-side stripping by rational primes: Π(1 − χ(q)q^{n−1}).
inline LValueRecord strip_euler(const LValueRecord& L, const std::vector<u64>& primes) {
    const auto* chi = std::get_if<DirichletCharacter>(&L.character);
    if (!chi) throw std::invalid_argument("strip_euler: prime set needs a Dirichlet character");
    LValueRecord r = L;
    unsigned long k = static_cast<unsigned long>(-L.s);
    for (u64 q : primes) {
        Cyclo f(chi->order(), 1);
        f -= chi->value(static_cast<i64>(q)) * mpq_class(pow_z(mpz_class(static_cast<unsigned long>(q)), k));
        r.value = r.value * f;
        r.stripped.push_back(std::to_string(q));
    }
    return r;
}

}  // namespace hmiw
