#pragma once

#include "hmiw/arith.hpp"

#include <cmath>
#include <string>
#include <tuple>

namespace hmiw {

/// Element a + b·ω of the ring of integers, ω = √d or (1+√d)/2.
struct QElem {
    mpz_class a, b;
    bool operator==(const QElem& o) const { return a == o.a && b == o.b; }
};

enum class Splitting { split, inert, ramified };
enum class PrimeTag { split1, split2, inert, ramified };

inline const char* tag_name(PrimeTag t) {
    switch (t) {
        case PrimeTag::split1: return "split1";
        case PrimeTag::split2: return "split2";
        case PrimeTag::inert: return "inert";
        case PrimeTag::ramified: return "ramified";
    }
    return "?";
}

inline PrimeTag tag_from_name(const std::string& s) {
    if (s == "split1") return PrimeTag::split1;
    if (s == "split2") return PrimeTag::split2;
    if (s == "inert") return PrimeTag::inert;
    if (s == "ramified") return PrimeTag::ramified;
    throw std::invalid_argument("unknown prime tag: " + s);
}

struct RealQuadraticField {
    long d = 0;
    long disc = 0;
    bool half = false;  // basis Z[(1+√d)/2]
    QElem fund_unit;
    int fund_unit_norm = 0;
    QElem u_plus;

    long omega_c() const { return (d - 1) / 4; }  // ω² = ω + c when half

    QElem mul(const QElem& x, const QElem& y) const {
        if (!half) return {x.a * y.a + d * x.b * y.b, x.a * y.b + x.b * y.a};
        mpz_class bb = x.b * y.b;
        return {x.a * y.a + omega_c() * bb, x.a * y.b + x.b * y.a + bb};
    }
    QElem conj(const QElem& x) const {
        if (!half) return {x.a, -x.b};
        return {x.a + x.b, -x.b};
    }
    mpz_class norm(const QElem& x) const {
        if (!half) return x.a * x.a - d * x.b * x.b;
        return x.a * x.a + x.a * x.b - omega_c() * x.b * x.b;
    }
    mpz_class trace(const QElem& x) const {
        if (!half) return 2 * x.a;
        return 2 * x.a + x.b;
    }
    /// Real embedding with √d > 0 (sign = +1) or √d < 0 (sign = −1).
    double embed(const QElem& x, int sign = 1) const {
        double s = sign * std::sqrt(static_cast<double>(d));
        double w = half ? (1.0 + s) / 2.0 : s;
        return x.a.get_d() + x.b.get_d() * w;
    }
};

/// Fundamental unit from the continued fraction of −ω̄.
inline RealQuadraticField make_field(long d) {
    if (d <= 1) throw std::invalid_argument("make_field: d must be >= 2");
    if (!is_squarefree(static_cast<u64>(d))) throw std::invalid_argument("make_field: d not squarefree");
    RealQuadraticField F;
    F.d = d;
    F.half = (d % 4 == 1);
    F.disc = F.half ? d : 4 * d;
    mpz_class D = d, s;
    mpz_sqrt(s.get_mpz_t(), D.get_mpz_t());
    mpz_class P = F.half ? -1 : 0, Q = F.half ? 2 : 1;
    mpz_class h1 = 1, h2 = 0, k1 = 0, k2 = 1;  // h_{n-1}, h_{n-2}, ...
    for (long step = 0; step < 1000000; ++step) {
        mpz_class a;
        mpz_class num = P + s;
        mpz_fdiv_q(a.get_mpz_t(), num.get_mpz_t(), Q.get_mpz_t());
        mpz_class h = a * h1 + h2, k = a * k1 + k2;
        h2 = h1;
        h1 = h;
        k2 = k1;
        k1 = k;
        QElem e{h, k};
        mpz_class n = F.norm(e);
        if (k > 0 && (n == 1 || n == -1)) {
            F.fund_unit = e;
            F.fund_unit_norm = static_cast<int>(n.get_si());
            F.u_plus = n == 1 ? e : F.mul(e, e);
            return F;
        }
        P = a * Q - P;
        Q = (D - P * P) / Q;
    }
    throw std::runtime_error("make_field: continued fraction exceeded 10^6 steps");
}

inline Splitting splitting_type(const RealQuadraticField& F, u64 p) {
    if (!is_prime_u64(p)) throw std::invalid_argument("splitting_type: p not prime");
    if (F.disc % static_cast<long>(p) == 0) return Splitting::ramified;
    return kronecker(F.disc, static_cast<i64>(p)) == 1 ? Splitting::split : Splitting::inert;
}

struct PrimeFactor {
    u64 p;
    PrimeTag tag;
    int e;
    auto key() const { return std::make_tuple(p, static_cast<int>(tag)); }
    bool operator==(const PrimeFactor& o) const { return p == o.p && tag == o.tag && e == o.e; }
};

/// Integral ideal of a field with h⁺ = 1, stored by its prime-ideal factorization.
struct IdealQF {
    std::vector<PrimeFactor> factors;  // sorted by (p, tag), e ≥ 1

    static u64 prime_norm(const PrimeFactor& f) { return f.tag == PrimeTag::inert ? f.p * f.p : f.p; }

    mpz_class norm() const {
        mpz_class n = 1;
        for (auto& f : factors) n *= pow_z(mpz_class(static_cast<unsigned long>(prime_norm(f))), f.e);
        return n;
    }
    bool is_one() const { return factors.empty(); }
    bool is_prime() const { return factors.size() == 1 && factors[0].e == 1; }

    int exponent(u64 p, PrimeTag t) const {
        for (auto& f : factors)
            if (f.p == p && f.tag == t) return f.e;
        return 0;
    }

    bool operator==(const IdealQF& o) const { return factors == o.factors; }
    bool operator<(const IdealQF& o) const {
        mpz_class a = norm(), b = o.norm();
        if (a != b) return a < b;
        auto ka = std::vector<std::tuple<u64, int, int>>{}, kb = ka;
        for (auto& f : factors) ka.emplace_back(f.p, static_cast<int>(f.tag), f.e);
        for (auto& f : o.factors) kb.emplace_back(f.p, static_cast<int>(f.tag), f.e);
        return ka < kb;
    }

    static IdealQF prime(u64 p, PrimeTag t, int e = 1) {
        IdealQF I;
        if (e > 0) I.factors.push_back({p, t, e});
        return I;
    }

    std::string str() const {
        if (factors.empty()) return "(1)";
        std::string s;
        for (auto& f : factors) {
            if (!s.empty()) s += "*";
            s += "P" + std::to_string(f.p) + tag_name(f.tag);
            if (f.e > 1) s += "^" + std::to_string(f.e);
        }
        return s;
    }
};

inline IdealQF ideal_mul(const IdealQF& x, const IdealQF& y) {
    IdealQF r;
    size_t i = 0, j = 0;
    while (i < x.factors.size() || j < y.factors.size()) {
        if (j == y.factors.size() || (i < x.factors.size() && x.factors[i].key() < y.factors[j].key())) {
            r.factors.push_back(x.factors[i++]);
        } else if (i == x.factors.size() || y.factors[j].key() < x.factors[i].key()) {
            r.factors.push_back(y.factors[j++]);
        } else {
            PrimeFactor f = x.factors[i++];
            f.e += y.factors[j++].e;
            r.factors.push_back(f);
        }
    }
    return r;
}

inline IdealQF ideal_pow(const IdealQF& x, int k) {
    IdealQF r = x;
    for (auto& f : r.factors) f.e *= k;
    if (k == 0) r.factors.clear();
    return r;
}

inline bool ideal_divides(const IdealQF& c, const IdealQF& a) {
    for (auto& f : c.factors)
        if (a.exponent(f.p, f.tag) < f.e) return false;
    return true;
}

/// a / c, requires c | a.
inline IdealQF ideal_div(const IdealQF& a, const IdealQF& c) {
    if (!ideal_divides(c, a)) throw std::invalid_argument("ideal_div: not a divisor");
    IdealQF r;
    for (auto f : a.factors) {
        f.e -= c.exponent(f.p, f.tag);
        if (f.e > 0) r.factors.push_back(f);
    }
    return r;
}

inline bool ideal_coprime(const IdealQF& a, const IdealQF& b) {
    for (auto& f : a.factors)
        if (b.exponent(f.p, f.tag) > 0) return false;
    return true;
}

/// Distinct prime ideals dividing a.
inline std::vector<IdealQF> prime_divisors(const IdealQF& a) {
    std::vector<IdealQF> out;
    for (auto& f : a.factors) out.push_back(IdealQF::prime(f.p, f.tag));
    return out;
}

/// Prime ideals above the rational prime p.
inline std::vector<IdealQF> primes_above(const RealQuadraticField& F, u64 p) {
    switch (splitting_type(F, p)) {
        case Splitting::split: return {IdealQF::prime(p, PrimeTag::split1), IdealQF::prime(p, PrimeTag::split2)};
        case Splitting::inert: return {IdealQF::prime(p, PrimeTag::inert)};
        case Splitting::ramified: return {IdealQF::prime(p, PrimeTag::ramified)};
    }
    return {};
}

/// The ideal n·𝔬_F of a positive integer.
inline IdealQF ideal_of_integer(const RealQuadraticField& F, u64 n) {
    if (n == 0) throw std::invalid_argument("ideal_of_integer: zero");
    IdealQF I;
    for (auto [p, e] : factor_small(n)) {
        switch (splitting_type(F, p)) {
            case Splitting::split:
                I.factors.push_back({p, PrimeTag::split1, e});
                I.factors.push_back({p, PrimeTag::split2, e});
                break;
            case Splitting::inert: I.factors.push_back({p, PrimeTag::inert, e}); break;
            case Splitting::ramified: I.factors.push_back({p, PrimeTag::ramified, 2 * e}); break;
        }
    }
    return I;
}

inline std::vector<IdealQF> ideal_divisors(const IdealQF& a) {
    std::vector<IdealQF> out{IdealQF{}};
    for (auto& f : a.factors) {
        std::vector<IdealQF> next;
        for (auto& c : out)
            for (int k = 0; k <= f.e; ++k) next.push_back(ideal_mul(c, IdealQF::prime(f.p, f.tag, k)));
        out = std::move(next);
    }
    return out;
}

/// All integral ideals of norm ≤ B, ordered by (norm, factorization).
inline std::vector<IdealQF> ideals_up_to(const RealQuadraticField& F, u64 B) {
    std::vector<IdealQF> out;
    for (u64 n = 1; n <= B; ++n) {
        std::vector<IdealQF> cur{IdealQF{}};
        for (auto [p, k] : factor_small(n)) {
            std::vector<IdealQF> next;
            auto st = splitting_type(F, p);
            for (auto& c : cur) {
                if (st == Splitting::split) {
                    for (int i = 0; i <= k; ++i)
                        next.push_back(ideal_mul(c, ideal_mul(IdealQF::prime(p, PrimeTag::split1, i),
                                                              IdealQF::prime(p, PrimeTag::split2, k - i))));
                } else if (st == Splitting::inert) {
                    if (k % 2 == 0) next.push_back(ideal_mul(c, IdealQF::prime(p, PrimeTag::inert, k / 2)));
                } else {
                    next.push_back(ideal_mul(c, IdealQF::prime(p, PrimeTag::ramified, k)));
                }
            }
            cur = std::move(next);
        }
        for (auto& c : cur) out.push_back(c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// ♯(𝔬_F/𝔞)^×.
inline mpz_class residue_unit_count(const IdealQF& a) {
    mpz_class r = 1;
    for (auto& f : a.factors) {
        mpz_class q = static_cast<unsigned long>(IdealQF::prime_norm(f));
        r *= pow_z(q, f.e - 1) * (q - 1);
    }
    return r;
}

/// ι¹(𝔞) = ½·♯(𝔬/𝔞)^×·N(𝔞)·Π_{𝔮|𝔞}(1 + 1/N𝔮).
inline mpz_class index_iota1(const RealQuadraticField& F, const IdealQF& a) {
    if (a == ideal_of_integer(F, 2)) throw std::invalid_argument("index_iota1: a = (2) excluded");
    if (a.is_one()) return 1;
    mpz_class r = 1;
    for (auto& f : a.factors) {
        mpz_class q = static_cast<unsigned long>(IdealQF::prime_norm(f));
        r *= pow_z(q, 2 * f.e - 2) * (q * q - 1);
    }
    if (r % 2 != 0) throw std::logic_error("index_iota1: odd product");
    return r / 2;
}

enum class UnitCheck { coprime, divides };

/// u₊^e in 𝔬/(p) by square-and-multiply; divides iff p | N(u₊^e − 1).
inline UnitCheck unit_power_check(const RealQuadraticField& F, u64 p, const mpz_class& e) {
    if (!is_prime_u64(p)) throw std::invalid_argument("unit_power_check: p not prime");
    if (F.disc % static_cast<long>(p) == 0) throw std::invalid_argument("unit_power_check: p divides disc");
    if (e <= 0) throw std::invalid_argument("unit_power_check: e must be positive");
    mpz_class P = static_cast<unsigned long>(p);
    auto red = [&](QElem x) {
        mpz_mod(x.a.get_mpz_t(), x.a.get_mpz_t(), P.get_mpz_t());
        mpz_mod(x.b.get_mpz_t(), x.b.get_mpz_t(), P.get_mpz_t());
        return x;
    };
    QElem base = red(F.u_plus), acc{1, 0};
    for (long i = static_cast<long>(mpz_sizeinbase(e.get_mpz_t(), 2)) - 1; i >= 0; --i) {
        acc = red(F.mul(acc, acc));
        if (mpz_tstbit(e.get_mpz_t(), i)) acc = red(F.mul(acc, base));
    }
    QElem diff{acc.a - 1, acc.b};
    mpz_class n = F.norm(diff);
    return (n % P == 0) ? UnitCheck::divides : UnitCheck::coprime;
}

inline UnitCheck unit_power_check(const RealQuadraticField& F, u64 p, u64 e) {
    return unit_power_check(F, p, mpz_class(static_cast<unsigned long>(e)));
}

}  // namespace hmiw
