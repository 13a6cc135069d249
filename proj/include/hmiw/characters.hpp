#pragma once

#include "hmiw/cyclotomic.hpp"
#include "hmiw/quadfield.hpp"

#include <mpfr.h>

#include <numeric>

namespace hmiw {

enum class Parity { even, odd };

/// Dirichlet character stored as an exponent table: χ(a) = ζ_order^{exps[a]}, or 0 when exps[a] < 0.
class DirichletCharacter {
public:
    DirichletCharacter() : modulus_(1), order_(1), conductor_(1), exps_{0} {}

    static DirichletCharacter from_table(u64 modulus, unsigned order, std::vector<int> exps) {
        DirichletCharacter c;
        c.modulus_ = modulus;
        c.order_ = order;
        c.exps_ = std::move(exps);
        c.normalize_order();
        c.conductor_ = c.compute_conductor();
        return c;
    }

    u64 modulus() const { return modulus_; }
    u64 conductor() const { return conductor_; }
    unsigned order() const { return order_; }
    bool is_primitive() const { return conductor_ == modulus_; }
    bool is_trivial() const { return order_ == 1; }
    Parity parity() const {
        if (modulus_ <= 2) return Parity::even;
        return exps_[modulus_ - 1] == 0 ? Parity::even : Parity::odd;
    }

    /// Exponent k with χ(a) = ζ^k, or −1 when gcd(a, modulus) > 1.
    int exponent(i64 a) const { return exps_[static_cast<size_t>(mod_floor(a, static_cast<i64>(modulus_)))]; }
    bool is_unit(i64 a) const { return exponent(a) >= 0; }

    /// Value as an integer; requires order ≤ 2.
    int value_int(i64 a) const {
        if (order_ > 2) throw std::logic_error("value_int: order > 2");
        int k = exponent(a);
        if (k < 0) return 0;
        return k == 0 ? 1 : -1;
    }
    Cyclo value(i64 a) const {
        int k = exponent(a);
        if (k < 0) return Cyclo(order_, 0);
        return Cyclo::zeta_pow(order_, k);
    }

    DirichletCharacter conj() const {
        std::vector<int> e = exps_;
        for (auto& k : e)
            if (k > 0) k = static_cast<int>(order_) - k;
        return from_table(modulus_, order_, std::move(e));
    }

    /// Same character viewed modulo a multiple of the modulus.
    DirichletCharacter induce(u64 m) const {
        if (m % modulus_) throw std::invalid_argument("induce: modulus must be a multiple");
        std::vector<int> e(m);
        for (u64 a = 0; a < m; ++a) e[a] = gcd_u(a, m) == 1 ? exps_[a % modulus_] : -1;
        return from_table(m, order_, std::move(e));
    }

    /// Primitive character inducing this one.
    DirichletCharacter primitive() const {
        if (is_primitive()) return *this;
        u64 f = conductor_;
        std::vector<int> e(f, -1);
        for (u64 a = 0; a < modulus_; ++a)
            if (exps_[a] >= 0) e[a % f] = exps_[a];
        return from_table(f, order_, std::move(e));
    }

    friend DirichletCharacter operator*(const DirichletCharacter& x, const DirichletCharacter& y) {
        u64 m = std::lcm(x.modulus_, y.modulus_);
        unsigned n = std::lcm(x.order_, y.order_);
        std::vector<int> e(m);
        for (u64 a = 0; a < m; ++a) {
            int kx = x.exps_[a % x.modulus_], ky = y.exps_[a % y.modulus_];
            e[a] = (kx < 0 || ky < 0) ? -1 : static_cast<int>((kx * (n / x.order_) + ky * (n / y.order_)) % n);
        }
        return from_table(m, n, std::move(e));
    }

    bool operator==(const DirichletCharacter& o) const {
        return modulus_ == o.modulus_ && order_ == o.order_ && exps_ == o.exps_;
    }

    /// Values on the standard generators of (ℤ/modulus)^× (see unit_generators).
    std::vector<int> generator_exponents() const;

private:
    u64 modulus_;
    unsigned order_;
    u64 conductor_;
    std::vector<int> exps_;

    void normalize_order() {
        unsigned g = order_;
        for (int k : exps_)
            if (k >= 0) g = std::gcd(g, static_cast<unsigned>(k));
        if (g > 1) {
            for (auto& k : exps_)
                if (k >= 0) k /= static_cast<int>(g);
            order_ /= g;
        }
        if (order_ == 0) order_ = 1;
    }

    u64 compute_conductor() const {
        if (order_ == 1) return 1;
        u64 best = modulus_;
        for (u64 f = 1; f < modulus_; ++f) {
            if (modulus_ % f) continue;
            bool ok = true;
            for (u64 a = 1; a < modulus_ && ok; a += f)
                if (exps_[a] > 0) ok = false;
            if (ok) {
                best = f;
                break;
            }
        }
        return best;
    }
};

/// Generators of (ℤ/m)^× as (generator, order), one or two per prime-power component, CRT-lifted.
inline std::vector<std::pair<u64, u64>> unit_generators(u64 m) {
    std::vector<std::pair<u64, u64>> gens;
    auto fs = factor_small(m);
    for (auto [q, e] : fs) {
        u64 qe = 1;
        for (int i = 0; i < e; ++i) qe *= q;
        u64 rest = m / qe;
        auto lift = [&](u64 g) {
            // g mod qe, 1 mod rest
            if (rest == 1) return g % m;
            u64 inv = inv_mod(rest % qe, qe);
            u64 t = mulmod((g % qe + qe - 1) % qe, inv, qe);
            return (1 + t * rest) % m;
        };
        if (q == 2) {
            if (e == 1) continue;
            gens.emplace_back(lift(qe - 1), 2);
            if (e >= 3) gens.emplace_back(lift(5), qe / 4);
        } else {
            u64 g = primitive_root(q);
            if (e >= 2 && powmod(g, q - 1, q * q) == 1) g += q;
            gens.emplace_back(lift(g), qe / q * (q - 1));
        }
    }
    return gens;
}

/// Discrete-log coordinates of every residue with respect to unit_generators(m); empty for non-units.
inline std::vector<std::vector<u64>> unit_coordinates(u64 m) {
    auto gens = unit_generators(m);
    std::vector<std::vector<u64>> coords(m);
    std::vector<u64> idx(gens.size(), 0);
    // enumerate the product of cyclic groups
    u64 total = 1;
    for (auto& g : gens) total *= g.second;
    for (u64 t = 0; t < total; ++t) {
        u64 v = 1 % m, r = t;
        std::vector<u64> c(gens.size());
        for (size_t i = 0; i < gens.size(); ++i) {
            c[i] = r % gens[i].second;
            r /= gens[i].second;
            v = mulmod(v, powmod(gens[i].first, c[i], m), m);
        }
        coords[v] = std::move(c);
    }
    return coords;
}

/// Character sending generator i to ζ_{ord_i}^{k_i}.
inline DirichletCharacter character_from_generators(u64 m, const std::vector<u64>& ks) {
    auto gens = unit_generators(m);
    if (ks.size() != gens.size()) throw std::invalid_argument("character_from_generators: arity");
    unsigned n = 1;
    for (auto& g : gens) n = std::lcm(n, static_cast<unsigned>(g.second));
    auto coords = unit_coordinates(m);
    std::vector<int> e(m, -1);
    for (u64 a = 0; a < m; ++a) {
        if (gcd_u(a, m) != 1 && m != 1) continue;
        u64 s = 0;
        for (size_t i = 0; i < gens.size(); ++i) s += coords[a][i] * ks[i] * (n / gens[i].second);
        e[a] = static_cast<int>(s % n);
    }
    if (m == 1) e[0] = 0;
    return DirichletCharacter::from_table(m, n, std::move(e));
}

inline std::vector<int> DirichletCharacter::generator_exponents() const {
    std::vector<int> out;
    for (auto& g : unit_generators(modulus_)) out.push_back(exps_[g.first]);
    return out;
}

/// All characters modulo m.
inline std::vector<DirichletCharacter> all_characters(u64 m) {
    auto gens = unit_generators(m);
    std::vector<DirichletCharacter> out;
    u64 total = 1;
    for (auto& g : gens) total *= g.second;
    for (u64 t = 0; t < total; ++t) {
        std::vector<u64> ks(gens.size());
        u64 r = t;
        for (size_t i = 0; i < gens.size(); ++i) {
            ks[i] = r % gens[i].second;
            r /= gens[i].second;
        }
        out.push_back(character_from_generators(m, ks));
    }
    return out;
}

inline std::vector<DirichletCharacter> primitive_characters(u64 f) {
    std::vector<DirichletCharacter> out;
    for (auto& c : all_characters(f))
        if (c.is_primitive()) out.push_back(c);
    return out;
}

inline bool is_fundamental_discriminant(long D) {
    if (D == 1) return true;
    if (D == 0) return false;
    long m4 = mod_floor(D, 4);
    u64 a = static_cast<u64>(D < 0 ? -D : D);
    if (m4 == 1) return is_squarefree(a);
    if (m4 != 0) return false;
    long m = D / 4;
    long r = mod_floor(m, 4);
    return (r == 2 || r == 3) && is_squarefree(static_cast<u64>(m < 0 ? -m : m));
}

/// Fundamental discriminant of ℚ(√r) for squarefree r ≠ 1.
inline long fundamental_discriminant(long r) { return mod_floor(r, 4) == 1 ? r : 4 * r; }

inline DirichletCharacter kronecker_character(long D) {
    if (!is_fundamental_discriminant(D)) throw std::invalid_argument("kronecker_character: D not fundamental");
    u64 f = static_cast<u64>(D < 0 ? -D : D);
    std::vector<int> e(f);
    for (u64 a = 0; a < f; ++a) {
        int k = kronecker(D, static_cast<i64>(a));
        e[a] = k == 0 ? -1 : (k == 1 ? 0 : 1);
    }
    if (f == 1) e[0] = 0;
    return DirichletCharacter::from_table(f, D == 1 ? 1 : 2, std::move(e));
}

struct HeckeCharacterQF {
    RealQuadraticField field;
    long m = 1;
    long chi1_disc = 1, chi2_disc = 1;
    DirichletCharacter chi1, chi2;
    IdealQF conductor_ideal;
};

inline HeckeCharacterQF induce_quadratic(const RealQuadraticField& F, long m) {
    if (m < 3 || m % 2 == 0 || !is_squarefree(static_cast<u64>(m)))
        throw std::invalid_argument("induce_quadratic: m must be odd squarefree >= 3");
    if (std::gcd(m, F.disc) != 1) throw std::invalid_argument("induce_quadratic: m shares a factor with disc");
    HeckeCharacterQF e;
    e.field = F;
    e.m = m;
    e.chi1_disc = fundamental_discriminant(m);
    e.chi2_disc = fundamental_discriminant(F.d * m);
    e.chi1 = kronecker_character(e.chi1_disc);
    e.chi2 = kronecker_character(e.chi2_disc);
    e.conductor_ideal = ideal_of_integer(F, static_cast<u64>(m));
    return e;
}

/// ε(𝔭) on a prime ideal.
inline int value_on_prime(const HeckeCharacterQF& eps, u64 p, PrimeTag tag) {
    if (eps.m % static_cast<long>(p) == 0) return 0;
    int c1 = kronecker(eps.chi1_disc, static_cast<i64>(p)), c2 = kronecker(eps.chi2_disc, static_cast<i64>(p));
    if (tag == PrimeTag::inert) return -c1 * c2;
    return c1 != 0 ? c1 : c2;
}

inline int value_on_ideal(const HeckeCharacterQF& eps, const IdealQF& a) {
    int v = 1;
    for (auto& f : a.factors) {
        int x = value_on_prime(eps, f.p, f.tag);
        if (x == 0) return 0;
        if (x == -1 && f.e % 2) v = -v;
    }
    return v;
}

/// Gauss sum τ(χ) = Σ χ(a) e^{2πia/f}.
struct GaussSum {
    bool exact = false;
    // exact quadratic case: sqrt(radicand), times i when imaginary
    u64 radicand = 1;
    bool imaginary = false;
    // ball: midpoint strings (decimal) and radius bound
    std::string re, im;
    double re_d = 0, im_d = 0;
    double radius = 0;
};

inline GaussSum gauss_sum(const DirichletCharacter& chi, long bits = 320) {
    if (!chi.is_primitive()) throw std::invalid_argument("gauss_sum: character not primitive");
    GaussSum g;
    u64 f = chi.modulus();
    if (chi.order() <= 2) {
        g.exact = true;
        g.radicand = f;
        g.imaginary = chi.parity() == Parity::odd;
        double r = std::sqrt(static_cast<double>(f));
        g.re_d = g.imaginary ? 0 : r;
        g.im_d = g.imaginary ? r : 0;
        g.re = std::to_string(g.re_d);
        g.im = std::to_string(g.im_d);
        return g;
    }
    mpfr_t sr, si, c, s, ang, pi2;
    mpfr_inits2(bits, sr, si, c, s, ang, pi2, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_zero(sr, 1);
    mpfr_set_zero(si, 1);
    mpfr_const_pi(pi2, MPFR_RNDN);
    mpfr_mul_ui(pi2, pi2, 2, MPFR_RNDN);
    // angle(a) = 2π(a/f + k/n) = 2π(a·n + k·f)/(f·n)
    u64 n = chi.order();
    for (u64 a = 1; a < f; ++a) {
        int k = chi.exponent(static_cast<i64>(a));
        if (k < 0) continue;
        u64 num = (a * n + static_cast<u64>(k) * f) % (f * n);
        mpfr_mul_ui(ang, pi2, num, MPFR_RNDN);
        mpfr_div_ui(ang, ang, f * n, MPFR_RNDN);
        mpfr_sin_cos(s, c, ang, MPFR_RNDN);
        mpfr_add(sr, sr, c, MPFR_RNDN);
        mpfr_add(si, si, s, MPFR_RNDN);
    }
    // partial sums stay below f in modulus; each of the f steps adds a few ulp at that scale
    g.radius = std::ldexp(16.0 * static_cast<double>(f) * static_cast<double>(f), static_cast<int>(-bits));
    char* buf = nullptr;
    mpfr_asprintf(&buf, "%.40Rg", sr);
    g.re = buf;
    mpfr_free_str(buf);
    mpfr_asprintf(&buf, "%.40Rg", si);
    g.im = buf;
    mpfr_free_str(buf);
    g.re_d = mpfr_get_d(sr, MPFR_RNDN);
    g.im_d = mpfr_get_d(si, MPFR_RNDN);
    mpfr_clears(sr, si, c, s, ang, pi2, static_cast<mpfr_ptr>(nullptr));
    return g;
}

}  // namespace hmiw
