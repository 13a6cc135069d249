#pragma once

#include "hmiw/lseries.hpp"

#include <functional>
#include <future>
#include <optional>

namespace hmiw {

/// A Hecke character of F (or the trivial one) made imprimitive at a set of primes.
struct EisChar {
    std::optional<HeckeCharacterQF> psi;  // nullopt: trivial
    std::vector<IdealQF> strip;           // prime ideals where the value is forced to 0

    int operator()(const IdealQF& a) const {
        for (auto& q : strip)
            if (ideal_divides(q, a)) return 0;
        return psi ? value_on_ideal(*psi, a) : 1;
    }
    /// Conductor times the stripped primes not already dividing it.
    IdealQF modulus() const {
        IdealQF m = psi ? psi->conductor_ideal : IdealQF{};
        for (auto& q : strip)
            if (!ideal_divides(q, m)) m = ideal_mul(m, q);
        return m;
    }
    bool totally_odd() const {
        return psi && psi->chi1.parity() == Parity::odd && psi->chi2.parity() == Parity::odd;
    }
};

struct EisensteinSeries {
    RealQuadraticField field;
    EisChar psi1, psi2;
    IdealQF level() const { return ideal_mul(psi1.modulus(), psi2.modulus()); }
    /// ε = ψ₁ψ₂ on an ideal.
    int character(const IdealQF& a) const { return psi1(a) * psi2(a); }
};

/// E₂(ε, 1) with both Euler factors at the primes dividing the conductor of ε removed.
inline EisensteinSeries eisenstein_stripped(const HeckeCharacterQF& eps) {
    EisensteinSeries E;
    E.field = eps.field;
    E.psi1.psi = eps;
    E.psi2.strip = prime_divisors(eps.conductor_ideal);
    return E;
}

/// E₂(ε, 1) without stripping.
inline EisensteinSeries eisenstein_plain(const HeckeCharacterQF& eps) {
    EisensteinSeries E;
    E.field = eps.field;
    E.psi1.psi = eps;
    return E;
}

struct CoefficientSystem {
    u64 bound = 0;
    std::map<IdealQF, mpz_class> coeffs;
    std::function<mpz_class(const IdealQF&)> s_prime;  // S(𝔮)-scalar on prime ideals
    IdealQF level;

    mpz_class at(const IdealQF& a) const {
        auto it = coeffs.find(a);
        if (it == coeffs.end()) throw std::out_of_range("CoefficientSystem: ideal " + a.str() + " beyond bound");
        return it->second;
    }
    mpz_class s_character(const IdealQF& c) const {
        mpz_class v = 1;
        for (auto& f : c.factors) v *= pow_z(s_prime(IdealQF::prime(f.p, f.tag)), f.e);
        return v;
    }
    bool is_zero() const {
        for (auto& [a, c] : coeffs)
            if (c != 0) return false;
        return true;
    }
};

/// C(𝔞, E) = Σ_{𝔠|𝔞} ψ₁(𝔞/𝔠)ψ₂(𝔠)N(𝔠) for N(𝔞) ≤ B.
inline CoefficientSystem eisenstein_coeffs(const EisensteinSeries& E, u64 B) {
    if (E.psi1.totally_odd() || E.psi2.totally_odd())
        throw std::invalid_argument("eisenstein_coeffs: character is totally odd");
    CoefficientSystem sys;
    sys.bound = B;
    sys.level = E.level();
    for (auto& a : ideals_up_to(E.field, B)) {
        mpz_class s = 0;
        for (auto& c : ideal_divisors(a)) {
            int v = E.psi1(ideal_div(a, c)) * E.psi2(c);
            if (v) s += v * c.norm();
        }
        sys.coeffs.emplace(a, s);
    }
    auto psi1 = E.psi1, psi2 = E.psi2;
    sys.s_prime = [psi1, psi2](const IdealQF& q) { return mpz_class(psi1(q) * psi2(q)); };
    return sys;
}

inline mpz_class eisenstein_eigenvalue(const EisensteinSeries& E, const IdealQF& q) {
    return E.psi1(q) + E.psi2(q) * q.norm();
}

inline bool divides_level(const IdealQF& q, const IdealQF& level) {
    for (auto& f : q.factors)
        if (level.exponent(f.p, f.tag) == 0) return false;
    return true;
}

/// C(𝔪 | T(𝔮)) = C(𝔪𝔮) + [𝔮 | 𝔪]·N(𝔮)·S(𝔮)·C(𝔪/𝔮).
inline CoefficientSystem hecke_T(const CoefficientSystem& sys, const IdealQF& q) {
    if (!q.is_prime()) throw std::invalid_argument("hecke_T: q must be a prime ideal");
    if (!ideal_coprime(q, sys.level)) throw std::invalid_argument("hecke_T: q divides the level, use hecke_U");
    CoefficientSystem out;
    mpz_class nq = q.norm();
    out.bound = static_cast<u64>(mpz_class(mpz_class(static_cast<unsigned long>(sys.bound)) / nq).get_ui());
    out.level = sys.level;
    out.s_prime = sys.s_prime;
    mpz_class sq = sys.s_prime(q);
    for (auto& [m, c] : sys.coeffs) {
        if (m.norm() > out.bound) continue;
        mpz_class v = sys.at(ideal_mul(m, q));
        if (ideal_divides(q, m)) v += nq * sq * sys.at(ideal_div(m, q));
        out.coeffs.emplace(m, v);
    }
    return out;
}

/// C(𝔪 | U(𝔮)) = C(𝔪𝔮); every prime of 𝔮 must divide the level.
inline CoefficientSystem hecke_U(const CoefficientSystem& sys, const IdealQF& q) {
    if (q.is_one() || !divides_level(q, sys.level)) throw std::invalid_argument("hecke_U: q must divide the level");
    CoefficientSystem out;
    mpz_class nq = q.norm();
    out.bound = static_cast<u64>(mpz_class(mpz_class(static_cast<unsigned long>(sys.bound)) / nq).get_ui());
    out.level = sys.level;
    out.s_prime = sys.s_prime;
    for (auto& [m, c] : sys.coeffs) {
        if (m.norm() > out.bound) continue;
        out.coeffs.emplace(m, sys.at(ideal_mul(m, q)));
    }
    return out;
}

inline IdealQF ideal_lcm(const IdealQF& a, const IdealQF& b) {
    IdealQF r = a;
    for (auto& f : b.factors) {
        int e = r.exponent(f.p, f.tag);
        if (e < f.e) r = ideal_mul(r, IdealQF::prime(f.p, f.tag, f.e - e));
    }
    return r;
}

/// C(𝔞, sys ⊗ χ) = C(𝔞, sys)·χ(𝔞); S multiplied by χ².
inline CoefficientSystem twist(const CoefficientSystem& sys, const EisChar& chi) {
    CoefficientSystem out;
    out.bound = sys.bound;
    IdealQF mc = chi.modulus();
    out.level = ideal_lcm(sys.level, ideal_pow(mc, 2));
    for (auto& [a, c] : sys.coeffs) out.coeffs.emplace(a, c * chi(a));
    auto s = sys.s_prime;
    out.s_prime = [s, chi](const IdealQF& q) -> mpz_class { return s(q) * chi(q) * chi(q); };
    return out;
}

enum class HeckeKind { T, U };

struct HeckeOp {
    IdealQF q;
    HeckeKind kind = HeckeKind::T;
};

struct EigenReport {
    bool ok = true;
    bool degenerate = false;  // zero system
    std::string failing_op;
    std::optional<IdealQF> failing_ideal;
    std::vector<std::pair<std::string, mpz_class>> eigenvalues;
};

/// Checks sys | op = λ·sys on the shrunken bound for every op; expected[q.str()] overrides λ.
inline EigenReport is_eigenform(const CoefficientSystem& sys, const std::vector<HeckeOp>& ops,
                                const std::map<std::string, mpz_class>& expected) {
    EigenReport r;
    r.degenerate = sys.is_zero();
    for (auto& op : ops) {
        std::string name = std::string(op.kind == HeckeKind::T ? "T(" : "U(") + op.q.str() + ")";
        auto it = expected.find(op.q.str());
        if (it == expected.end()) throw std::invalid_argument("is_eigenform: no eigenvalue for " + name);
        mpz_class lam = it->second;
        r.eigenvalues.emplace_back(name, lam);
        auto img = op.kind == HeckeKind::T ? hecke_T(sys, op.q) : hecke_U(sys, op.q);
        for (auto& [m, c] : img.coeffs) {
            if (c != lam * sys.at(m)) {
                r.ok = false;
                r.failing_op = name;
                r.failing_ideal = m;
                return r;
            }
        }
    }
    return r;
}

enum class CheckStatus { pass, fail };
inline const char* status_name(CheckStatus s) { return s == CheckStatus::pass ? "pass" : "fail"; }

struct CongruenceReport {
    long d = 0, m = 0;
    u64 p = 0;
    std::vector<std::pair<std::string, CheckStatus>> hypothesis_b;  // per 𝔮 | level
    CheckStatus hypothesis_c = CheckStatus::pass;                    // surrogate: p | L_F(−1, ε)
    CheckStatus residue_units_check = CheckStatus::pass;
    CheckStatus iota1_check = CheckStatus::pass;
    CheckStatus unit_order_check = CheckStatus::pass;
    std::string verdict;  // "candidate" or "rejected"
    std::string label = "surrogate-candidate";
    std::vector<std::string> unchecked;
};

struct FilteredPrime {
    u64 p;
    std::string reason;
};

struct ScanResult {
    RealQuadraticField field;
    long m = 0;
    LValueRecord lvalue;
    Factorization factorization;  // of the numerator of L_F(−1, ε)
    std::vector<FilteredPrime> filtered;
    std::vector<CongruenceReport> reports;  // ascending p
    std::vector<u64> candidates() const {
        std::vector<u64> out;
        for (auto& r : reports)
            if (r.verdict == "candidate") out.push_back(r.p);
        return out;
    }
};

struct ScanOptions {
    u64 rho_iters = 1u << 22;
    unsigned threads = 1;
};

inline CongruenceReport congruence_checks(const RealQuadraticField& F, const HeckeCharacterQF& eps, u64 p) {
    CongruenceReport r;
    r.d = F.d;
    r.m = eps.m;
    r.p = p;
    EisensteinSeries E = eisenstein_stripped(eps);
    IdealQF level = E.level();
    mpz_class P = static_cast<unsigned long>(p);
    // (b): some 𝔮 | level with C(𝔮, E) ≢ N(𝔮) mod p; C(𝔮, E) = 0 after stripping
    for (auto& q : prime_divisors(level)) {
        mpz_class c = eisenstein_eigenvalue(E, q);
        mpz_class diff = c - q.norm();
        r.hypothesis_b.emplace_back(q.str(), diff % P != 0 ? CheckStatus::pass : CheckStatus::fail);
    }
    r.hypothesis_c = CheckStatus::pass;
    r.residue_units_check = residue_unit_count(level) % P != 0 ? CheckStatus::pass : CheckStatus::fail;
    mpz_class iota = index_iota1(F, level);
    r.iota1_check = iota % P != 0 ? CheckStatus::pass : CheckStatus::fail;
    r.unit_order_check =
        unit_power_check(F, p, iota) == UnitCheck::coprime ? CheckStatus::pass : CheckStatus::fail;
    bool ok = r.hypothesis_c == CheckStatus::pass && r.residue_units_check == CheckStatus::pass &&
              r.iota1_check == CheckStatus::pass && r.unit_order_check == CheckStatus::pass;
    for (auto& [q, s] : r.hypothesis_b) ok = ok && s == CheckStatus::pass;
    r.verdict = ok ? "candidate" : "rejected";
    r.unchecked = {"(a) torsion-freeness of the cohomology is assumed, not decided",
                   "torsion-freeness condition involving the undefined group o_{F,n}^{x2} not checked",
                   "(c) uses the prime divisors of L_F(-1, eps) as a surrogate for the cusp constant C"};
    return r;
}

inline ScanResult scan_congruence(const RealQuadraticField& F, long m, const ScanOptions& opt = {}) {
    ScanResult res;
    res.field = F;
    res.m = m;
    auto eps = induce_quadratic(F, m);
    res.lvalue = hecke_L_neg_induced(eps, 2);
    mpq_class v = res.lvalue.rational_value();
    if (v == 0) return res;
    res.factorization = factor(mpz_class(v.get_num()), opt.rho_iters);
    std::vector<u64> survivors;
    for (auto& [P, e] : res.factorization.primes) {
        u64 p = P.get_ui();
        if ((6 * F.disc) % static_cast<long>(p) == 0) res.filtered.push_back({p, "divides 6*disc"});
        else if (p <= 4) res.filtered.push_back({p, "p <= n+2 = 4"});
        else if (m % static_cast<long>(p) == 0) res.filtered.push_back({p, "divides m"});
        else survivors.push_back(p);
    }
    if (opt.threads > 1) {
        std::vector<std::future<CongruenceReport>> fs;
        for (u64 p : survivors) fs.push_back(std::async(std::launch::async, [&, p] { return congruence_checks(F, eps, p); }));
        for (auto& f : fs) res.reports.push_back(f.get());
    } else {
        for (u64 p : survivors) res.reports.push_back(congruence_checks(F, eps, p));
    }
    return res;
}

}  // namespace hmiw
