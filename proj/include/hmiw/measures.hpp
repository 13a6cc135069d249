#pragma once

#include "hmiw/iwasawa.hpp"
#include "hmiw/lseries.hpp"

#include <functional>
#include <optional>

namespace hmiw {

// ---------------------------------------------------------------------------
// ℤ_p-valued characters

/// ω as a Dirichlet character mod p: ω(g^k) = ζ_{p−1}^k with g the least primitive root.
inline DirichletCharacter teichmuller_character(u64 p) {
    u64 g = primitive_root(p);
    std::vector<int> e(p, -1);
    u64 x = 1;
    for (u64 k = 0; k + 1 < p; ++k) {
        e[x] = static_cast<int>(k);
        x = mulmod(x, g, p);
    }
    return DirichletCharacter::from_table(p, static_cast<unsigned>(p - 1), std::move(e));
}

/// ζ_n ↦ ω(g)^{(p−1)/n}; requires n | p − 1.
struct PadicEmbedding {
    u64 p = 0;
    long N = 0;
    mpz_class root;  // ω(g) mod p^N

    PadicEmbedding(u64 p_, long N_) : p(p_), N(N_) {
        root = teichmuller(static_cast<unsigned long>(primitive_root(p)), p, N).residue();
    }
    mpz_class zeta(unsigned n, long k) const {
        if ((p - 1) % n != 0) throw std::invalid_argument("PadicEmbedding: order does not divide p - 1");
        mpz_class mod = ppow(p, N), r;
        mpz_class e = static_cast<unsigned long>(mod_floor(k, n) * static_cast<long>((p - 1) / n));
        mpz_powm(r.get_mpz_t(), root.get_mpz_t(), e.get_mpz_t(), mod.get_mpz_t());
        return r;
    }
    Padic embed(const Cyclo& x) const {
        Padic s = Padic::from_int(0, p, N);
        for (unsigned r = 0; r < x.n; ++r)
            if (x.c[r] != 0) s += Padic::from_rat(x.c[r], p, N) * Padic::from_int(zeta(x.n, r), p, N);
        return s;
    }
    /// χ(a) as a residue mod p^N, 0 for non-units.
    mpz_class value(const DirichletCharacter& chi, i64 a) const {
        int k = chi.exponent(a);
        return k < 0 ? mpz_class(0) : zeta(chi.order(), k);
    }
};

inline bool is_zp_valued(const DirichletCharacter& chi, u64 p) { return (p - 1) % chi.order() == 0; }

// ---------------------------------------------------------------------------
// Level families on ℤ/m₀pᵛ

struct StabilizationParams {
    mpq_class alpha = 1;
    mpq_class eps_p = 0;
    bool operator==(const StabilizationParams& o) const { return alpha == o.alpha && eps_p == o.eps_p; }

    /// Rational unit root of X² − C·X + ε_p·p.
    static StabilizationParams from_hecke(const mpq_class& C, const mpq_class& eps_p, u64 p) {
        mpq_class disc = C * C - 4 * eps_p * static_cast<unsigned long>(p);
        if (disc < 0) throw std::invalid_argument("from_hecke: no real root");
        mpz_class n = disc.get_num(), d = disc.get_den(), rn, rd;
        mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
        mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
        if (rn * rn != n || rd * rd != d) throw std::invalid_argument("from_hecke: roots are not rational");
        for (int s : {1, -1}) {
            mpq_class a = (C + s * mpq_class(rn, rd)) / 2;
            if (a != 0 && vp(a, p) == 0) return {a, eps_p};
        }
        throw std::invalid_argument("from_hecke: no unit root");
    }
};

/// Values ev(a, ν) on every residue of ℤ/m₀pᵛ, ν ≤ depth; optional exact cell moments
/// moment(a, ν, k) = ∫_{a + m₀pᵛℤ_p} (x − a)^k, 0 ≤ a < m₀pᵛ.
struct LevelFamily {
    u64 m0 = 1, p = 2;
    unsigned depth = 0;
    std::function<mpq_class(u64 a, unsigned nu)> ev;
    std::function<mpq_class(u64 a, unsigned nu, unsigned k)> moment;
    // moments of the stabilization under stab_params, when known
    std::optional<StabilizationParams> stab_params;
    std::function<mpq_class(u64 a, unsigned nu, unsigned k)> stab_moment;

    u64 level(unsigned nu) const {
        u64 M = m0;
        for (unsigned i = 0; i < nu; ++i) M *= p;
        return M;
    }
    mpq_class value(i64 a, unsigned nu) const {
        if (nu > depth) throw std::out_of_range("LevelFamily: level beyond depth");
        return ev(static_cast<u64>(mod_floor(a, static_cast<i64>(level(nu)))), nu);
    }
    /// R(p): a at level ν ↦ the class of p·(a/m₀pᵛ) at level ν − 1.
    u64 r_action(u64 a, unsigned nu) const { return a % level(nu - 1); }
};

inline mpq_class bernoulli1_frac(const mpq_class& x) {
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return x - mpq_class(fl) - mpq_class(1, 2);
}

/// ∫_{a + Mℤ_p} (x − a)^k dE₁ = (M^k·B_{k+1} − (−a)^{k+1}/M)/(k+1).
inline mpq_class bernoulli_cell_moment(u64 a, u64 M, unsigned k) {
    mpq_class Mq(static_cast<unsigned long>(M));
    mpq_class t = pow_q(Mq, k) * bernoulli(k + 1) - pow_q(mpq_class(-static_cast<long>(a)), k + 1) / Mq;
    return t / (k + 1);
}

inline void check_unit_alpha(const StabilizationParams& s, u64 p) {
    if (s.alpha == 0 || vp(s.alpha, p) != 0) throw std::invalid_argument("stabilization: alpha must be a p-adic unit");
}

/// ev(x, ν) = Σ_{k≤ν} (ε/α)^k α^{ν−k} B₁({p^k x}), x = a/m₀pᵛ; with the default (α, ε) = (1, 0) this is B₁.
/// Its (α, ε)-stabilization is B₁ at every level.
inline LevelFamily bernoulli_family(u64 m0, u64 p, unsigned V, const StabilizationParams& hecke = {}) {
    if (gcd_u(m0, p) != 1) throw std::invalid_argument("bernoulli_family: gcd(m0, p) != 1");
    check_unit_alpha(hecke, p);
    LevelFamily f;
    f.m0 = m0;
    f.p = p;
    f.depth = V;
    mpq_class r = hecke.eps_p / hecke.alpha, al = hecke.alpha;
    f.ev = [m0, p, r, al](u64 a, unsigned nu) -> mpq_class {
        u64 M = m0;
        for (unsigned i = 0; i < nu; ++i) M *= p;
        mpq_class x(static_cast<unsigned long>(a), static_cast<unsigned long>(M));
        x.canonicalize();
        mpq_class s = 0, rk = 1;
        for (unsigned k = 0; k <= nu; ++k) {
            if (rk == 0) break;
            s += rk * pow_q(al, nu - k) * bernoulli1_frac(x);
            x *= static_cast<unsigned long>(p);
            rk *= r;
        }
        return s;
    };
    auto bm = [m0, p](u64 a, unsigned nu, unsigned k) -> mpq_class {
        u64 M = m0;
        for (unsigned i = 0; i < nu; ++i) M *= p;
        return bernoulli_cell_moment(a, M, k);
    };
    if (hecke.eps_p == 0 && hecke.alpha == 1) f.moment = bm;
    f.stab_params = hecke;
    f.stab_moment = bm;
    return f;
}

/// Point mass at 1.
inline LevelFamily delta_family(u64 m0, u64 p, unsigned V) {
    LevelFamily f;
    f.m0 = m0;
    f.p = p;
    f.depth = V;
    auto lev = [m0, p](unsigned nu) {
        u64 M = m0;
        for (unsigned i = 0; i < nu; ++i) M *= p;
        return M;
    };
    f.ev = [lev](u64 a, unsigned nu) -> mpq_class { return mpq_class(a == 1 % lev(nu) ? 1 : 0); };
    f.moment = [lev](u64 a, unsigned nu, unsigned k) -> mpq_class {
        u64 M = lev(nu);
        if (a != 1 % M) return mpq_class(0);
        return mpq_class(pow_z(mpz_class(1) - static_cast<unsigned long>(a), k));
    };
    return f;
}

inline LevelFamily zero_family(u64 m0, u64 p, unsigned V) {
    LevelFamily f;
    f.m0 = m0;
    f.p = p;
    f.depth = V;
    f.ev = [](u64, unsigned) -> mpq_class { return mpq_class(0); };
    f.moment = [](u64, unsigned, unsigned) -> mpq_class { return mpq_class(0); };
    return f;
}

/// μ(a, ν) = α^{−ν}(ev(a, ν) − α^{−1}ε_p·ev(R a, ν−1)); the R-term is absent at ν = 0.
inline LevelFamily stabilize(const LevelFamily& fam, const StabilizationParams& s) {
    check_unit_alpha(s, fam.p);
    LevelFamily out = fam;
    auto ev = fam.ev;
    u64 m0 = fam.m0, p = fam.p;
    mpq_class ia = 1 / s.alpha, r = s.eps_p / s.alpha;
    out.ev = [ev, m0, p, ia, r](u64 a, unsigned nu) -> mpq_class {
        mpq_class v = ev(a, nu);
        if (nu > 0 && r != 0) {
            u64 Mlow = m0;
            for (unsigned i = 1; i < nu; ++i) Mlow *= p;
            v -= r * ev(a % Mlow, nu - 1);
        }
        return pow_q(ia, nu) * v;
    };
    out.moment = nullptr;
    if (fam.stab_params && *fam.stab_params == s) out.moment = fam.stab_moment;
    else if (s.eps_p == 0 && s.alpha == 1) out.moment = fam.moment;
    out.stab_params.reset();
    out.stab_moment = nullptr;
    return out;
}

/// E_c(U) = E(U) − c·E(c^{−1}U), with moments transported when present.
inline LevelFamily regularize(const LevelFamily& fam, u64 c) {
    if (gcd_u(c, fam.m0 * fam.p) != 1) throw std::invalid_argument("regularize: c must be prime to m0*p");
    LevelFamily out = fam;
    auto ev = fam.ev;
    auto lev = [m0 = fam.m0, p = fam.p](unsigned nu) {
        u64 M = m0;
        for (unsigned i = 0; i < nu; ++i) M *= p;
        return M;
    };
    out.ev = [ev, lev, c](u64 a, unsigned nu) -> mpq_class {
        u64 M = lev(nu);
        u64 s = M == 1 ? 0 : mulmod(inv_mod(c % M, M), a, M);
        return ev(a, nu) - mpq_class(static_cast<unsigned long>(c)) * ev(s, nu);
    };
    out.moment = nullptr;
    if (fam.moment) {
        auto mom = fam.moment;
        out.moment = [mom, lev, c](u64 a, unsigned nu, unsigned k) -> mpq_class {
            u64 M = lev(nu);
            u64 s = M == 1 ? 0 : mulmod(inv_mod(c % M, M), a, M);
            // c·y − a = c(y − s) + d·M on the cell of s
            mpz_class d = (mpz_class(static_cast<unsigned long>(c)) * static_cast<unsigned long>(s) - static_cast<unsigned long>(a)) /
                          static_cast<unsigned long>(M);
            mpq_class dM = mpq_class(d * static_cast<unsigned long>(M)), cq(static_cast<unsigned long>(c));
            mpq_class t = 0;
            for (unsigned i = 0; i <= k; ++i)
                t += mpq_class(binom(mpz_class(k), i)) * pow_q(cq, i) * pow_q(dM, k - i) * mom(s, nu, i);
            return mom(a, nu, k) - cq * t;
        };
    }
    out.stab_params.reset();
    out.stab_moment = nullptr;
    return out;
}

struct DistributionReport {
    bool pass = true;
    unsigned nu = 0;  // first failing cell (ν, a), lexicographic
    u64 a = 0;
    mpq_class expected, got;
    u64 cells_checked = 0;
};

/// Σ_{b ≡ a mod m₀pᵛ} μ(b, ν+1) = μ(a, ν) for every residue a and ν < depth.
inline DistributionReport check_distribution(const LevelFamily& fam) {
    if (fam.depth < 1) throw std::invalid_argument("check_distribution: depth >= 1");
    DistributionReport rep;
    for (unsigned nu = 0; nu < fam.depth; ++nu) {
        u64 M = fam.level(nu);
        for (u64 a = 0; a < M; ++a) {
            mpq_class s = 0;
            for (u64 j = 0; j < fam.p; ++j) s += fam.ev(a + j * M, nu + 1);
            mpq_class v = fam.ev(a, nu);
            ++rep.cells_checked;
            if (s != v) {
                rep.pass = false;
                rep.nu = nu;
                rep.a = a;
                rep.expected = v;
                rep.got = s;
                return rep;
            }
        }
    }
    return rep;
}

/// Σ_a η(a)^{−1} μ(a, ν) over (ℤ/m₀pᵛ)^×, where the modulus of η is the level m₀pᵛ.
inline Cyclo pair_with_character(const LevelFamily& fam, const DirichletCharacter& eta) {
    u64 M = eta.modulus();
    std::optional<unsigned> nu;
    for (unsigned v = 0; v <= fam.depth; ++v)
        if (fam.level(v) == M) nu = v;
    if (!nu) throw std::invalid_argument("pair_with_character: modulus of eta is not a level of the family");
    Cyclo out(eta.order());
    if (!eta.is_primitive()) return out;
    unsigned n = eta.order();
    for (u64 a = 1; a < M || (M == 1 && a == 1); ++a) {
        int k = eta.exponent(static_cast<i64>(a % M));
        if (k < 0) continue;
        mpq_class v = fam.ev(a % M, *nu);
        if (v != 0) out.add_term(static_cast<long>((n - static_cast<unsigned>(k)) % n), v);
        if (M == 1) break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Measures to power series

namespace detail {

inline long floor_log(u64 p, long x) {
    long r = 0;
    for (long q = static_cast<long>(p); q <= x; q *= static_cast<long>(p)) ++r;
    return r;
}

inline long vp_factorial(u64 p, long n) {
    long r = 0;
    for (long q = static_cast<long>(p); q <= n; q *= static_cast<long>(p)) r += n / q;
    return r;
}

/// binom(L, j) mod p^{W−D}, j < M, from L mod p^W; D = v_p((M−1)!).
inline std::vector<mpz_class> binomials_mod(const mpz_class& L, u64 p, long W, long M) {
    mpz_class mod = ppow(p, W);
    std::vector<mpz_class> out(static_cast<size_t>(M));
    mpz_class num = 1, unit_fact = 1;
    long vfact = 0;
    for (long j = 0; j < M; ++j) {
        if (j > 0) {
            num = num * (L - (j - 1)) % mod;
            mpz_class jj = j;
            long v = static_cast<long>(mpz_remove(jj.get_mpz_t(), jj.get_mpz_t(), mpz_class(static_cast<unsigned long>(p)).get_mpz_t()));
            vfact += v;
            unit_fact = unit_fact * jj % mod;
        }
        mpz_class n = num;
        if (n < 0) n += mod;
        mpz_class inv;
        mpz_invert(inv.get_mpz_t(), unit_fact.get_mpz_t(), mod.get_mpz_t());
        out[static_cast<size_t>(j)] = n / ppow(p, vfact) * inv % mod;
    }
    return out;
}

/// Signed Stirling numbers of the first kind s(l, r), l < M.
inline std::vector<std::vector<mpz_class>> stirling1(long M) {
    std::vector<std::vector<mpz_class>> s(static_cast<size_t>(M), std::vector<mpz_class>(static_cast<size_t>(M), 0));
    s[0][0] = 1;
    for (long n = 1; n < M; ++n)
        for (long k = 1; k <= n; ++k)
            s[static_cast<size_t>(n)][static_cast<size_t>(k)] =
                s[static_cast<size_t>(n - 1)][static_cast<size_t>(k - 1)] - (n - 1) * s[static_cast<size_t>(n - 1)][static_cast<size_t>(k)];
    return s;
}

}  // namespace detail

struct SeriesConstruction {
    unsigned depth = 0;
    long moments_used = 0;  // highest cell moment, 0 for plain Riemann sums
    long exp_terms = 0;     // R in Σ_r ℓ^r log(1+T)^r / r!
    long certified_precision = 0;
};

/// ∫ branch^{−1}(x)·(1+T)^{log_u⟨x⟩} dμ over (ℤ/m₀ × ℤ_p)^×, from the deepest level of fam.
/// With cell moments the Taylor expansion of (1+T)^{log_u(x/a)} on each cell is integrated exactly
/// up to a certified tail; without them this is the plain Riemann sum.
inline IwasawaElement to_iwasawa_series(const LevelFamily& fam, const DirichletCharacter& branch, const mpz_class& u,
                                        long N, long M, SeriesConstruction* info = nullptr) {
    u64 p = fam.p;
    unsigned V = fam.depth;
    if ((fam.m0 * p) % branch.modulus() != 0) throw std::invalid_argument("to_iwasawa_series: branch modulus must divide m0*p");
    if (!is_zp_valued(branch, p)) throw std::invalid_argument("to_iwasawa_series: branch values not in Z_p");
    if (V < 1) throw PrecisionError("to_iwasawa_series: depth >= 1 required");
    long D = detail::vp_factorial(p, M - 1);
    long WG = N + D + 3;
    bool have_moments = static_cast<bool>(fam.moment) && V >= 2;
    long R = 0, K = 0, cert;
    if (have_moments) {
        R = (N + D + V - 2) / static_cast<long>(V - 1) + 1;
        // tail: k·V − R(1 + ⌊log_p k⌋) ≥ WG for all k > K
        K = R;
        for (long k = 1; k < 100000; ++k)
            if (k * static_cast<long>(V) - R * (1 + detail::floor_log(p, k)) < WG) K = k;
        cert = std::min(N, (R + 1) * static_cast<long>(V - 1) - D);
    } else {
        cert = M == 1 ? N : std::min(N, static_cast<long>(V) - 1 - detail::floor_log(p, M - 1));
    }
    if (cert < N)
        throw PrecisionError("to_iwasawa_series: depth " + std::to_string(V) + " certifies only p^" + std::to_string(cert) +
                             " for M = " + std::to_string(M) + (have_moments ? "" : " without cell moments"));
    if (info) *info = {V, K, R, cert};

    long WL = WG + D;  // precision of log_u⟨a⟩ before the binomial divisions
    PadicEmbedding emb(p, WG);
    DirichletCharacter binv = branch.conj();
    Padic logu = log_p(Padic::from_int(u, p, WL + 2));
    if (logu.val() != 1) throw std::invalid_argument("to_iwasawa_series: u must generate 1 + pZ_p");

    // q[r][k] = [s^k] (log(1+s)/log_p u)^r
    long Wq = WG + R * (1 + detail::floor_log(p, std::max(K, 1L))) + R + 2;
    std::vector<std::vector<Padic>> q;
    if (have_moments) {
        std::vector<mpq_class> lg(static_cast<size_t>(K) + 1, 0);
        for (long k = 1; k <= K; ++k) lg[static_cast<size_t>(k)] = mpq_class(k % 2 ? 1 : -1, k);
        Padic lu = log_p(Padic::from_int(u, p, Wq + 1));
        std::vector<mpq_class> pw(static_cast<size_t>(K) + 1, 0);
        pw[0] = 1;
        Padic lur = Padic::from_int(1, p, Wq + 1);
        for (long r = 0; r <= R; ++r) {
            std::vector<Padic> row(static_cast<size_t>(K) + 1, Padic::from_int(0, p, Wq));
            for (long k = 0; k <= K; ++k)
                if (pw[static_cast<size_t>(k)] != 0) row[static_cast<size_t>(k)] = Padic::from_rat(pw[static_cast<size_t>(k)], p, Wq + 2 * R + 4) / lur;
            q.push_back(row);
            std::vector<mpq_class> nx(static_cast<size_t>(K) + 1, 0);
            for (long i = 0; i <= K; ++i)
                if (pw[static_cast<size_t>(i)] != 0)
                    for (long j = 1; i + j <= K; ++j) nx[static_cast<size_t>(i + j)] += pw[static_cast<size_t>(i)] * lg[static_cast<size_t>(j)];
            pw = nx;
            lur = lur * lu;
        }
    }

    mpz_class modG = ppow(p, WG);
    std::vector<std::vector<mpz_class>> H(static_cast<size_t>(R) + 1, std::vector<mpz_class>(static_cast<size_t>(M), 0));
    u64 Mv = fam.level(V);
    for (u64 a = 1; a < Mv || (Mv == 1 && a == 1); ++a) {
        u64 ar = a % Mv;
        if (gcd_u(a, fam.m0 * p) != 1) continue;
        mpz_class w = emb.value(binv, static_cast<i64>(a % branch.modulus()));
        if (w == 0) continue;
        mpz_class A = static_cast<unsigned long>(a);
        Padic La = (log_p(one_unit_part(A, p, WL + 2)) / logu).with_precision(WL);
        auto Bj = detail::binomials_mod(La.residue(), p, WL, M);
        std::vector<mpz_class> rho(static_cast<size_t>(R) + 1);
        mpq_class m0v = fam.ev(ar, V);
        if (m0v != 0 && vp(m0v, p) < 0) throw std::invalid_argument("to_iwasawa_series: family is not Z_p-valued at the deepest level");
        rho[0] = Padic::from_rat(m0v, p, WG).residue();
        if (have_moments) {
            std::vector<Padic> mk(static_cast<size_t>(K) + 1, Padic::from_int(0, p, Wq));
            Padic ainv = Padic::from_int(1, p, Wq) / Padic::from_int(A, p, Wq), apow = Padic::from_int(1, p, Wq);
            for (long k = 1; k <= K; ++k) {
                apow = apow * ainv;
                mpq_class m = fam.moment(ar, V, static_cast<unsigned>(k));
                if (m == 0) continue;
                if (vp(m, p) < k * static_cast<long>(V)) throw std::invalid_argument("to_iwasawa_series: cell moment exceeds the measure bound");
                mk[static_cast<size_t>(k)] = Padic::from_rat(m, p, Wq + k * static_cast<long>(V)) * apow;
            }
            for (long r = 1; r <= R; ++r) {
                Padic s = Padic::from_int(0, p, WG);
                for (long k = r; k <= K; ++k)
                    if (!mk[static_cast<size_t>(k)].is_zero()) s += q[static_cast<size_t>(r)][static_cast<size_t>(k)] * mk[static_cast<size_t>(k)];
                if (s.precision() < WG || s.val() < 0) throw PrecisionError("to_iwasawa_series: cell expansion lost precision");
                rho[static_cast<size_t>(r)] = s.with_precision(WG).residue();
            }
        }
        for (long r = 0; r <= R; ++r) {
            const mpz_class& rr = rho[static_cast<size_t>(r)];
            if (rr == 0) continue;
            mpz_class wr = w * rr % modG;
            auto& h = H[static_cast<size_t>(r)];
            for (long j = 0; j < M; ++j) h[static_cast<size_t>(j)] += wr * Bj[static_cast<size_t>(j)];
        }
        if (Mv == 1) break;
    }
    // G = Σ_r H_r(T)·s(l, r)T^l/l!, scaled by p^D
    auto st = detail::stirling1(M);
    mpz_class pD = ppow(p, D);
    std::vector<mpz_class> lam(static_cast<size_t>(M));  // p^D / l!
    for (long l = 0; l < M; ++l) {
        mpz_class f;
        mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(l));
        long v = vp(f, p);
        mpz_class fu = f / ppow(p, v), inv;
        mpz_invert(inv.get_mpz_t(), fu.get_mpz_t(), modG.get_mpz_t());
        lam[static_cast<size_t>(l)] = ppow(p, D - v) * inv % modG;
    }
    std::vector<mpz_class> G(static_cast<size_t>(M), 0);
    for (long r = 0; r <= R; ++r) {
        auto& h = H[static_cast<size_t>(r)];
        for (auto& x : h) x %= modG;
        for (long l = r; l < M; ++l) {
            mpz_class c = st[static_cast<size_t>(l)][static_cast<size_t>(r)] * lam[static_cast<size_t>(l)] % modG;
            if (c == 0) continue;
            for (long i = 0; i + l < M; ++i) G[static_cast<size_t>(i + l)] += h[static_cast<size_t>(i)] * c;
        }
    }
    std::vector<mpz_class> out(static_cast<size_t>(M));
    for (long j = 0; j < M; ++j) {
        mpz_class g = G[static_cast<size_t>(j)] % modG;
        if (g < 0) g += modG;
        if (g % pD != 0) throw std::logic_error("to_iwasawa_series: scaled coefficient not divisible by p^D");
        out[static_cast<size_t>(j)] = g / pD;
    }
    return IwasawaElement::from_coeffs(p, N, M, out);
}

// ---------------------------------------------------------------------------
// Kubota–Leopoldt series

/// ω^e as a character mod p.
inline DirichletCharacter omega_power(u64 p, long e) {
    auto w = teichmuller_character(p);
    std::vector<int> ex(p, -1);
    long n = static_cast<long>(p) - 1;
    for (u64 a = 1; a < p; ++a) ex[a] = static_cast<int>(mod_floor(static_cast<i64>(w.exponent(static_cast<i64>(a))) * e, n));
    return DirichletCharacter::from_table(p, static_cast<unsigned>(n), std::move(ex));
}

namespace detail {

inline void check_tame(const DirichletCharacter& chi, u64 p, long i, bool allow_trivial) {
    if (p < 3) throw std::invalid_argument("kubota_leopoldt: p must be odd");
    if (!chi.is_primitive()) throw std::invalid_argument("kubota_leopoldt: character must be primitive");
    if (chi.conductor() % p == 0) throw std::invalid_argument("kubota_leopoldt: p divides the conductor");
    if (!is_zp_valued(chi, p)) throw std::invalid_argument("kubota_leopoldt: character values not in Z_p");
    bool odd = (chi.parity() == Parity::odd) != (mod_floor(i, 2) == 1);
    if (odd) throw std::invalid_argument("kubota_leopoldt: chi*omega^i must be even");
    if (!allow_trivial && chi.is_trivial() && mod_floor(i, static_cast<i64>(p - 1)) == 0)
        throw std::invalid_argument("kubota_leopoldt: trivial character has a pole; use the regularized series");
}

/// θ = χω^i, primitive.
inline DirichletCharacter branch_character(const DirichletCharacter& chi, u64 p, long i) {
    return (chi * omega_power(p, i)).primitive();
}

}  // namespace detail

/// L_p(−x, χω^i) = −(1 − φ(p)p^x)·B_{x+1,φ}/(x+1), φ = primitive(χω^{i−x−1}), to absolute precision W.
inline Padic kl_special_value(const DirichletCharacter& chi, u64 p, long i, unsigned x, long W) {
    unsigned n = x + 1;
    auto phi = (chi * omega_power(p, i - static_cast<long>(n))).primitive();
    PadicEmbedding emb(p, W + static_cast<long>(n) + 8);
    Padic B = emb.embed(gen_bernoulli(phi, n));
    Padic e = Padic::from_int(1, p, W + 8);
    if (phi.conductor() % p != 0) {
        Padic fp = Padic::from_int(emb.value(phi, static_cast<i64>(p % phi.modulus())), p, W + 8);
        e = e - fp * Padic::from_int(ppow(p, x), p, W + 8);
    }
    return (-(e * B) / Padic::from_int(n, p, W + 8)).with_precision(W);
}

/// L_p(0, χω^i), which may be non-integral for the trivial branch.
inline Padic kl_value_at_zero(const DirichletCharacter& chi, u64 p, long N, long i = 0) {
    detail::check_tame(chi, p, i, true);
    return kl_special_value(chi, p, i, 0, N);
}

/// Newton interpolation through T_j = u^j − 1 ↦ L_p(−j); with `regularized` the values carry 1 − u^{j+1}.
inline IwasawaElement kl_newton(const DirichletCharacter& chi, u64 p, long N, long M, long i, bool regularized, const mpz_class& u) {
    long K = N + M + 1;  // error at T^m has valuation ≥ K − m
    long W = N + K + detail::vp_factorial(p, K) + 6;
    std::vector<Padic> y;
    std::vector<Padic> nodes;
    mpz_class uj = 1;
    for (long j = 0; j < K; ++j) {
        Padic v = kl_special_value(chi, p, i, static_cast<unsigned>(j), W);
        if (regularized) v = Padic::from_int(mpz_class(1) - uj * u, p, W) * v;
        y.push_back(v.with_precision(W));
        nodes.push_back(Padic::from_int(uj - 1, p, W + K));
        uj *= u;
    }
    for (long j = 1; j < K; ++j)
        for (long t = K - 1; t >= j; --t)
            y[static_cast<size_t>(t)] = (y[static_cast<size_t>(t)] - y[static_cast<size_t>(t - 1)]) /
                                        (nodes[static_cast<size_t>(t)] - nodes[static_cast<size_t>(t - j)]);
    std::vector<Padic> P(static_cast<size_t>(M), Padic::from_int(0, p, W));
    P[0] = y[static_cast<size_t>(K - 1)];
    for (long j = K - 2; j >= 0; --j) {
        const Padic& tj = nodes[static_cast<size_t>(j)];
        for (long m = M - 1; m >= 1; --m) P[static_cast<size_t>(m)] = P[static_cast<size_t>(m - 1)] - tj * P[static_cast<size_t>(m)];
        P[0] = y[static_cast<size_t>(j)] - tj * P[0];
    }
    std::vector<mpz_class> c(static_cast<size_t>(M));
    for (long m = 0; m < M; ++m) {
        const Padic& v = P[static_cast<size_t>(m)];
        long prec = std::min(v.precision(), K - m);
        if (prec < N) throw PrecisionError("kl_newton: coefficient " + std::to_string(m) + " known only to p^" + std::to_string(prec));
        if (!v.is_integral()) throw std::logic_error("kl_newton: non-integral coefficient");
        c[static_cast<size_t>(m)] = v.with_precision(N).residue();
    }
    return IwasawaElement::from_coeffs(p, N, M, c);
}

/// 𝓛 with 𝓛(u^{−s} − 1) = L_p(s, χω^i).
inline IwasawaElement kubota_leopoldt(const DirichletCharacter& chi, u64 p, long N, long M, long i = 0, mpz_class u = 0) {
    if (u == 0) u = static_cast<unsigned long>(p + 1);
    detail::check_tame(chi, p, i, false);
    return kl_newton(chi, p, N, M, i, false, u);
}

/// (1 − u(1+T))·𝓛, integral also for the trivial character.
inline IwasawaElement kubota_leopoldt_regularized(const DirichletCharacter& chi, u64 p, long N, long M, long i = 0, mpz_class u = 0) {
    if (u == 0) u = static_cast<unsigned long>(p + 1);
    detail::check_tame(chi, p, i, true);
    return kl_newton(chi, p, N, M, i, true, u);
}

struct MeasureSeriesInfo {
    u64 c = 0;
    SeriesConstruction series;
};

/// 𝓛 (or (1 − u(1+T))𝓛 for the trivial branch) from the regularized, stabilized Bernoulli measure.
inline IwasawaElement kubota_leopoldt_measure(const DirichletCharacter& chi, u64 p, long N, long M, long i = 0, unsigned V = 3,
                                              const StabilizationParams& stab = {}, mpz_class u = 0,
                                              MeasureSeriesInfo* info = nullptr) {
    if (u == 0) u = static_cast<unsigned long>(p + 1);
    detail::check_tame(chi, p, i, true);
    u64 f = chi.conductor();
    auto theta = chi.induce(f) * omega_power(p, i);  // mod f·p
    auto weight = theta * omega_power(p, -1);
    bool trivial = chi.is_trivial() && mod_floor(i, static_cast<i64>(p - 1)) == 0;
    u64 c = 0;
    for (u64 t = 2; t < 100000 && c == 0; ++t) {
        if (gcd_u(t, f * p) != 1) continue;
        if (trivial) {
            if (powmod(t % (p * p), p - 1, p * p) != 1) c = t;
        } else if (theta.exponent(static_cast<i64>(t)) != 0) {
            c = t;
        }
    }
    if (c == 0) throw std::logic_error("kubota_leopoldt_measure: no regularizing c");
    auto fam = regularize(stabilize(bernoulli_family(f, p, V, stab), stab), c);
    MeasureSeriesInfo loc;
    loc.c = c;
    auto Gc = to_iwasawa_series(fam, weight.conj(), u, N, M, &loc.series);
    if (info) *info = loc;
    mpz_class C = static_cast<unsigned long>(c);
    if (!trivial) {
        PadicEmbedding emb(p, N);
        Padic Lc = log_ratio(C, u, p, exponent_precision(p, N, M));
        mpz_class cw = C * emb.value(weight, static_cast<i64>(c % weight.modulus()));
        auto fac = IwasawaElement::constant(Padic::from_int(1, p, N), M) - binomial_series(Lc, M).truncate(N, M).scaled(cw);
        return (Gc * fac.inverse()).scaled(-1);
    }
    // 1 − (u(1+T))^{L(c)} = −Y·Q, Y = u(1+T) − 1
    long Kq = N + M + 1;
    Padic Lc = log_ratio(C, u, p, N + detail::vp_factorial(p, Kq) + 2);
    IwasawaElement Y(p, N, M), Q(p, N, M), Yk(p, N, M);
    Y.set(0, u - 1);
    if (M > 1) Y.set(1, u);
    Yk.set(0, 1);
    for (long k = 1; k <= Kq; ++k) {
        Padic b = binom_padic(Lc, static_cast<unsigned long>(k));
        if (b.precision() < N) throw PrecisionError("kubota_leopoldt_measure: exponent precision");
        Q = Q + Yk.scaled(b.residue());
        Yk = Yk * Y;
    }
    return (Gc * Q.inverse()).scaled(-1);
}

/// 𝓛_{χω^i}(0) mod p from B_{n₀,χ} with n₀ ≡ i mod p − 1, 1 ≤ n₀ ≤ p − 1 (Kummer congruence).
inline u64 kl_kummer_constant(const DirichletCharacter& chi, u64 p, long i = 0) {
    detail::check_tame(chi, p, i, true);
    if (p >= (1ull << 31)) throw std::invalid_argument("kl_kummer_constant: p too large");
    long n0 = mod_floor(i - 1, static_cast<i64>(p - 1)) + 1;
    if (chi.is_trivial() && n0 == static_cast<long>(p) - 1) throw std::invalid_argument("kl_kummer_constant: trivial branch has a pole");
    u64 f = chi.conductor();
    PadicEmbedding emb(p, 1);
    std::vector<u64> inv(p, 0);
    for (u64 a = 1; a < p; ++a) inv[a] = inv_mod(a, p);
    // Bernoulli numbers mod p up to n₀ (skipping B_{p−1}) from b_n = B_n/n! = −Σ_{j≥1} b_{n−j}/(j+1)!
    long nb = std::min(n0, static_cast<long>(p) - 2);
    std::vector<u64> fact(static_cast<size_t>(nb) + 2, 1), ifact(static_cast<size_t>(nb) + 2, 1);
    for (long j = 1; j <= nb + 1; ++j) {
        fact[static_cast<size_t>(j)] = fact[static_cast<size_t>(j - 1)] * static_cast<u64>(j) % p;
        ifact[static_cast<size_t>(j)] = ifact[static_cast<size_t>(j - 1)] * inv[static_cast<size_t>(j)] % p;
    }
    std::vector<u64> bq(static_cast<size_t>(nb) + 1, 0), B(static_cast<size_t>(n0) + 1, 0);
    bq[0] = 1;
    for (long n = 1; n <= nb; ++n) {
        if (n > 1 && n % 2) continue;
        unsigned __int128 acc = 0;
        for (long j = 1; j <= n; ++j) {
            long t = n - j;
            if (t > 1 && t % 2) continue;
            acc += static_cast<unsigned __int128>(bq[static_cast<size_t>(t)]) * ifact[static_cast<size_t>(j + 1)];
        }
        bq[static_cast<size_t>(n)] = (p - static_cast<u64>(acc % p)) % p;
    }
    for (long k = 0; k <= nb; ++k) B[static_cast<size_t>(k)] = bq[static_cast<size_t>(k)] * fact[static_cast<size_t>(k)] % p;
    // w_r = Σ_{a ≤ f, a ≡ r} χ(a) mod p
    std::vector<u64> w(p, 0);
    for (u64 a = 1; a <= f; ++a) {
        u64 v = emb.value(chi, static_cast<i64>(a % f)).get_ui();
        w[a % p] = (w[a % p] + v) % p;
    }
    std::vector<u64> S(static_cast<size_t>(n0) + 1, 0);
    S[0] = w[0];
    for (u64 r = 1; r < p; ++r) {
        if (!w[r]) continue;
        u64 t = w[r];
        for (long j = 0; j <= n0; ++j) {
            S[static_cast<size_t>(j)] += t;  // at most p terms below p
            t = t * r % p;
        }
    }
    for (auto& x : S) x %= p;
    u64 finv = inv[f % p], fk = finv, C = 1, Bn = 0;
    for (long k = 0; k <= n0; ++k) {
        if (k < static_cast<long>(p) - 1 && B[static_cast<size_t>(k)] != 0)
            Bn = (Bn + mulmod(mulmod(C, B[static_cast<size_t>(k)], p), mulmod(fk, S[static_cast<size_t>(n0 - k)], p), p)) % p;
        fk = mulmod(fk, f % p, p);
        if (k < n0) C = mulmod(mulmod(C, static_cast<u64>(n0 - k) % p, p), inv[static_cast<size_t>(k + 1)], p);
    }
    u64 e = 1;
    if (n0 == 1) e = (1 + p - emb.value(chi, static_cast<i64>(p % f)).get_ui() % p) % p;
    u64 r = mulmod(mulmod(e, Bn, p), inv[static_cast<size_t>(n0)], p);
    return (p - r) % p;
}

enum class KLMethod { automatic, newton, measure, kummer };

/// Dispatch: the Kummer constant at (N, M) = (1, 1), Newton interpolation otherwise.
inline IwasawaElement kl_series(const DirichletCharacter& chi, u64 p, long N, long M, long i = 0, KLMethod method = KLMethod::automatic,
                                mpz_class u = 0) {
    if (method == KLMethod::automatic) method = (N == 1 && M == 1) ? KLMethod::kummer : KLMethod::newton;
    switch (method) {
        case KLMethod::kummer:
            if (N != 1 || M != 1) throw std::invalid_argument("kl_series: Kummer shortcut needs N = M = 1");
            return IwasawaElement::from_coeffs(p, 1, 1, {mpz_class(static_cast<unsigned long>(kl_kummer_constant(chi, p, i)))});
        case KLMethod::measure:
            return kubota_leopoldt_measure(chi, p, N, M, i, 3, {}, u);
        default:
            return kubota_leopoldt(chi, p, N, M, i, u);
    }
}

struct DeligneRibetResult {
    u64 p = 0;
    long branch = 0;
    DirichletCharacter psi1, psi2;  // tame parts of the two factors
    IwasawaElement L1, L2;
    std::vector<IwasawaElement> euler;
    IwasawaElement product;
    std::optional<LambdaMu> lm1, lm2, lm_product;
    std::vector<std::optional<LambdaMu>> lm_euler;
    bool additive = false;  // λ and μ add up, when all are certified
};

/// 𝓛_p^{Σ₀}(χ∘N·ε, ω^i) = 𝓛(χ₁χ, ω^i)·𝓛(χ₂χ, ω^i)·Π_{𝔮∈Σ₀}(1 − εχω^i(𝔮)N𝔮^{−1}(1+T)^{log_u⟨N𝔮⟩}).
inline DeligneRibetResult deligne_ribet_induced(const HeckeCharacterQF& eps, u64 p, long N, long M, long i = 0,
                                                const DirichletCharacter& twist = {}, const std::vector<IdealQF>& sigma0 = {},
                                                KLMethod method = KLMethod::automatic, mpz_class u = 0) {
    if (u == 0) u = static_cast<unsigned long>(p + 1);
    DeligneRibetResult r;
    r.p = p;
    r.branch = i;
    r.psi1 = (eps.chi1 * twist).primitive();
    r.psi2 = (eps.chi2 * twist).primitive();
    r.L1 = kl_series(r.psi1, p, N, M, i, method, u);
    r.L2 = kl_series(r.psi2, p, N, M, i, method, u);
    r.product = r.L1 * r.L2;
    PadicEmbedding emb(p, N + 2);
    auto tw = twist * omega_power(p, i);
    for (auto& q : sigma0) {
        mpz_class Nq = q.norm();
        if (Nq % static_cast<unsigned long>(p) == 0) throw std::invalid_argument("deligne_ribet_induced: p divides N(q)");
        long e = value_on_ideal(eps, q);
        mpz_class tv = emb.value(tw, static_cast<i64>(mpz_class(Nq % static_cast<unsigned long>(tw.modulus())).get_ui()));
        auto E = euler_factor(Padic::from_int(e * tv, p, N + 2), Nq, u, N, M);
        r.euler.push_back(E);
        r.product = r.product * E;
    }
    auto lm = [](const IwasawaElement& f) -> std::optional<LambdaMu> {
        try {
            auto x = lambda_mu(f);
            if (x.certified) return x;
        } catch (const PrecisionError&) {
        }
        return std::nullopt;
    };
    r.lm1 = lm(r.L1);
    r.lm2 = lm(r.L2);
    r.lm_product = lm(r.product);
    bool all = r.lm1 && r.lm2 && r.lm_product;
    long lam = 0, mu = 0;
    if (all) {
        lam = r.lm1->lambda + r.lm2->lambda;
        mu = r.lm1->mu + r.lm2->mu;
    }
    for (auto& E : r.euler) {
        r.lm_euler.push_back(lm(E));
        if (!r.lm_euler.back()) all = false;
        else {
            lam += r.lm_euler.back()->lambda;
            mu += r.lm_euler.back()->mu;
        }
    }
    r.additive = all && r.lm_product->lambda == lam && r.lm_product->mu == mu;
    return r;
}
}  // namespace hmiw
