#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hmiw {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

inline u64 powmod(u64 b, u64 e, u64 m) {
    u64 r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

inline i64 mod_floor(i64 a, i64 m) {
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

inline u64 gcd_u(u64 a, u64 b) {
    while (b) {
        a %= b;
        std::swap(a, b);
    }
    return a;
}

inline u64 inv_mod(u64 a, u64 m) {
    mpz_class r, A = static_cast<unsigned long>(a), M = static_cast<unsigned long>(m);
    if (!mpz_invert(r.get_mpz_t(), A.get_mpz_t(), M.get_mpz_t()))
        throw std::invalid_argument("inv_mod: not invertible");
    return r.get_ui();
}

/// Deterministic Miller-Rabin for 64-bit integers.
inline bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % q == 0) return n == q;
    }
    u64 d = n - 1;
    int s = 0;
    while (!(d & 1)) {
        d >>= 1;
        ++s;
    }
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool comp = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                comp = false;
                break;
            }
        }
        if (comp) return false;
    }
    return true;
}

inline bool is_prime(const mpz_class& n) {
    if (n < 2) return false;
    if (n.fits_ulong_p()) return is_prime_u64(n.get_ui());
    return mpz_probab_prime_p(n.get_mpz_t(), 40) > 0;
}

inline bool is_squarefree(u64 n) {
    if (n == 0) return false;
    for (u64 q = 2; q * q <= n; ++q) {
        if (n % (q * q) == 0) return false;
        if (n % q == 0) n /= q;
    }
    return true;
}

inline u64 isqrt_u(u64 n) {
    mpz_class r, N = static_cast<unsigned long>(n);
    mpz_sqrt(r.get_mpz_t(), N.get_mpz_t());
    return r.get_ui();
}

inline int kronecker(const mpz_class& a, const mpz_class& n) {
    return mpz_kronecker(a.get_mpz_t(), n.get_mpz_t());
}

inline int kronecker(i64 a, i64 n) { return kronecker(mpz_class(static_cast<long>(a)), mpz_class(static_cast<long>(n))); }

/// Prime factorization of a machine integer by trial division.
inline std::vector<std::pair<u64, int>> factor_small(u64 n) {
    std::vector<std::pair<u64, int>> out;
    for (u64 q = 2; q * q <= n; q += (q == 2 ? 1 : 2)) {
        if (n % q) continue;
        int e = 0;
        while (n % q == 0) {
            n /= q;
            ++e;
        }
        out.emplace_back(q, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

inline std::vector<u64> primes_up_to(u64 n) {
    std::vector<bool> sieve(n + 1, true);
    std::vector<u64> ps;
    for (u64 i = 2; i <= n; ++i) {
        if (!sieve[i]) continue;
        ps.push_back(i);
        for (u64 j = i * i; j <= n; j += i) sieve[j] = false;
    }
    return ps;
}

/// Least primitive root modulo an odd prime p.
inline u64 primitive_root(u64 p) {
    if (p == 2) return 1;
    auto fs = factor_small(p - 1);
    for (u64 g = 2; g < p; ++g) {
        bool ok = true;
        for (auto [q, e] : fs) {
            if (powmod(g, (p - 1) / q, p) == 1) {
                ok = false;
                break;
            }
        }
        if (ok) return g;
    }
    throw std::logic_error("primitive_root: none found");
}

/// Pollard rho (Brent) on a 64-bit composite; returns a nontrivial factor or 0.
inline u64 pollard_rho(u64 n, u64 iters) {
    if (n % 2 == 0) return 2;
    for (u64 c = 1; c < 20; ++c) {
        u64 y = 2, x = 2, q = 1, g = 1, ys = 2;
        u64 r = 1, m = 128, done = 0;
        auto f = [&](u64 v) { return static_cast<u64>((static_cast<u128>(v) * v + c) % n); };
        do {
            x = y;
            for (u64 i = 0; i < r; ++i) y = f(y);
            u64 k = 0;
            do {
                ys = y;
                for (u64 i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                g = gcd_u(q, n);
                k += m;
                done += m;
            } while (k < r && g == 1);
            r *= 2;
        } while (g == 1 && done < iters);
        if (g == n) {
            do {
                ys = f(ys);
                g = gcd_u(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != 1 && g != n) return g;
        if (done >= iters) return 0;
    }
    return 0;
}

struct Factorization {
    std::map<mpz_class, int> primes;
    std::vector<mpz_class> unfactored;  // composite cofactors left over
    int sign = 1;
    bool complete() const { return unfactored.empty(); }
};

namespace detail {
inline void split_u64(u64 n, u64 iters, Factorization& out, int mult) {
    if (n == 1) return;
    if (is_prime_u64(n)) {
        out.primes[mpz_class(static_cast<unsigned long>(n))] += mult;
        return;
    }
    u64 d = pollard_rho(n, iters);
    if (d == 0) {
        out.unfactored.emplace_back(static_cast<unsigned long>(n));
        return;
    }
    split_u64(d, iters, out, mult);
    split_u64(n / d, iters, out, mult);
}
}  // namespace detail

/// Trial division to `trial_bound`, then Pollard rho on cofactors of at most 64 bits.
/// Larger composite cofactors are reported in `unfactored`.
inline Factorization factor(mpz_class n, u64 rho_iters = 1u << 22, u64 trial_bound = 100000) {
    Factorization out;
    if (n == 0) throw std::invalid_argument("factor: zero");
    if (n < 0) {
        out.sign = -1;
        n = -n;
    }
    for (u64 q = 2; q <= trial_bound; q += (q == 2 ? 1 : 2)) {
        if (n == 1) break;
        mpz_class Q = static_cast<unsigned long>(q);
        if (Q * Q > n) break;
        while (mpz_divisible_ui_p(n.get_mpz_t(), q)) {
            n /= Q;
            out.primes[Q] += 1;
        }
    }
    if (n == 1) return out;
    if (is_prime(n)) {
        out.primes[n] += 1;
    } else if (mpz_sizeinbase(n.get_mpz_t(), 2) <= 64) {
        detail::split_u64(mpz_get_ui(n.get_mpz_t()), rho_iters, out, 1);
    } else {
        out.unfactored.push_back(n);
    }
    return out;
}

inline mpz_class binom(const mpz_class& n, unsigned long k) {
    mpz_class r;
    mpz_bin_ui(r.get_mpz_t(), n.get_mpz_t(), k);
    return r;
}

inline mpz_class pow_z(const mpz_class& b, unsigned long e) {
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
}

inline mpq_class pow_q(const mpq_class& b, unsigned long e) {
    mpz_class n, d;
    mpz_pow_ui(n.get_mpz_t(), b.get_num_mpz_t(), e);
    mpz_pow_ui(d.get_mpz_t(), b.get_den_mpz_t(), e);
    mpq_class r(n, d);
    r.canonicalize();
    return r;
}

/// p-adic valuation of a nonzero integer.
inline long vp(const mpz_class& x, u64 p) {
    if (x == 0) return std::numeric_limits<long>::max();
    mpz_class t = x;
    mpz_class P = static_cast<unsigned long>(p);
    return static_cast<long>(mpz_remove(t.get_mpz_t(), t.get_mpz_t(), P.get_mpz_t()));
}

inline long vp(const mpq_class& x, u64 p) {
    if (x == 0) return std::numeric_limits<long>::max();
    return vp(mpz_class(x.get_num()), p) - vp(mpz_class(x.get_den()), p);
}

}  // namespace hmiw
