#pragma once

#include "hmiw/arith.hpp"

#include <stdexcept>
#include <string>

namespace hmiw {

inline mpz_class ppow(u64 p, long k) {
    if (k <= 0) return 1;
    return pow_z(mpz_class(static_cast<unsigned long>(p)), static_cast<unsigned long>(k));
}

/// Thrown when a requested precision cannot be met.
struct PrecisionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// x = p^s·a + O(p^N) with 0 ≤ a < p^{N−s}; s = 0 for integral x, otherwise s < 0 and p ∤ a.
class Padic {
  public:
    Padic() = default;
    Padic(u64 p, long N) : p_(p), N_(N), s_(std::min(0L, N)) {}

    static Padic from_int(const mpz_class& x, u64 p, long N) {
        Padic r(p, N);
        r.a_ = x;
        r.normalize();
        return r;
    }
    static Padic from_rat(const mpq_class& x, u64 p, long N) {
        mpz_class den = x.get_den();
        long v = vp(den, p);
        mpz_class du = den / ppow(p, v);
        Padic r(p, N);
        r.s_ = -v;
        if (N - r.s_ <= 0) {
            r.a_ = 0;
            r.normalize();
            return r;
        }
        mpz_class mod = ppow(p, N - r.s_), inv;
        mpz_invert(inv.get_mpz_t(), du.get_mpz_t(), mod.get_mpz_t());
        r.a_ = mpz_class(x.get_num()) * inv;
        r.normalize();
        return r;
    }

    u64 prime() const { return p_; }
    long precision() const { return N_; }
    /// v_p(x), or N when x is O(p^N).
    long val() const { return a_ == 0 ? N_ : s_ + vp(a_, p_); }
    bool is_zero() const { return a_ == 0; }
    bool is_integral() const { return s_ >= 0; }
    bool is_unit() const { return val() == 0 && N_ > 0; }

    /// Integral representative in [0, p^N).
    mpz_class residue() const {
        if (s_ < 0) throw std::domain_error("Padic: not integral");
        return a_;
    }
    mpq_class rational() const {
        mpq_class r(a_);
        if (s_ < 0) r /= mpq_class(ppow(p_, -s_));
        return r;
    }

    Padic with_precision(long k) const {
        Padic r = *this;
        r.N_ = std::min(N_, k);
        r.normalize();
        return r;
    }

    friend Padic operator+(const Padic& x, const Padic& y) {
        check(x, y);
        Padic r(x.p_, std::min(x.N_, y.N_));
        r.s_ = std::min(x.s_, y.s_);
        r.a_ = x.a_ * ppow(x.p_, x.s_ - r.s_) + y.a_ * ppow(x.p_, y.s_ - r.s_);
        r.normalize();
        return r;
    }
    Padic operator-() const {
        Padic r = *this;
        r.a_ = -a_;
        r.normalize();
        return r;
    }
    friend Padic operator-(const Padic& x, const Padic& y) { return x + (-y); }
    friend Padic operator*(const Padic& x, const Padic& y) {
        check(x, y);
        long vx = x.val(), vy = y.val();
        Padic r(x.p_, std::min(x.N_ + vy, y.N_ + vx));
        r.s_ = x.s_ + y.s_;
        r.a_ = x.a_ * y.a_;
        r.normalize();
        return r;
    }
    friend Padic operator/(const Padic& x, const Padic& y) {
        check(x, y);
        long vy = y.val();
        if (y.is_zero()) throw PrecisionError("Padic: division by a value indistinguishable from zero");
        long vx = x.val();
        long rel = std::min(x.N_ - vx, y.N_ - vy);
        Padic r(x.p_, vx - vy + rel);
        if (x.is_zero() || rel <= 0) {
            r.normalize();
            return r;
        }
        mpz_class ux = x.a_ / ppow(x.p_, vx - x.s_), uy = y.a_ / ppow(x.p_, vy - y.s_);
        mpz_class mod = ppow(x.p_, rel), inv;
        mpz_invert(inv.get_mpz_t(), uy.get_mpz_t(), mod.get_mpz_t());
        r.s_ = vx - vy;
        r.a_ = ux * inv % mod;
        r.normalize();
        return r;
    }
    Padic& operator+=(const Padic& y) { return *this = *this + y; }
    Padic& operator-=(const Padic& y) { return *this = *this - y; }
    Padic& operator*=(const Padic& y) { return *this = *this * y; }

    /// x ≡ y mod p^k, requiring both to be known that far.
    bool equal_mod(const Padic& y, long k) const {
        if (std::min(N_, y.N_) < k) throw PrecisionError("Padic: comparison beyond precision");
        return (*this - y).val() >= k;
    }

    std::string str() const {
        std::string s = a_.get_str();
        if (s_ < 0) s += "/" + std::to_string(p_) + "^" + std::to_string(-s_);
        return s + " + O(" + std::to_string(p_) + "^" + std::to_string(N_) + ")";
    }

  private:
    static void check(const Padic& x, const Padic& y) {
        if (x.p_ != y.p_) throw std::invalid_argument("Padic: mismatched primes");
    }
    void normalize() {
        if (s_ > 0) {
            a_ *= ppow(p_, s_);
            s_ = 0;
        }
        if (N_ <= s_) {
            a_ = 0;
            s_ = std::min(0L, N_);
            return;
        }
        mpz_class mod = ppow(p_, N_ - s_);
        a_ %= mod;
        if (a_ < 0) a_ += mod;
        while (s_ < 0 && a_ != 0 && a_ % static_cast<unsigned long>(p_) == 0) {
            a_ /= static_cast<unsigned long>(p_);
            ++s_;
        }
        if (a_ == 0) s_ = std::min(0L, N_);
    }

    u64 p_ = 2;
    long N_ = 0;
    long s_ = 0;
    mpz_class a_ = 0;
};

/// ω(a) = lim a^{p^k}, for p ∤ a.
inline Padic teichmuller(const mpz_class& a, u64 p, long N) {
    mpz_class P = static_cast<unsigned long>(p);
    if (a % P == 0) throw std::invalid_argument("teichmuller: p divides a");
    mpz_class mod = ppow(p, N), e = ppow(p, N - 1), r;
    mpz_class am = a % mod;
    if (am < 0) am += mod;
    mpz_powm(r.get_mpz_t(), am.get_mpz_t(), e.get_mpz_t(), mod.get_mpz_t());
    return Padic::from_int(r, p, N);
}

/// ⟨a⟩ = a/ω(a) ∈ 1 + pℤ_p.
inline Padic one_unit_part(const mpz_class& a, u64 p, long N) {
    return Padic::from_int(a, p, N) / teichmuller(a, p, N);
}

/// log_p x for x ≡ 1 mod p, p odd; precision is that of x.
inline Padic log_p(const Padic& x) {
    u64 p = x.prime();
    if (p == 2) throw std::invalid_argument("log_p: p = 2 not supported");
    long N = x.precision();
    mpz_class z = x.residue() - 1;
    if (z % static_cast<unsigned long>(p) != 0) throw std::invalid_argument("log_p: argument not in 1 + pZ_p");
    long extra = 1;
    for (long q = static_cast<long>(p); q <= 4 * N + 8; q *= static_cast<long>(p)) ++extra;
    mpz_class mod = ppow(p, N + extra), zk = 1, sum = 0;
    for (long k = 1; k <= N + extra + 1; ++k) {
        long vk = vp(mpz_class(k), p);
        zk = zk * z % mod;
        mpz_class k_u = mpz_class(k) / ppow(p, vk), inv;
        mpz_invert(inv.get_mpz_t(), k_u.get_mpz_t(), mod.get_mpz_t());
        mpz_class t = zk / ppow(p, vk) * inv;
        if (k % 2 == 1) sum += t;
        else sum -= t;
        sum %= mod;
    }
    return Padic::from_int(sum, p, N);
}

inline Padic log_p(const mpz_class& x, u64 p, long N) { return log_p(Padic::from_int(x, p, N)); }

/// binom(c, j) for integral c; precision drops by v_p(j!).
inline Padic binom_padic(const Padic& c, unsigned long j) {
    u64 p = c.prime();
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), j);
    long loss = vp(f, p);
    return Padic::from_int(binom(c.residue(), j), p, c.precision() - loss);
}

}  // namespace hmiw
