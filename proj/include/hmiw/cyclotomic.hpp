#pragma once

#include "hmiw/arith.hpp"

#include <sstream>
#include <string>

namespace hmiw {

/// Integer coefficients of the n-th cyclotomic polynomial, lowest degree first.
inline std::vector<mpz_class> cyclotomic_poly(unsigned n) {
    // Φ_n = Π_{k|n} (x^k − 1)^{μ(n/k)}, built by exact division.
    std::vector<mpz_class> num{1}, den{1};
    auto mul_xk_minus_1 = [](std::vector<mpz_class>& f, unsigned k) {
        std::vector<mpz_class> g(f.size() + k, 0);
        for (size_t i = 0; i < f.size(); ++i) {
            g[i + k] += f[i];
            g[i] -= f[i];
        }
        f = std::move(g);
    };
    auto mobius = [](unsigned m) {
        int r = 1;
        for (auto [q, e] : factor_small(m)) {
            if (e > 1) return 0;
            r = -r;
        }
        return r;
    };
    for (unsigned k = 1; k <= n; ++k) {
        if (n % k) continue;
        int mu = mobius(n / k);
        if (mu == 1) mul_xk_minus_1(num, k);
        if (mu == -1) mul_xk_minus_1(den, k);
    }
    // num / den, den monic up to sign of constant term
    std::vector<mpz_class> q(num.size() - den.size() + 1, 0), r = num;
    for (size_t i = q.size(); i-- > 0;) {
        q[i] = r[i + den.size() - 1] / den.back();
        for (size_t j = 0; j < den.size(); ++j) r[i + j] -= q[i] * den[j];
    }
    return q;
}

/// Element of ℚ(ζ_n) held in the group ring ℚ[x]/(xⁿ − 1).
struct Cyclo {
    unsigned n = 1;
    std::vector<mpq_class> c;  // size n

    Cyclo() : n(1), c(1, 0) {}
    explicit Cyclo(unsigned order, const mpq_class& v = 0) : n(order), c(order, 0) { c[0] = v; }
    static Cyclo zeta_pow(unsigned order, long k) {
        Cyclo z(order);
        z.c[0] = 0;
        z.c[static_cast<unsigned>(mod_floor(k, order))] = 1;
        return z;
    }

    Cyclo& operator+=(const Cyclo& o) {
        check(o);
        for (unsigned i = 0; i < n; ++i) c[i] += o.c[i];
        return *this;
    }
    Cyclo& operator-=(const Cyclo& o) {
        check(o);
        for (unsigned i = 0; i < n; ++i) c[i] -= o.c[i];
        return *this;
    }
    Cyclo& operator*=(const mpq_class& s) {
        for (auto& x : c) x *= s;
        return *this;
    }
    Cyclo operator*(const Cyclo& o) const {
        check(o);
        Cyclo r(n);
        for (unsigned i = 0; i < n; ++i) {
            if (c[i] == 0) continue;
            for (unsigned j = 0; j < n; ++j)
                if (o.c[j] != 0) r.c[(i + j) % n] += c[i] * o.c[j];
        }
        return r;
    }
    Cyclo operator+(const Cyclo& o) const { Cyclo r = *this; r += o; return r; }
    Cyclo operator-(const Cyclo& o) const { Cyclo r = *this; r -= o; return r; }
    Cyclo operator*(const mpq_class& s) const { Cyclo r = *this; r *= s; return r; }
    /// Adds s·ζ^k.
    void add_term(long k, const mpq_class& s) { c[static_cast<unsigned>(mod_floor(k, n))] += s; }

    /// Coordinates in the power basis 1, ζ, …, ζ^{φ(n)−1}.
    std::vector<mpq_class> reduced() const {
        auto phi = cyclotomic_poly(n);
        std::vector<mpq_class> r(c.begin(), c.end());
        size_t deg = phi.size() - 1;
        for (size_t i = r.size(); i-- > deg;) {
            if (r[i] == 0) continue;
            mpq_class t = r[i];
            for (size_t j = 0; j <= deg; ++j) r[i - deg + j] -= t * mpq_class(phi[j]);
        }
        r.resize(deg);
        return r;
    }
    bool is_zero() const {
        for (auto& x : reduced())
            if (x != 0) return false;
        return true;
    }
    bool operator==(const Cyclo& o) const { return (*this - o).is_zero(); }
    /// Rational value if the element lies in ℚ.
    bool is_rational(mpq_class* out = nullptr) const {
        auto r = reduced();
        for (size_t i = 1; i < r.size(); ++i)
            if (r[i] != 0) return false;
        if (out) *out = r.empty() ? mpq_class(0) : r[0];
        return true;
    }
    /// Same element viewed in ℚ(ζ_m), n | m.
    Cyclo lift(unsigned m) const {
        if (m % n) throw std::invalid_argument("Cyclo::lift: order mismatch");
        Cyclo r(m);
        for (unsigned i = 0; i < n; ++i) r.c[i * (m / n)] = c[i];
        return r;
    }
    std::string str() const {
        std::ostringstream os;
        auto r = reduced();
        bool first = true;
        for (size_t i = 0; i < r.size(); ++i) {
            if (r[i] == 0) continue;
            if (!first) os << " + ";
            os << r[i].get_str();
            if (i) os << "*z^" << i;
            first = false;
        }
        if (first) os << "0";
        return os.str();
    }

private:
    void check(const Cyclo& o) const {
        if (o.n != n) throw std::invalid_argument("Cyclo: order mismatch");
    }
};

}  // namespace hmiw
