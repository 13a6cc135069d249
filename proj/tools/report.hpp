#pragma once

#include "hmiw/eisenstein.hpp"
#include "hmiw/measures.hpp"

#include <nlohmann/json.hpp>

namespace hmiw::report {

using json = nlohmann::ordered_json;

inline std::string s(const mpz_class& x) { return x.get_str(); }
inline std::string s(const mpq_class& x) { return x.get_str(); }

inline json elem(const QElem& x) { return {{"a", s(x.a)}, {"b", s(x.b)}}; }

inline json field(const RealQuadraticField& F) {
    return {{"d", F.d},
            {"disc", F.disc},
            {"integral_basis", F.half ? "Z[(1+sqrt d)/2]" : "Z[sqrt d]"},
            {"fund_unit", elem(F.fund_unit)},
            {"fund_unit_norm", F.fund_unit_norm},
            {"u_plus", elem(F.u_plus)},
            {"narrow_class_number", "assumed 1"}};
}

inline json factorization(const Factorization& f) {
    json fs = json::array();
    for (auto& [q, e] : f.primes) fs.push_back({s(q), e});
    json un = json::array();
    for (auto& c : f.unfactored) un.push_back(s(c));
    return {{"sign", f.sign}, {"primes", fs}, {"unfactored", un}, {"complete", f.complete()}};
}

inline json hecke_char(const HeckeCharacterQF& e) {
    return {{"m", e.m}, {"chi1_disc", e.chi1_disc}, {"chi2_disc", e.chi2_disc}, {"conductor", e.conductor_ideal.str()}};
}

inline json cyclo(const Cyclo& c) {
    mpq_class v;
    if (c.is_rational(&v)) return s(v);
    json a = json::array();
    for (auto& x : c.reduced()) a.push_back(s(x));
    return {{"order", c.n}, {"power_basis", a}};
}

inline json lvalue(const LValueRecord& L) {
    json j = {{"s", L.s}, {"value", cyclo(L.value)}, {"pole_flag", L.pole_flag}};
    if (!L.stripped.empty()) j["stripped"] = L.stripped;
    return j;
}

inline json congruence(const CongruenceReport& r) {
    json hb = json::object();
    for (auto& [q, st] : r.hypothesis_b) hb[q] = status_name(st);
    return {{"d", r.d},
            {"m", r.m},
            {"p", r.p},
            {"hypothesis_b", hb},
            {"hypothesis_c", status_name(r.hypothesis_c)},
            {"residue_units_check", status_name(r.residue_units_check)},
            {"iota1_check", status_name(r.iota1_check)},
            {"unit_order_check", status_name(r.unit_order_check)},
            {"verdict", r.verdict},
            {"label", r.label},
            {"unchecked", r.unchecked}};
}

inline json series(const IwasawaElement& f) {
    json c = json::array();
    for (auto& x : f.coeffs()) c.push_back(s(x));
    return {{"p", f.prime()}, {"N", f.p_precision()}, {"M", f.T_precision()}, {"coeffs", c}};
}

/// Coefficients may be decimal strings or integers.
inline IwasawaElement series_from(const json& j) {
    u64 p = j.at("p").get<u64>();
    long N = j.at("N").get<long>();
    const auto& cs = j.at("coeffs");
    long M = j.contains("M") ? j.at("M").get<long>() : static_cast<long>(cs.size());
    if (!is_prime_u64(p) || p == 2) throw std::invalid_argument("series: p must be an odd prime");
    std::vector<mpz_class> v;
    for (auto& c : cs) {
        if (c.is_string()) v.emplace_back(c.get<std::string>());
        else v.emplace_back(std::to_string(c.get<long long>()));
    }
    if (static_cast<long>(v.size()) > M) throw std::invalid_argument("series: more coefficients than M");
    return IwasawaElement::from_coeffs(p, N, M, v);
}

inline json lambda_mu(const std::optional<LambdaMu>& lm) {
    if (!lm) return {{"certified", false}};
    return {{"mu", lm->mu}, {"lambda", lm->lambda}, {"certified", lm->certified}};
}

inline json distribution(const DistributionReport& r) {
    json j = {{"pass", r.pass}, {"cells_checked", r.cells_checked}};
    if (!r.pass) j["first_failure"] = {{"nu", r.nu}, {"a", r.a}, {"expected", s(r.expected)}, {"got", s(r.got)}};
    return j;
}

/// "P7split1", "P3inert^2*P7split2", "(1)" or a rational integer n for the ideal (n).
inline IdealQF parse_ideal(const RealQuadraticField& F, const std::string& t) {
    if (t == "(1)") return {};
    if (!t.empty() && std::isdigit(static_cast<unsigned char>(t[0]))) return ideal_of_integer(F, std::stoull(t));
    IdealQF I;
    size_t pos = 0;
    while (pos < t.size()) {
        size_t end = t.find('*', pos);
        std::string f = t.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
        pos = end == std::string::npos ? t.size() : end + 1;
        if (f.size() < 2 || f[0] != 'P') throw std::invalid_argument("bad ideal factor: " + f);
        size_t i = 1;
        while (i < f.size() && std::isdigit(static_cast<unsigned char>(f[i]))) ++i;
        u64 p = std::stoull(f.substr(1, i - 1));
        int e = 1;
        std::string tag = f.substr(i);
        if (auto c = tag.find('^'); c != std::string::npos) {
            e = std::stoi(tag.substr(c + 1));
            tag = tag.substr(0, c);
        }
        auto pt = tag_from_name(tag);
        bool ok = false;
        for (auto& q : primes_above(F, p))
            if (q.factors[0].tag == pt) ok = true;
        if (!ok) throw std::invalid_argument("no prime " + f + " in Q(sqrt " + std::to_string(F.d) + ")");
        I = ideal_mul(I, IdealQF::prime(p, pt, e));
    }
    return I;
}

}  // namespace hmiw::report
