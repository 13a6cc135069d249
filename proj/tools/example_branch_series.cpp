// Kubota-Leopoldt series of the quadratic characters attached to Q(sqrt 2), m = 5, at p = 7.
#include "hmiw/measures.hpp"

#include <iostream>

using namespace hmiw;

int main() {
    auto F = make_field(2);
    auto eps = induce_quadratic(F, 5);
    auto L = hecke_L_neg_induced(eps, 2);
    std::cout << "L_F(-1, eps) = " << L.rational_value() << "\n";

    auto r = deligne_ribet_induced(eps, 7, 8, 16);
    auto show = [](const char* name, const IwasawaElement& f) {
        auto lm = lambda_mu(f);
        std::cout << name << ": mu = " << lm.mu << ", lambda = " << lm.lambda << ", coeffs";
        for (long i = 0; i < 4; ++i) std::cout << " " << f.coeffs()[static_cast<size_t>(i)];
        std::cout << " ...\n";
    };
    show("chi_5", r.L1);
    show("chi_40", r.L2);
    show("product", r.product);

    // the same series from the regularized Bernoulli measure
    auto viaMeasure = kubota_leopoldt_measure(r.psi1, 7, 8, 16);
    std::cout << "measure path agrees: " << (viaMeasure.agrees_with(r.L1, 8, 16) ? "yes" : "no") << "\n";
}
