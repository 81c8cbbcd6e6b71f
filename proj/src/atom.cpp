#include "tpa/atom.hpp"

#include <cmath>
#include <string>

#include "tpa/errors.hpp"

namespace tpa {

void AtomParams::validate() const {
    if (!(gamma_e > 0.0) || !std::isfinite(gamma_e))
        throw DomainError("gamma_e must be positive and finite, got " + std::to_string(gamma_e));
    if (!(gamma_f > 0.0) || !std::isfinite(gamma_f))
        throw DomainError("gamma_f must be positive and finite, got " + std::to_string(gamma_f));
    if (!std::isfinite(delta_a) || !std::isfinite(frame_offset))
        throw DomainError("atomic frequencies must be finite");
}

AtomParams from_ratios(double ratio, double delta_a_over_gf) {
    if (!(ratio > 0.0))
        throw DomainError("gamma_e/gamma_f ratio must be positive, got " + std::to_string(ratio));
    AtomParams atom{ratio, 1.0, delta_a_over_gf, 0.0};
    atom.validate();
    return atom;
}

AtomParams make_atom(double gamma_e, double gamma_f, double delta_a) {
    AtomParams atom{gamma_e, gamma_f, delta_a, 0.0};
    atom.validate();
    return atom;
}

double expm1_ratio(double eps, double tau, double threshold) {
    if (std::abs(eps) < threshold) {
        const double t2 = tau * tau;
        return -tau + 0.5 * eps * t2 - eps * eps * t2 * tau / 6.0;
    }
    return std::expm1(-eps * tau) / eps;
}

} // namespace tpa
