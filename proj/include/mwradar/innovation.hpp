#pragma once

#include <cmath>

#include "mwradar/errors.hpp"
#include "mwradar/rng.hpp"
#include "mwradar/types.hpp"

namespace mwradar {

enum class InnovationKind {
    circular_gaussian,
    complex_t,
};

/// Driving-noise law of the AR(1) clutter recursion. sigma2 is always the
/// second moment E|w|^2; shape is the tail parameter of the complex-t law
/// (ignored for Gaussian). shape > 1 keeps the second moment finite.
struct InnovationLaw {
    InnovationKind kind = InnovationKind::circular_gaussian;
    double sigma2 = 1.0;
    double shape = 3.0;

    void validate() const {
        if (!is_finite(sigma2) || sigma2 <= 0.0) {
            throw validation_error("InnovationLaw: sigma2 must be finite and > 0");
        }
        if (kind == InnovationKind::complex_t && (!is_finite(shape) || shape <= 1.0)) {
            throw validation_error("InnovationLaw: t shape must be finite and > 1");
        }
    }

    /// Inverse-gamma mixing rate of the t law. Derived, never stored: the
    /// value sigma2*(shape-1) is the unique choice for which the scale
    /// mixture below reproduces E|w|^2 = sigma2 exactly.
    double mixing_rate() const { return sigma2 * (shape - 1.0); }

    static InnovationLaw gaussian(double sigma2) {
        InnovationLaw law{InnovationKind::circular_gaussian, sigma2, 3.0};
        law.validate();
        return law;
    }
    static InnovationLaw student_t(double sigma2, double shape) {
        InnovationLaw law{InnovationKind::complex_t, sigma2, shape};
        law.validate();
        return law;
    }
};

/// One i.i.d. innovation draw. Both laws are circularly symmetric by
/// construction (uniform phase independent of modulus).
///
/// The complex-t draw is a Gaussian scale mixture: w = g * sqrt(beta/G) with
/// g circular Gaussian of unit power, G ~ Gamma(shape, 1) and
/// beta = sigma2*(shape-1). The modulus-squared then follows the Lomax law
/// Pr{|w|^2 > u} = (beta/(beta+u))^shape, which is the heavy-tailed target
/// density in its integrated form; the distribution tests pin this down.
inline cx sample_innovation(const InnovationLaw& law, Rng& rng) {
    law.validate();
    if (law.kind == InnovationKind::circular_gaussian) {
        return rng.complex_normal(law.sigma2);
    }
    const cx g = rng.complex_normal(1.0);
    const double mix = rng.gamma(law.shape);
    return g * std::sqrt(law.mixing_rate() / mix);
}

}  // namespace mwradar
