#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace mwradar {

/// Complex scalar used throughout the signal pipeline.
using cx = std::complex<double>;

inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(cx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

inline double abs2(cx z) { return z.real() * z.real() + z.imag() * z.imag(); }

}  // namespace mwradar
