#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "mwradar/errors.hpp"
#include "mwradar/types.hpp"

namespace mwradar {

/// Identifies one reproducible random stream: (seed, stream) fully determines
/// the draw sequence, independent of thread count or scheduling order.
/// Monte Carlo campaigns assign one stream per trial.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_stream(RngStream s) {
    std::uint64_t st = s.seed;
    std::uint64_t h = splitmix64(st);
    st = h ^ (0x9E3779B97F4A7C15ULL * (s.stream + 0x632BE59BD9B4E019ULL));
    return splitmix64(st);
}

}  // namespace detail

/// Seeded generator with the distribution transforms the simulator needs.
/// Distribution sampling is implemented in-house (Box-Muller polar form,
/// Marsaglia-Tsang gamma) so that sequences are bit-stable across standard
/// library versions; only the mt19937_64 engine is taken from the stdlib.
class Rng {
public:
    explicit Rng(RngStream s) : engine_(detail::mix_stream(s)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform draw on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard real normal draw. Generates Box-Muller pairs; the spare is
    /// cached, so consumption of the underlying engine alternates 2-0-2-0.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double t = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

    /// Circularly symmetric complex normal with E|z|^2 = var.
    /// Exact by construction: |z|^2 ~ Exp(mean var), phase uniform.
    cx complex_normal(double var) {
        const double r = std::sqrt(-var * std::log(uniform()));
        const double t = 2.0 * std::numbers::pi * uniform();
        return {r * std::cos(t), r * std::sin(t)};
    }

    /// Gamma(shape, scale 1) for shape >= 1, Marsaglia-Tsang rejection.
    double gamma(double shape) {
        if (!(shape >= 1.0) || !is_finite(shape)) {
            throw std::domain_error("Rng::gamma: shape must be finite and >= 1");
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Stream-id layout for campaign-scale runs. The top bits tag the purpose so
/// trial streams, H1 trial streams and noncentrality-oracle streams never
/// collide; the middle bits identify the grid point.
enum class StreamKind : std::uint64_t {
    h0_trial = 0,
    h1_trial = 1,
    noncentrality = 2,
    single = 3,
};

inline std::uint64_t stream_id(StreamKind kind, std::uint32_t point, std::uint64_t index) {
    return (static_cast<std::uint64_t>(kind) << 62) |
           (static_cast<std::uint64_t>(point & 0x3FFFFFu) << 40) | (index & 0xFFFFFFFFFFULL);
}

}  // namespace mwradar
