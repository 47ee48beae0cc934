#pragma once

#include <cmath>

#include "epo/errors.hpp"

namespace epo {

// c0: viscous damping (1/time), k: stiffness (1/time^2), Y: elastic bound
// (displacement). The underdamped condition 4k > c0^2 keeps the free
// oscillation rotational with angular frequency omega.
struct OscillatorParams {
    double c0 = 0.0;
    double k = 0.0;
    double Y = 0.0;
    double omega = 0.0;
};

inline OscillatorParams validate_params(double c0, double k, double Y) {
    if (!(c0 > 0.0) || !(k > 0.0) || !(Y > 0.0))
        fail(errc::non_positive_param, "require c0 > 0, k > 0, Y > 0");
    const double disc = 4.0 * k - c0 * c0;
    if (!(disc > 0.0))
        fail(errc::overdamped_param, "require 4k > c0^2 strictly");
    return {c0, k, Y, std::sqrt(disc) / 2.0};
}

} // namespace epo
