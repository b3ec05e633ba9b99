#pragma once

#include <cmath>
#include <numbers>
#include <utility>

namespace tomoprint::kernels {

/// (cos, sin) of view angle 2*pi*a/n with exact zeros and ones on the axes, so
/// axis-aligned views see exact pixel coordinates.
inline std::pair<double, double> unit_direction(int a, int n) {
    const double theta = 2.0 * std::numbers::pi * double(a) / double(n);
    double c = std::cos(theta), s = std::sin(theta);
    if (std::abs(c) < 1e-12) {
        c = 0.0;
        s = s > 0 ? 1.0 : -1.0;
    } else if (std::abs(s) < 1e-12) {
        s = 0.0;
        c = c > 0 ? 1.0 : -1.0;
    }
    return {c, s};
}

}  // namespace tomoprint::kernels
