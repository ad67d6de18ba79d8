#pragma once

// Points, arcs and functions on the circle, plus rotation orbits.

#include <cstdint>
#include <vector>

#include "birkhoff_lab/arcs.hpp"
#include "birkhoff_lab/cf_arith.hpp"
#include "birkhoff_lab/fixed_point.hpp"
#include "birkhoff_lab/gauge.hpp"
#include "birkhoff_lab/piecewise.hpp"

namespace birkhoff_lab {

/// x + k*stride*alpha for k = 0..n-1, by exact iterated addition.
inline std::vector<CirclePoint> orbit(CirclePoint x, const RotationNumber& alpha, std::uint64_t n,
                                      std::uint64_t stride = 1) {
    require(n >= 1, "orbit length must be >= 1");
    require(stride >= 1, "orbit stride must be >= 1");
    const CirclePoint step = alpha.value().times(stride);
    std::vector<CirclePoint> out;
    out.reserve(n);
    CirclePoint p = x;
    for (std::uint64_t k = 0; k < n; ++k) {
        out.push_back(p);
        p += step;
    }
    return out;
}

} // namespace birkhoff_lab
