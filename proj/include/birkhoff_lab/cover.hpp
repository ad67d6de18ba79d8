#pragma once

// Interval covers and their s-dimensional pre-measures.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "birkhoff_lab/arcs.hpp"
#include "birkhoff_lab/error.hpp"

namespace birkhoff_lab {

/// Cover by intervals of the given lengths; sum |I|^s bounds H^s_delta of
/// anything it covers from above.
struct Cover {
    std::vector<double> lengths;
    std::vector<Arc> arcs;  // optional positions, parallel to lengths when present

    double mesh() const {
        double m = 0.0;
        for (double l : lengths) m = std::max(m, l);
        return m;
    }
};

inline double pre_measure(const std::vector<double>& lengths, double s, double delta) {
    require(s > 0.0 && s <= 1.0, "s must be in (0, 1]");
    double total = 0.0, comp = 0.0;
    for (double l : lengths) {
        require(l > 0.0, "cover lengths must be positive");
        if (l > delta)
            fail(ErrorKind::MeshViolation,
                 "interval of length " + std::to_string(l) + " exceeds the mesh " + std::to_string(delta));
        double term = std::pow(l, s);
        double t = total + term;
        comp += std::abs(total) >= term ? (total - t) + term : (term - t) + total;
        total = t;
    }
    return total + comp;
}

inline double pre_measure(const Cover& cover, double s, double delta) { return pre_measure(cover.lengths, s, delta); }

/// One class of a construction's cover: `arcs` all of length at most
/// `nominal_length`, with the count bound the construction promises.
struct CoverClass {
    std::string name;
    std::vector<Arc> arcs;
    std::uint64_t count_bound = 0;
    u128 nominal_length = 0;
};

} // namespace birkhoff_lab
