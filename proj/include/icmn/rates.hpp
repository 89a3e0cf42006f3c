// Pairwise meeting-rate approximations for the two supported mobility
// models, as functions of region size, contact range and mean relative
// speed. Valid in the small-range regime d << L.
#pragma once

#include <stdexcept>

namespace icmn {

// Mean relative speed E|V1 - V2| between two independently moving nodes.
struct RelativeSpeed {
    double value = 0.0; // meters/second

    void validate() const {
        if (!(value > 0.0))
            throw std::invalid_argument("relative speed must be > 0");
    }
};

// Stationary-density correction for random waypoint, whose long-run node
// locations concentrate near the region center and therefore meet more
// often than uniformly placed nodes would.
inline constexpr double rwp_density_correction = 1.3683;

// True when the far-field approximation behind beta_rwp/beta_rd is sound;
// callers warn when it is not.
inline bool small_range_regime(double side, double range) {
    return range <= 0.1 * side;
}

namespace detail {
inline void check_rate_geometry(double side, double range) {
    if (!(side > 0.0))
        throw std::invalid_argument("side must be > 0");
    if (range < 0.0)
        throw std::invalid_argument("range must be >= 0");
}
} // namespace detail

// Random waypoint pairwise meeting rate: 2 * c * d * E[V*] / L^2.
inline double beta_rwp(double side, double range, RelativeSpeed ev) {
    detail::check_rate_geometry(side, range);
    ev.validate();
    return 2.0 * rwp_density_correction * range * ev.value / (side * side);
}

// Random direction pairwise meeting rate: 2 * d * E[V*] / L^2.
inline double beta_rd(double side, double range, RelativeSpeed ev) {
    detail::check_rate_geometry(side, range);
    ev.validate();
    return 2.0 * range * ev.value / (side * side);
}

} // namespace icmn
