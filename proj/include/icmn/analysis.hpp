// Closed-form performance results for the Poisson-meeting network model:
// per-flow throughput capacity, expected end-to-end delay under two-hop
// relaying, the delay-throughput necessary condition, and the M/M/1 pieces
// they decompose into.
#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "icmn/errors.hpp"
#include "icmn/rates.hpp"

namespace icmn {

// Per-flow throughput capacity: n * beta / 4 packets per second.
inline double capacity(int n, double beta) {
    if (n < 3)
        throw std::invalid_argument("capacity needs n >= 3 (two-hop relaying requires relays)");
    if (!(beta > 0.0))
        throw std::invalid_argument("beta must be > 0");
    return static_cast<double>(n) * beta / 4.0;
}

// Mean sojourn time of an M/M/1 queue, 1/(mu - lambda).
inline double mm1_expected_delay(double lambda, double mu) {
    if (!(lambda > 0.0) || !(mu > 0.0))
        throw std::invalid_argument("rates must be > 0");
    if (lambda >= mu)
        throw instability_error("arrival rate at or above service rate");
    return 1.0 / (mu - lambda);
}

// Two-stage decomposition of the end-to-end delay: the source queue drains
// at rate n*beta/4, a relay queue for one flow drains at beta/4 and is fed
// at lambda/n. The combined mean is (n-1)/(mu - lambda).
struct DelayDecomposition {
    double source_stage; // 1 / (mu - lambda)
    double relay_stage;  // 1 / (beta/4 - lambda/n)
    double combined;     // source_stage + (n-2)/n * relay_stage
};

inline DelayDecomposition delay_decomposition(int n, double beta, double lambda) {
    const double mu = capacity(n, beta);
    if (!(lambda > 0.0))
        throw std::invalid_argument("lambda must be > 0");
    if (lambda >= mu)
        throw instability_error("offered load at or above capacity; delay is unbounded");
    DelayDecomposition d;
    d.source_stage = 1.0 / (mu - lambda);
    d.relay_stage = 1.0 / (beta / 4.0 - lambda / static_cast<double>(n));
    d.combined = d.source_stage +
                 (static_cast<double>(n - 2) / static_cast<double>(n)) * d.relay_stage;
    return d;
}

// Expected end-to-end delay under two-hop relaying: (n-1)/(mu - lambda).
inline double expected_delay(int n, double beta, double lambda) {
    const double mu = capacity(n, beta);
    if (!(lambda > 0.0))
        throw std::invalid_argument("lambda must be > 0");
    if (lambda >= mu)
        throw instability_error("offered load at or above capacity; delay is unbounded");
    return static_cast<double>(n - 1) / (mu - lambda);
}

// Lower bound on E{D}/lambda that every stabilizing routing algorithm must
// respect: (1 - ln 2) / (2 (n-1) beta^2). Natural logarithm.
inline double tradeoff_bound(int n, double beta) {
    if (n < 2)
        throw std::invalid_argument("tradeoff_bound needs n >= 2");
    if (!(beta > 0.0))
        throw std::invalid_argument("beta must be > 0");
    return (1.0 - std::log(2.0)) / (2.0 * static_cast<double>(n - 1) * beta * beta);
}

enum class MobilityKind { random_waypoint, random_direction };

// Everything the closed forms say about one operating point. expected_delay
// is present only when a stable lambda was supplied.
struct AnalyticalResult {
    int node_count = 0;
    double beta = 0.0;
    double mu = 0.0;
    double lambda = 0.0; // 0 when no load was given
    double rho = 0.0;
    std::optional<double> expected_delay;
    double tradeoff_bound = 0.0;
};

// Composes the mobility-model meeting rate with the capacity, delay and
// tradeoff formulas. Constant-speed results come from passing the
// constant-speed mean relative speed (4v/pi).
inline AnalyticalResult case_study(MobilityKind kind, double side, double range,
                                   RelativeSpeed ev, int n,
                                   std::optional<double> lambda = std::nullopt) {
    const double beta = kind == MobilityKind::random_waypoint ? beta_rwp(side, range, ev)
                                                              : beta_rd(side, range, ev);
    AnalyticalResult r;
    r.node_count = n;
    r.beta = beta;
    r.mu = capacity(n, beta);
    r.tradeoff_bound = icmn::tradeoff_bound(n, beta);
    if (lambda) {
        r.lambda = *lambda;
        r.rho = *lambda / r.mu;
        r.expected_delay = icmn::expected_delay(n, beta, *lambda); // throws if unstable
    }
    return r;
}

} // namespace icmn
