// Test-only M/M/1 reference simulator (Lindley recursion). Independent of
// the library's event machinery so it can vouch for the queueing formulas.
#pragma once

#include <cstdint>
#include <vector>

#include "icmn/random.hpp"

namespace icmn::test {

struct Mm1Result {
    double mean_sojourn = 0.0;
    std::size_t kept = 0;
    std::vector<double> departures; // departure times after the discard window
};

inline Mm1Result simulate_mm1(double lambda, double mu, std::size_t arrivals,
                              std::uint64_t seed, double discard_fraction = 0.1) {
    RandomStream arrive(derive_seed(seed, 0xA1u));
    RandomStream serve(derive_seed(seed, 0x51u));
    const std::size_t discard = static_cast<std::size_t>(discard_fraction * static_cast<double>(arrivals));
    Mm1Result result;
    result.departures.reserve(arrivals - discard);
    double arrival_time = 0.0;
    double last_departure = 0.0;
    double sojourn_sum = 0.0;
    for (std::size_t i = 0; i < arrivals; ++i) {
        arrival_time += arrive.exponential(lambda);
        const double start = arrival_time > last_departure ? arrival_time : last_departure;
        last_departure = start + serve.exponential(mu);
        if (i >= discard) {
            sojourn_sum += last_departure - arrival_time;
            result.departures.push_back(last_departure);
            ++result.kept;
        }
    }
    result.mean_sojourn = sojourn_sum / static_cast<double>(result.kept);
    return result;
}

} // namespace icmn::test
