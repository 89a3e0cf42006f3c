#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "icmn/meeting.hpp"
#include "icmn/mobility.hpp"
#include "icmn/stats.hpp"

using namespace icmn;

namespace {

// Inter-meeting gaps of one pair extracted from a schedule.
std::vector<double> pair_gaps(const MeetingSchedule& s, int i, int j) {
    std::vector<double> gaps;
    double last = -1.0;
    for (const MeetingEvent& e : s.events) {
        if (e.node_a != i || e.node_b != j)
            continue;
        if (last >= 0.0)
            gaps.push_back(e.time - last);
        last = e.time;
    }
    return gaps;
}

} // namespace

TEST_CASE("sample_inter_meeting validates and draws exponentials", "[meeting]") {
    RandomStream rng(3);
    REQUIRE_THROWS_AS(sample_inter_meeting(0.0, rng), std::invalid_argument);
    REQUIRE_THROWS_AS(sample_inter_meeting(-2.0, rng), std::invalid_argument);
    RandomStream a(9), b(9);
    REQUIRE(sample_inter_meeting(0.5, a) == sample_inter_meeting(0.5, b));
}

TEST_CASE("total_meeting_rate arithmetic", "[meeting]") {
    REQUIRE(total_meeting_rate(NetworkParams::poisson(20, 6.96e-4)) ==
            Catch::Approx(0.132240).epsilon(1e-12));
    REQUIRE(total_meeting_rate(NetworkParams::poisson(3, 1.0)) == Catch::Approx(3.0));
    REQUIRE(total_meeting_rate(NetworkParams::poisson(2, 2.0)) == Catch::Approx(2.0));
    REQUIRE_THROWS_AS(total_meeting_rate(NetworkParams::poisson(1, 1.0)), std::invalid_argument);
}

TEST_CASE("generate_schedule rejects bad parameters", "[meeting]") {
    REQUIRE_THROWS_AS(generate_schedule(NetworkParams::poisson(20, 6.96e-4), 0.0, 1),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(generate_schedule(NetworkParams::poisson(2, 1.0), 10.0, 1),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(generate_schedule(NetworkParams::poisson(20, 0.0), 10.0, 1),
                      std::invalid_argument);
    NetworkParams bad_geometry{20, 100.0, 200.0, 1.0}; // d >= L
    REQUIRE_THROWS_AS(generate_schedule(bad_geometry, 10.0, 1), std::invalid_argument);
}

TEST_CASE("schedule event count matches the Poisson mean", "[meeting]") {
    // n = 20, beta = 6.96e-4, T = 1e7: mean count 190 * beta * T ~ 1.3224e6,
    // and Y(T)/T within 1% of n(n-1)beta/2.
    const NetworkParams params = NetworkParams::poisson(20, 6.96e-4);
    const double horizon = 1e7;
    const double expected = 190.0 * 6.96e-4 * horizon;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const MeetingSchedule s = generate_schedule(params, horizon, seed);
        REQUIRE(std::abs(static_cast<double>(s.events.size()) / expected - 1.0) < 0.005);
        const double y_rate = static_cast<double>(s.events.size()) / horizon;
        REQUIRE(y_rate == Catch::Approx(total_meeting_rate(params)).epsilon(0.01));
        REQUIRE_NOTHROW(s.validate());
    }
}

TEST_CASE("per-pair counts are Poisson-dispersed and near beta*T", "[meeting]") {
    const NetworkParams params = NetworkParams::poisson(20, 6.96e-4);
    const double horizon = 1e7;
    const MeetingSchedule s = generate_schedule(params, horizon, 4);
    std::vector<std::size_t> counts(static_cast<std::size_t>(pair_count(20)), 0);
    std::size_t idx = 0;
    std::vector<std::vector<std::size_t>> lookup(20, std::vector<std::size_t>(20, 0));
    for (int i = 0; i < 20; ++i)
        for (int j = i + 1; j < 20; ++j)
            lookup[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = idx++;
    for (const MeetingEvent& e : s.events)
        ++counts[lookup[static_cast<std::size_t>(e.node_a)][static_cast<std::size_t>(e.node_b)]];

    const double per_pair = 6.96e-4 * horizon; // ~6960
    RunningStats stats;
    for (std::size_t c : counts) {
        REQUIRE(std::abs(static_cast<double>(c) / per_pair - 1.0) < 0.05);
        stats.add(static_cast<double>(c));
    }
    // Equal-rate dispersion: variance-to-mean ratio near 1.
    const double vmr = stats.variance() / stats.mean;
    REQUIRE(vmr > 0.7);
    REQUIRE(vmr < 1.3);
}

TEST_CASE("schedules are time-ordered with sequential tie-breakers", "[meeting]") {
    const MeetingSchedule s = generate_schedule(NetworkParams::poisson(8, 0.05), 1e4, 11);
    double prev = 0.0;
    for (std::size_t k = 0; k < s.events.size(); ++k) {
        REQUIRE(s.events[k].time >= prev);
        REQUIRE(s.events[k].time <= s.horizon);
        REQUIRE(s.events[k].seq == k);
        REQUIRE(s.events[k].node_a < s.events[k].node_b);
        const int tx = s.events[k].transmitter;
        REQUIRE((tx == s.events[k].node_a || tx == s.events[k].node_b));
        prev = s.events[k].time;
    }
}

TEST_CASE("pairwise inter-meeting times are exponential(beta)", "[meeting]") {
    // Well over 1e4 samples for one fixed pair: mean within 1% and KS below
    // the 1% critical value.
    const MeetingSchedule s = generate_schedule(NetworkParams::poisson(3, 1.0), 1.01e5, 21);
    const std::vector<double> gaps = pair_gaps(s, 0, 1);
    REQUIRE(gaps.size() >= 10000);
    REQUIRE(sample_mean(gaps) == Catch::Approx(1.0).epsilon(0.01));
    REQUIRE(ks_statistic_exponential(gaps, 1.0) < ks_critical_value(0.01, gaps.size()));
}

TEST_CASE("transmitter coin is unbiased per pair", "[meeting]") {
    const MeetingSchedule s = generate_schedule(NetworkParams::poisson(3, 1.0), 1.1e5, 8);
    std::size_t total = 0, first = 0;
    for (const MeetingEvent& e : s.events) {
        if (e.node_a != 0 || e.node_b != 1)
            continue;
        ++total;
        first += e.transmitter == 0;
    }
    REQUIRE(total >= 100000);
    REQUIRE(std::abs(static_cast<double>(first) / static_cast<double>(total) - 0.5) < 0.01);
}

TEST_CASE("transmitter-meets-own-destination rate is beta/2 per node", "[meeting]") {
    const int n = 20;
    const double beta = 6.96e-4, horizon = 1e7;
    const MeetingSchedule s = generate_schedule(NetworkParams::poisson(n, beta), horizon, 13);
    // Fixed cyclic derangement.
    std::vector<int> dest(n);
    for (int i = 0; i < n; ++i)
        dest[static_cast<std::size_t>(i)] = (i + 1) % n;
    std::vector<std::size_t> hits(n, 0);
    for (const MeetingEvent& e : s.events)
        if (dest[static_cast<std::size_t>(e.transmitter)] == e.receiver())
            ++hits[static_cast<std::size_t>(e.transmitter)];
    RunningStats per_node;
    for (int i = 0; i < n; ++i) {
        const double rate = static_cast<double>(hits[static_cast<std::size_t>(i)]) / horizon;
        REQUIRE(rate == Catch::Approx(beta / 2.0).epsilon(0.08));
        per_node.add(rate);
    }
    REQUIRE(per_node.mean == Catch::Approx(beta / 2.0).epsilon(0.01));
}

TEST_CASE("a vanishing horizon gives a valid empty schedule", "[meeting]") {
    const MeetingSchedule s = generate_schedule(NetworkParams::poisson(3, 0.5), 1e-4, 2);
    REQUIRE(s.events.empty());
    REQUIRE_NOTHROW(s.validate());
    const BetaEstimate est = estimate_beta(s);
    REQUIRE(est.value == 0.0);
    REQUIRE(est.low_sample);
    std::stringstream ss;
    write_schedule(ss, s);
    const MeetingSchedule back = read_schedule(ss);
    REQUIRE(back.events.empty());
    REQUIRE(back.node_count == 3);
}

TEST_CASE("identical seeds reproduce identical schedules, byte for byte", "[meeting]") {
    const NetworkParams params = NetworkParams::poisson(10, 0.01);
    const MeetingSchedule a = generate_schedule(params, 5e4, 77);
    const MeetingSchedule b = generate_schedule(params, 5e4, 77);
    const MeetingSchedule c = generate_schedule(params, 5e4, 78);
    REQUIRE(a.events.size() == b.events.size());
    std::stringstream sa, sb, sc;
    write_schedule(sa, a);
    write_schedule(sb, b);
    write_schedule(sc, c);
    REQUIRE(sa.str() == sb.str());
    REQUIRE(sa.str() != sc.str());
}

TEST_CASE("schedule text round trip is exact", "[meeting]") {
    const MeetingSchedule a = generate_schedule(NetworkParams::poisson(5, 0.3), 100.0, 3);
    std::stringstream ss;
    write_schedule(ss, a);
    const MeetingSchedule b = read_schedule(ss);
    REQUIRE(a.node_count == b.node_count);
    REQUIRE(a.horizon == b.horizon);
    REQUIRE(a.seed == b.seed);
    REQUIRE(a.events.size() == b.events.size());
    for (std::size_t k = 0; k < a.events.size(); ++k) {
        REQUIRE(a.events[k].time == b.events[k].time); // 17 digits: exact
        REQUIRE(a.events[k].node_a == b.events[k].node_a);
        REQUIRE(a.events[k].node_b == b.events[k].node_b);
        REQUIRE(a.events[k].transmitter == b.events[k].transmitter);
        REQUIRE(b.events[k].seq == k);
    }
}

TEST_CASE("exact-time ties keep file order via seq", "[meeting]") {
    std::stringstream ss("icmn-meetings v1 n=4 horizon=10 seed=0\n"
                         "2.5 0 1 0\n"
                         "2.5 0 2 0\n"
                         "2.5 1 3 3\n");
    const MeetingSchedule s = read_schedule(ss);
    REQUIRE(s.events.size() == 3);
    REQUIRE(s.events[0].seq == 0);
    REQUIRE(s.events[0].node_b == 1);
    REQUIRE(s.events[1].seq == 1);
    REQUIRE(s.events[1].node_b == 2);
    REQUIRE(s.events[2].seq == 2);
    REQUIRE_NOTHROW(s.validate());
}

TEST_CASE("schedule parser reports malformed lines", "[meeting]") {
    {
        std::stringstream ss("bogus header\n");
        REQUIRE_THROWS_AS(read_schedule(ss), parse_error);
    }
    {
        std::stringstream ss("icmn-meetings v1 n=3 horizon=10 seed=1\n1.0 0 1\n");
        try {
            read_schedule(ss);
            FAIL("expected parse_error");
        } catch (const parse_error& e) {
            REQUIRE(e.line() == 2);
        }
    }
    {
        // Transmitter outside the pair.
        std::stringstream ss("icmn-meetings v1 n=3 horizon=10 seed=1\n1.0 0 1 2\n");
        REQUIRE_THROWS_AS(read_schedule(ss), parse_error);
    }
    {
        // Out-of-order times.
        std::stringstream ss("icmn-meetings v1 n=3 horizon=10 seed=1\n5.0 0 1 0\n1.0 0 2 2\n");
        REQUIRE_THROWS_AS(read_schedule(ss), parse_error);
    }
}
