#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "icmn/extraction.hpp"
#include "icmn/mobility.hpp"
#include "icmn/stats.hpp"
#include "support/contact_oracle.hpp"

using namespace icmn;

namespace {

Trace two_node_trace(double side, double horizon, std::vector<Waypoint> a,
                     std::vector<Waypoint> b) {
    Trace tr;
    tr.side_length = side;
    tr.horizon = horizon;
    tr.nodes = {std::move(a), std::move(b)};
    return tr;
}

} // namespace

TEST_CASE("a pair already in range emits exactly one event at t = 0", "[extraction]") {
    const Trace tr = two_node_trace(100.0, 50.0, {{0.0, 10.0, 10.0}, {50.0, 10.0, 10.0}},
                                    {{0.0, 14.0, 10.0}, {50.0, 14.0, 10.0}});
    const MeetingSchedule s = extract_meetings(tr, 8.0); // distance 4 = 0.5 d
    REQUIRE(s.events.size() == 1);
    REQUIRE(s.events[0].time == 0.0);
    REQUIRE(s.events[0].node_a == 0);
    REQUIRE(s.events[0].node_b == 1);
}

TEST_CASE("stationary nodes out of range never meet", "[extraction]") {
    const Trace tr = two_node_trace(100.0, 50.0, {{0.0, 10.0, 10.0}, {50.0, 10.0, 10.0}},
                                    {{0.0, 90.0, 90.0}, {50.0, 90.0, 90.0}});
    REQUIRE(extract_meetings(tr, 8.0).events.empty());
}

TEST_CASE("head-on approach meets at (g - d)/(2v)", "[extraction]") {
    // Gap 60 m, both at 2 m/s toward each other, d = 10: crossing at 12.5 s.
    const double v = 2.0;
    const Trace tr = two_node_trace(200.0, 40.0, {{0.0, 20.0, 50.0}, {40.0, 100.0, 50.0}},
                                    {{0.0, 80.0, 50.0}, {40.0, 0.0, 50.0}});
    const MeetingSchedule s = extract_meetings(tr, 10.0);
    REQUIRE(s.events.size() == 1);
    REQUIRE(s.events[0].time == Catch::Approx((60.0 - 10.0) / (2.0 * v)).epsilon(1e-12));
}

TEST_CASE("contact persisting across a turn emits no duplicate event", "[extraction]") {
    // Node 1 moves inside the contact disc of a stationary node 0, turning
    // twice while never leaving range.
    const Trace tr = two_node_trace(
        100.0, 30.0, {{0.0, 50.0, 50.0}, {30.0, 50.0, 50.0}},
        {{0.0, 53.0, 50.0}, {10.0, 50.0, 53.0}, {20.0, 47.0, 50.0}, {30.0, 50.0, 47.0}});
    const MeetingSchedule s = extract_meetings(tr, 10.0);
    REQUIRE(s.events.size() == 1);
    REQUIRE(s.events[0].time == 0.0);
}

TEST_CASE("re-entry after leaving range emits a second event", "[extraction]") {
    // Node 1 passes through, leaves, and comes back.
    const Trace tr = two_node_trace(
        200.0, 40.0, {{0.0, 100.0, 100.0}, {40.0, 100.0, 100.0}},
        {{0.0, 60.0, 100.0}, {20.0, 140.0, 100.0}, {40.0, 60.0, 100.0}});
    const MeetingSchedule s = extract_meetings(tr, 10.0);
    REQUIRE(s.events.size() == 2);
    // Crossings at |x - 100| = 10 while approaching: t = 7.5 and t = 27.5.
    REQUIRE(s.events[0].time == Catch::Approx(7.5).epsilon(1e-12));
    REQUIRE(s.events[1].time == Catch::Approx(27.5).epsilon(1e-12));
}

TEST_CASE("a tangent approach at exactly d is not a meeting", "[extraction]") {
    // Closest approach equals d: the distance never drops strictly below.
    const Trace tr = two_node_trace(200.0, 40.0, {{0.0, 100.0, 100.0}, {40.0, 100.0, 100.0}},
                                    {{0.0, 60.0, 90.0}, {40.0, 140.0, 90.0}});
    REQUIRE(extract_meetings(tr, 10.0).events.empty());
    // Slightly inside: exactly one downward crossing.
    const Trace tr2 = two_node_trace(200.0, 40.0, {{0.0, 100.0, 100.0}, {40.0, 100.0, 100.0}},
                                     {{0.0, 60.0, 90.001}, {40.0, 140.0, 90.001}});
    REQUIRE(extract_meetings(tr2, 10.0).events.size() == 1);
}

TEST_CASE("zero relative velocity inside range yields one event at the span start",
          "[extraction]") {
    // Both nodes translate together after t = 10 while in range.
    const Trace tr = two_node_trace(
        100.0, 30.0, {{0.0, 10.0, 10.0}, {10.0, 10.0, 10.0}, {30.0, 30.0, 10.0}},
        {{0.0, 40.0, 10.0}, {10.0, 14.0, 10.0}, {30.0, 34.0, 10.0}});
    const MeetingSchedule s = extract_meetings(tr, 8.0);
    REQUIRE(s.events.size() == 1);
    // The approach crosses d = 8 when the gap shrinks to 8: gap(t) = 30 - 2.6t.
    REQUIRE(s.events[0].time == Catch::Approx((30.0 - 8.0) / 2.6).epsilon(1e-9));
}

TEST_CASE("a crossing landing exactly on a waypoint instant is emitted once", "[extraction]") {
    // Node 1 reaches distance d from node 0 exactly where its leg ends, then
    // keeps approaching on the next leg: the crossing sits on the span seam.
    const Trace tr = two_node_trace(
        100.0, 20.0, {{0.0, 0.0, 0.0}, {20.0, 0.0, 0.0}},
        {{0.0, 20.0, 0.0}, {10.0, 10.0, 0.0}, {20.0, 0.0, 0.0}});
    const MeetingSchedule s = extract_meetings(tr, 10.0);
    REQUIRE(s.events.size() == 1);
    REQUIRE(s.events[0].time == 10.0);
}

TEST_CASE("extraction equals the time-stepping oracle on random traces", "[extraction]") {
    // 50 random small traces; halving the oracle step never reveals a
    // crossing the quadratic solver missed.
    RandomStream rng(31337);
    for (int trial = 0; trial < 50; ++trial) {
        NetworkParams p;
        p.node_count = 4;
        p.side_length = 100.0;
        const double horizon = 60.0;
        Trace tr;
        if (trial % 5 == 4) {
            // Mix in wrap-boundary traces, which contain position jumps.
            tr = generate_rd(p, SpeedModel::uniform_range(2.0, 12.0), PauseModel::none(),
                             TravelTimeModel::exponential_mean(6.0), Boundary::wrap, horizon,
                             1000 + static_cast<std::uint64_t>(trial));
        } else {
            tr = generate_rwp(p, SpeedModel::uniform_range(2.0, 12.0),
                              trial % 2 ? PauseModel::fixed(2.0) : PauseModel::none(), horizon,
                              1000 + static_cast<std::uint64_t>(trial));
        }
        const double range = 6.0 + rng.uniform01() * 10.0;
        const MeetingSchedule s = extract_meetings(tr, range, 5);
        for (int i = 0; i < 4; ++i) {
            for (int j = i + 1; j < 4; ++j) {
                std::vector<double> solver_times;
                for (const MeetingEvent& e : s.events)
                    if (e.node_a == i && e.node_b == j)
                        solver_times.push_back(e.time);
                for (const double dt : {0.02, 0.01}) {
                    const auto oracle = test::stepped_crossings(tr, i, j, range, dt);
                    REQUIRE(solver_times.size() >= oracle.size());
                    for (double t : oracle) {
                        bool matched = false;
                        for (double st : solver_times)
                            if (std::abs(st - t) <= dt + 1e-9)
                                matched = true;
                        REQUIRE(matched);
                    }
                }
            }
        }
    }
}

TEST_CASE("extraction is deterministic and the coin uses the seed", "[extraction]") {
    NetworkParams p;
    p.node_count = 6;
    p.side_length = 300.0;
    const Trace tr = generate_rwp(p, SpeedModel::constant(10.0), PauseModel::none(), 2000.0, 8);
    const MeetingSchedule a = extract_meetings(tr, 25.0, 42);
    const MeetingSchedule b = extract_meetings(tr, 25.0, 42);
    const MeetingSchedule c = extract_meetings(tr, 25.0, 43);
    std::stringstream sa, sb;
    write_schedule(sa, a);
    write_schedule(sb, b);
    REQUIRE(sa.str() == sb.str());
    REQUIRE(a.events.size() == c.events.size());
    bool transmitter_differs = false;
    std::size_t tx_a = 0;
    for (std::size_t k = 0; k < a.events.size(); ++k) {
        REQUIRE(a.events[k].time == c.events[k].time); // times ignore the coin seed
        transmitter_differs |= a.events[k].transmitter != c.events[k].transmitter;
        tx_a += a.events[k].transmitter == a.events[k].node_a;
    }
    REQUIRE(transmitter_differs);
    // Coin roughly fair across events.
    REQUIRE(std::abs(static_cast<double>(tx_a) / static_cast<double>(a.events.size()) - 0.5) <
            0.05);
}

TEST_CASE("extracted meeting rate approaches the rwp approximation", "[extraction]") {
    NetworkParams p;
    p.node_count = 20;
    p.side_length = 2000.0;
    const Trace tr = generate_rwp(p, SpeedModel::constant(40.0), PauseModel::none(), 5e5, 77);
    const MeetingSchedule s = extract_meetings(tr, 20.0, 78);
    const double formula = beta_rwp(2000.0, 20.0, expected_relative_speed(SpeedModel::constant(40.0)));
    REQUIRE(estimate_beta(s).value == Catch::Approx(formula).epsilon(0.10));
}

TEST_CASE("extraction validates its inputs", "[extraction]") {
    Trace tr = two_node_trace(100.0, 10.0, {{0.0, 1.0, 1.0}, {10.0, 2.0, 2.0}},
                              {{0.0, 5.0, 5.0}, {10.0, 6.0, 6.0}});
    REQUIRE_THROWS_AS(extract_meetings(tr, 0.0), std::invalid_argument);
    tr.nodes.pop_back();
    REQUIRE_THROWS_AS(extract_meetings(tr, 5.0), std::invalid_argument);
}
