// Geometric meeting extraction. For every node pair, walks the two
// piecewise-linear trajectories over their overlapping linear spans and
// solves |relative position(t)|^2 = d^2 exactly, emitting one meeting event
// at each downward range crossing. Contact state is tracked per pair across
// spans, so a pair that stays in range through several segments (or is in
// range at t = 0) produces exactly one event.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "icmn/meeting.hpp"
#include "icmn/mobility.hpp"
#include "icmn/random.hpp"

namespace icmn {

namespace detail {

struct PairWalker {
    const std::vector<Waypoint>& a;
    const std::vector<Waypoint>& b;
    double range2;

    // Appends every downward-crossing time to `out`.
    void crossings(std::vector<double>& out) const {
        std::size_t ia = 0, ib = 0;
        bool inside = false;
        while (ia + 1 < a.size() && ib + 1 < b.size()) {
            const double lo = std::max(a[ia].t, b[ib].t);
            const double hi = std::min(a[ia + 1].t, b[ib + 1].t);
            if (hi > lo)
                process_span(a[ia], a[ia + 1], b[ib], b[ib + 1], lo, hi, inside, out);
            const double a_end = a[ia + 1].t;
            const double b_end = b[ib + 1].t;
            if (a_end <= b_end) ++ia;
            if (b_end <= a_end) ++ib;
        }
    }

private:
    static void lerp(const Waypoint& w0, const Waypoint& w1, double t, double& x,
                     double& y, double& vx, double& vy) {
        const double dt = w1.t - w0.t;
        vx = (w1.x - w0.x) / dt;
        vy = (w1.y - w0.y) / dt;
        x = w0.x + vx * (t - w0.t);
        y = w0.y + vy * (t - w0.t);
    }

    void process_span(const Waypoint& a0, const Waypoint& a1, const Waypoint& b0,
                      const Waypoint& b1, double lo, double hi, bool& inside,
                      std::vector<double>& out) const {
        double ax, ay, avx, avy, bx, by, bvx, bvy;
        lerp(a0, a1, lo, ax, ay, avx, avy);
        lerp(b0, b1, lo, bx, by, bvx, bvy);
        const double rx = ax - bx;
        const double ry = ay - by;
        const double vx = avx - bvx;
        const double vy = avy - bvy;

        // f(s) = |r + v s|^2 - d^2 over s in [0, hi - lo).
        const double c = rx * rx + ry * ry - range2;

        // Reconcile at the span start: covers t = 0 contacts and position
        // jumps between spans.
        if (c < 0.0) {
            if (!inside)
                out.push_back(lo);
            inside = true;
        } else {
            inside = false;
        }

        const double qa = vx * vx + vy * vy;
        if (qa == 0.0)
            return; // constant separation: nothing beyond the reconcile
        const double qb = rx * vx + ry * vy;
        const double disc = qb * qb - qa * c;
        if (disc <= 0.0)
            return; // never dips strictly below the range in this span
        const double sq = std::sqrt(disc);
        const double h = hi - lo;
        const double s_enter = (-qb - sq) / qa;
        const double s_exit = (-qb + sq) / qa;
        if (inside) {
            // Started in contact; can only leave.
            if (s_exit > 0.0 && s_exit < h)
                inside = false;
            return;
        }
        if (s_enter >= 0.0 && s_enter < h) {
            out.push_back(lo + s_enter);
            inside = s_exit >= h; // may leave again within the same span
        }
    }
};

} // namespace detail

// Extracts the meeting schedule implied by a trace and a transmission
// range. The transmitter of each event is drawn from a per-pair substream
// of `seed`, so identical inputs give identical schedules.
inline MeetingSchedule extract_meetings(const Trace& trace, double range,
                                        std::uint64_t seed = 0) {
    if (!(range > 0.0))
        throw std::invalid_argument("range must be > 0");
    if (trace.node_count() < 2)
        throw std::invalid_argument("extraction needs at least two nodes");
    trace.validate();

    const int n = trace.node_count();
    MeetingSchedule schedule;
    schedule.node_count = n;
    schedule.horizon = trace.horizon;
    schedule.seed = seed;

    std::vector<double> times;
    std::uint64_t pair_idx = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j, ++pair_idx) {
            times.clear();
            detail::PairWalker walker{trace.nodes[static_cast<std::size_t>(i)],
                                      trace.nodes[static_cast<std::size_t>(j)],
                                      range * range};
            walker.crossings(times);
            if (times.empty())
                continue;
            RandomStream coin(derive_seed(seed, stream_kind::extract_pair, pair_idx));
            for (double t : times) {
                MeetingEvent e;
                e.time = t;
                e.node_a = i;
                e.node_b = j;
                e.transmitter = coin.coin() ? i : j;
                schedule.events.push_back(e);
            }
        }
    }

    // Deterministic merge across pairs: order by (time, pair).
    std::sort(schedule.events.begin(), schedule.events.end(),
              [](const MeetingEvent& l, const MeetingEvent& r) {
                  if (l.time != r.time) return l.time < r.time;
                  if (l.node_a != r.node_a) return l.node_a < r.node_a;
                  return l.node_b < r.node_b;
              });
    for (std::size_t k = 0; k < schedule.events.size(); ++k)
        schedule.events[k].seq = k;
    return schedule;
}

} // namespace icmn
