// Mobility models: random waypoint and random direction trajectory
// generation as piecewise-linear traces, the mean-relative-speed quadrature
// feeding the meeting-rate approximations, and the empirical rate estimator.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "icmn/errors.hpp"
#include "icmn/meeting.hpp"
#include "icmn/quadrature.hpp"
#include "icmn/random.hpp"
#include "icmn/rates.hpp"

namespace icmn {

struct SpeedModel {
    double min_speed = 0.0; // m/s
    double max_speed = 0.0;

    static SpeedModel constant(double v) { return SpeedModel{v, v}; }
    static SpeedModel uniform_range(double lo, double hi) { return SpeedModel{lo, hi}; }

    bool is_constant() const { return min_speed == max_speed; }

    void validate() const {
        if (!(min_speed > 0.0) || !(max_speed >= min_speed))
            throw std::invalid_argument("speed model needs 0 < min_speed <= max_speed");
    }

    double sample(RandomStream& rng) const {
        return is_constant() ? min_speed : rng.uniform(min_speed, max_speed);
    }
};

// Pause-at-waypoint distribution. Zero pause is the default everywhere.
struct PauseModel {
    enum class Kind { none, fixed, exponential };
    Kind kind = Kind::none;
    double value = 0.0; // seconds (fixed) or mean seconds (exponential)

    static PauseModel none() { return PauseModel{}; }
    static PauseModel fixed(double seconds) { return PauseModel{Kind::fixed, seconds}; }
    static PauseModel exponential_mean(double mean) {
        return PauseModel{Kind::exponential, mean};
    }

    void validate() const {
        if (kind != Kind::none && !(value >= 0.0))
            throw std::invalid_argument("pause must be >= 0");
    }

    double sample(RandomStream& rng) const {
        switch (kind) {
        case Kind::none: return 0.0;
        case Kind::fixed: return value;
        case Kind::exponential: return value > 0.0 ? rng.exponential(1.0 / value) : 0.0;
        }
        return 0.0;
    }
};

// Leg-duration distribution for random direction.
struct TravelTimeModel {
    enum class Kind { fixed, exponential };
    Kind kind = Kind::exponential;
    double value = 0.0; // seconds (fixed) or mean seconds (exponential)

    static TravelTimeModel fixed(double seconds) { return TravelTimeModel{Kind::fixed, seconds}; }
    static TravelTimeModel exponential_mean(double mean) {
        return TravelTimeModel{Kind::exponential, mean};
    }

    void validate() const {
        if (!(value > 0.0))
            throw std::invalid_argument("travel time must be > 0");
    }

    double sample(RandomStream& rng) const {
        return kind == Kind::fixed ? value : rng.exponential(1.0 / value);
    }
};

enum class Boundary { reflect, wrap };

struct Waypoint {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
};

// Per-node piecewise-linear trajectories. Motion is linear at constant speed
// between consecutive waypoints; a pause is a zero-displacement span. Two
// consecutive waypoints with equal time encode a wrap-around jump, the one
// discontinuity the wrap boundary needs; all other spans have strictly
// increasing times.
struct Trace {
    double side_length = 0.0;
    double horizon = 0.0;
    std::vector<std::vector<Waypoint>> nodes;

    int node_count() const { return static_cast<int>(nodes.size()); }

    void validate() const {
        if (!(side_length > 0.0) || !(horizon > 0.0))
            throw std::invalid_argument("trace needs positive side_length and horizon");
        for (const auto& wps : nodes) {
            if (wps.size() < 2)
                throw std::invalid_argument("each node needs at least two waypoints");
            if (wps.front().t != 0.0 || wps.back().t != horizon)
                throw std::invalid_argument("node waypoints must span [0, horizon]");
            double prev = -1.0;
            for (const Waypoint& w : wps) {
                if (w.t < prev)
                    throw std::invalid_argument("waypoint times must be non-decreasing");
                if (w.x < 0.0 || w.x > side_length || w.y < 0.0 || w.y > side_length)
                    throw std::invalid_argument("waypoint outside the region");
                prev = w.t;
            }
        }
    }

    // Interpolated position of one node; jumps resolve to the post-jump side.
    Waypoint position_at(int node, double t) const {
        const auto& wps = nodes[static_cast<std::size_t>(node)];
        std::size_t lo = 0, hi = wps.size() - 1;
        while (lo + 1 < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (wps[mid].t <= t)
                lo = mid;
            else
                hi = mid;
        }
        const Waypoint& a = wps[lo];
        const Waypoint& b = wps[hi];
        if (b.t == a.t)
            return Waypoint{t, b.x, b.y};
        const double u = (t - a.t) / (b.t - a.t);
        return Waypoint{t, a.x + u * (b.x - a.x), a.y + u * (b.y - a.y)};
    }
};

namespace detail {

inline void emit_waypoint(std::vector<Waypoint>& out, double t, double x, double y) {
    if (!out.empty() && out.back().t == t && out.back().x == x && out.back().y == y)
        return;
    out.push_back(Waypoint{t, x, y});
}

} // namespace detail

// Advances one constant-velocity leg through the region boundary, appending
// a waypoint at every boundary interaction and at the leg end. Reflection
// folds the velocity; wrap emits an equal-time jump to the opposite side.
inline void advance_leg(std::vector<Waypoint>& out, double& t, double& x, double& y,
                        double vx, double vy, double duration, double side,
                        Boundary boundary) {
    double remaining = duration;
    while (remaining > 0.0) {
        const double dt_x = vx > 0.0 ? (side - x) / vx : (vx < 0.0 ? -x / vx : remaining + 1.0);
        const double dt_y = vy > 0.0 ? (side - y) / vy : (vy < 0.0 ? -y / vy : remaining + 1.0);
        const double dt_hit = std::min(dt_x, dt_y);
        if (dt_hit >= remaining) {
            t += remaining;
            x = std::clamp(x + vx * remaining, 0.0, side);
            y = std::clamp(y + vy * remaining, 0.0, side);
            detail::emit_waypoint(out, t, x, y);
            return;
        }
        t += dt_hit;
        x += vx * dt_hit;
        y += vy * dt_hit;
        // Clamp the hit coordinate exactly onto the boundary.
        const bool hit_x = dt_x <= dt_y;
        const bool hit_y = dt_y <= dt_x;
        if (hit_x) x = vx > 0.0 ? side : 0.0;
        if (hit_y) y = vy > 0.0 ? side : 0.0;
        detail::emit_waypoint(out, t, x, y);
        if (boundary == Boundary::reflect) {
            if (hit_x) vx = -vx;
            if (hit_y) vy = -vy;
        } else {
            if (hit_x) x = vx > 0.0 ? 0.0 : side;
            if (hit_y) y = vy > 0.0 ? 0.0 : side;
            out.push_back(Waypoint{t, x, y}); // jump to the opposite side
        }
        remaining -= dt_hit;
    }
}

// Random waypoint: repeatedly pick a uniform destination and a per-leg
// speed, travel in a straight line, optionally pause on arrival.
inline Trace generate_rwp(const NetworkParams& params, const SpeedModel& speed,
                          const PauseModel& pause, double horizon, std::uint64_t seed) {
    if (params.node_count < 1)
        throw std::invalid_argument("need at least one node");
    if (!(params.side_length > 0.0))
        throw std::invalid_argument("side_length must be > 0");
    speed.validate();
    pause.validate();
    if (!(horizon > 0.0))
        throw std::invalid_argument("horizon must be > 0");

    const double side = params.side_length;
    Trace trace;
    trace.side_length = side;
    trace.horizon = horizon;
    trace.nodes.resize(static_cast<std::size_t>(params.node_count));

    for (int node = 0; node < params.node_count; ++node) {
        RandomStream rng(derive_seed(seed, stream_kind::trace_node, static_cast<std::uint64_t>(node)));
        auto& wps = trace.nodes[static_cast<std::size_t>(node)];
        double x = rng.uniform01() * side;
        double y = rng.uniform01() * side;
        double t = 0.0;
        wps.push_back(Waypoint{0.0, x, y});
        while (t < horizon) {
            const double dest_x = rng.uniform01() * side;
            const double dest_y = rng.uniform01() * side;
            const double dist = std::hypot(dest_x - x, dest_y - y);
            if (dist == 0.0)
                continue;
            const double v = speed.sample(rng);
            const double leg = dist / v;
            if (t + leg >= horizon) {
                const double u = (horizon - t) / leg;
                x += u * (dest_x - x);
                y += u * (dest_y - y);
                t = horizon;
                detail::emit_waypoint(wps, t, x, y);
                break;
            }
            t += leg;
            x = dest_x;
            y = dest_y;
            detail::emit_waypoint(wps, t, x, y);
            const double p = pause.sample(rng);
            if (p > 0.0) {
                t = std::min(t + p, horizon);
                detail::emit_waypoint(wps, t, x, y);
                if (t >= horizon)
                    break;
            }
        }
    }
    return trace;
}

// Random direction: repeatedly pick a uniform direction, a speed and a leg
// duration; boundary handling is reflect or wrap-around.
inline Trace generate_rd(const NetworkParams& params, const SpeedModel& speed,
                         const PauseModel& pause, const TravelTimeModel& travel,
                         Boundary boundary, double horizon, std::uint64_t seed) {
    if (params.node_count < 1)
        throw std::invalid_argument("need at least one node");
    if (!(params.side_length > 0.0))
        throw std::invalid_argument("side_length must be > 0");
    speed.validate();
    pause.validate();
    travel.validate();
    if (!(horizon > 0.0))
        throw std::invalid_argument("horizon must be > 0");

    const double side = params.side_length;
    Trace trace;
    trace.side_length = side;
    trace.horizon = horizon;
    trace.nodes.resize(static_cast<std::size_t>(params.node_count));

    for (int node = 0; node < params.node_count; ++node) {
        RandomStream rng(derive_seed(seed, stream_kind::trace_node, static_cast<std::uint64_t>(node)));
        auto& wps = trace.nodes[static_cast<std::size_t>(node)];
        double x = rng.uniform01() * side;
        double y = rng.uniform01() * side;
        double t = 0.0;
        wps.push_back(Waypoint{0.0, x, y});
        while (t < horizon) {
            const double angle = rng.uniform01() * 2.0 * std::numbers::pi;
            const double v = speed.sample(rng);
            const double duration = std::min(travel.sample(rng), horizon - t);
            if (duration > 0.0)
                advance_leg(wps, t, x, y, v * std::cos(angle), v * std::sin(angle),
                            duration, side, boundary);
            if (t >= horizon)
                break;
            const double p = pause.sample(rng);
            if (p > 0.0) {
                t = std::min(t + p, horizon);
                detail::emit_waypoint(wps, t, x, y);
            }
        }
        // Leg times accumulate in pieces; pin the final waypoint to the
        // horizon exactly.
        if (wps.back().t > horizon)
            wps.back().t = horizon;
        else if (wps.back().t < horizon)
            detail::emit_waypoint(wps, horizon, x, y);
    }
    return trace;
}

// Mean relative speed E|V1 - V2| for two nodes with independent uniform
// directions and speeds from the model, by deterministic nested quadrature
// over (angle, v1, v2).
inline RelativeSpeed expected_relative_speed(const SpeedModel& speed) {
    speed.validate();
    const double pi = std::numbers::pi;

    // Mean over the relative direction for fixed speeds. The integrand is
    // sqrt(v1^2 + v2^2 - 2 v1 v2 cos(angle)), symmetric about pi.
    auto angle_mean = [&](double v1, double v2) {
        const double a = v1 * v1 + v2 * v2;
        const double b = 2.0 * v1 * v2;
        const double scale = (v1 + v2) * pi;
        return adaptive_simpson(
                   [&](double th) { return std::sqrt(std::max(0.0, a - b * std::cos(th))); },
                   0.0, pi, 1e-10 * std::max(scale, 1e-300)) /
               pi;
    };

    if (speed.is_constant())
        return RelativeSpeed{angle_mean(speed.min_speed, speed.min_speed)};

    const double lo = speed.min_speed;
    const double hi = speed.max_speed;
    const double width = hi - lo;
    const double scale = hi * width * width;
    auto inner = [&](double v1) {
        return adaptive_simpson([&](double v2) { return angle_mean(v1, v2); }, lo, hi,
                                1e-8 * scale);
    };
    const double integral = adaptive_simpson(inner, lo, hi, 1e-8 * scale);
    return RelativeSpeed{integral / (width * width)};
}

// Empirical per-pair meeting rate from a schedule: 2|events| / (n(n-1) T).
struct BetaEstimate {
    double value = 0.0;
    std::size_t event_count = 0;
    bool low_sample = false; // no events observed; the estimate is vacuous
};

inline BetaEstimate estimate_beta(const MeetingSchedule& schedule) {
    if (schedule.node_count < 2)
        throw std::invalid_argument("estimate_beta needs at least one pair");
    if (!(schedule.horizon > 0.0))
        throw std::invalid_argument("estimate_beta needs a positive horizon");
    BetaEstimate est;
    est.event_count = schedule.events.size();
    est.low_sample = est.event_count == 0;
    est.value = static_cast<double>(est.event_count) /
                (static_cast<double>(pair_count(schedule.node_count)) * schedule.horizon);
    return est;
}

// ---------------------------------------------------------------------------
// Trace text format:
//   icmn-trace v1 n=<n> L=<L> horizon=<T>
//   <node> <t> <x> <y>

inline void write_trace(std::ostream& os, const Trace& trace) {
    std::string buf;
    buf.reserve(1 << 16);
    buf += "icmn-trace v1 n=";
    detail::append_int(buf, trace.node_count());
    buf += " L=";
    detail::append_double(buf, trace.side_length);
    buf += " horizon=";
    detail::append_double(buf, trace.horizon);
    buf += '\n';
    for (int node = 0; node < trace.node_count(); ++node) {
        for (const Waypoint& w : trace.nodes[static_cast<std::size_t>(node)]) {
            detail::append_int(buf, node);
            buf += ' ';
            detail::append_double(buf, w.t);
            buf += ' ';
            detail::append_double(buf, w.x);
            buf += ' ';
            detail::append_double(buf, w.y);
            buf += '\n';
            if (buf.size() > (1 << 16) - 160) {
                os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
                buf.clear();
            }
        }
    }
    os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

inline void write_trace_file(const std::filesystem::path& path, const Trace& trace) {
    std::ofstream os(path);
    if (!os)
        throw io_error("cannot open for writing: " + path.string());
    write_trace(os, trace);
    os.flush();
    if (!os)
        throw io_error("write failed: " + path.string());
}

inline Trace read_trace(std::istream& is, const std::string& source = "<stream>") {
    std::string line;
    if (!std::getline(is, line))
        throw parse_error(source, 1, "missing header");
    std::string_view rest(line);
    if (detail::next_token(rest) != "icmn-trace" || detail::next_token(rest) != "v1")
        throw parse_error(source, 1, "expected 'icmn-trace v1' header");

    int n = 0;
    Trace trace;
    auto n_tok = detail::keyed_value(detail::next_token(rest), "n");
    auto l_tok = detail::keyed_value(detail::next_token(rest), "L");
    auto h_tok = detail::keyed_value(detail::next_token(rest), "horizon");
    if (!detail::parse_int(n_tok, n) || !detail::parse_double(l_tok, trace.side_length) ||
        !detail::parse_double(h_tok, trace.horizon) || n < 1)
        throw parse_error(source, 1, "malformed header fields (need n= L= horizon=)");
    trace.nodes.resize(static_cast<std::size_t>(n));

    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty())
            continue;
        std::string_view fields(line);
        int node = -1;
        Waypoint w;
        if (!detail::parse_int(detail::next_token(fields), node) ||
            !detail::parse_double(detail::next_token(fields), w.t) ||
            !detail::parse_double(detail::next_token(fields), w.x) ||
            !detail::parse_double(detail::next_token(fields), w.y))
            throw parse_error(source, line_no, "expected '<node> <t> <x> <y>'");
        if (!detail::next_token(fields).empty())
            throw parse_error(source, line_no, "trailing fields after y");
        if (node < 0 || node >= n)
            throw parse_error(source, line_no, "node id out of range");
        trace.nodes[static_cast<std::size_t>(node)].push_back(w);
    }
    try {
        trace.validate();
    } catch (const std::invalid_argument& ex) {
        throw parse_error(source, line_no, ex.what());
    }
    return trace;
}

inline Trace read_trace_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is)
        throw io_error("cannot open for reading: " + path.string());
    return read_trace(is, path.string());
}

} // namespace icmn
