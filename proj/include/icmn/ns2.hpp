// Importer for the ns-2 "setdest" movement-file subset:
//   $node_(<i>) set X_ <x>
//   $node_(<i>) set Y_ <y>
//   $ns_ at <t> "$node_(<i>) setdest <x> <y> <speed>"
// Blank lines are permitted; any other content is rejected with the line
// number. Commands replay into a piecewise-linear trace: a node moves toward
// its latest destination at the given speed, rests on arrival, and a later
// setdest may redirect it mid-flight.
#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "icmn/errors.hpp"
#include "icmn/mobility.hpp"

namespace icmn {

namespace detail {

struct SetdestCommand {
    double at = 0.0;
    double x = 0.0;
    double y = 0.0;
    double speed = 0.0;
    std::size_t line = 0;
};

struct Ns2Node {
    std::optional<double> x0;
    std::optional<double> y0;
    std::vector<SetdestCommand> commands;
};

inline bool consume_prefix(std::string_view& rest, std::string_view prefix) {
    if (rest.substr(0, prefix.size()) != prefix)
        return false;
    rest.remove_prefix(prefix.size());
    return true;
}

inline bool parse_node_ref(std::string_view& rest, int& node) {
    if (!consume_prefix(rest, "$node_("))
        return false;
    const std::size_t close = rest.find(')');
    if (close == std::string_view::npos || !parse_int(rest.substr(0, close), node) || node < 0)
        return false;
    rest.remove_prefix(close + 1);
    return true;
}

} // namespace detail

inline Trace import_ns2_movements(std::istream& is, double side_length,
                                  std::optional<double> horizon,
                                  const std::string& source = "<stream>") {
    if (!(side_length > 0.0))
        throw std::invalid_argument("side_length must be > 0");

    std::vector<detail::Ns2Node> nodes;
    auto node_at = [&](int id) -> detail::Ns2Node& {
        if (id >= static_cast<int>(nodes.size()))
            nodes.resize(static_cast<std::size_t>(id) + 1);
        return nodes[static_cast<std::size_t>(id)];
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        std::string_view rest(line);
        while (!rest.empty() && (rest.back() == '\r' || rest.back() == ' ' || rest.back() == '\t'))
            rest.remove_suffix(1);
        while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t'))
            rest.remove_prefix(1);
        if (rest.empty())
            continue;

        int node = -1;
        if (rest.substr(0, 7) == "$node_(") {
            // Initial position: $node_(<i>) set X_ <x>
            if (!detail::parse_node_ref(rest, node))
                throw parse_error(source, line_no, "malformed node reference");
            std::string_view set_tok = detail::next_token(rest);
            std::string_view axis = detail::next_token(rest);
            std::string_view value_tok = detail::next_token(rest);
            double value = 0.0;
            if (set_tok != "set" || (axis != "X_" && axis != "Y_") ||
                !detail::parse_double(value_tok, value) || !detail::next_token(rest).empty())
                throw parse_error(source, line_no,
                                  "expected '$node_(<i>) set X_ <x>' or '... set Y_ <y>'");
            auto& slot = axis == "X_" ? node_at(node).x0 : node_at(node).y0;
            if (slot)
                throw parse_error(source, line_no, "duplicate initial position");
            slot = value;
            continue;
        }
        if (rest.substr(0, 5) == "$ns_ ") {
            // $ns_ at <t> "$node_(<i>) setdest <x> <y> <speed>"
            rest.remove_prefix(5);
            std::string_view at_tok = detail::next_token(rest);
            detail::SetdestCommand cmd;
            cmd.line = line_no;
            if (at_tok != "at" || !detail::parse_double(detail::next_token(rest), cmd.at))
                throw parse_error(source, line_no, "expected '$ns_ at <t> \"...\"'");
            while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t'))
                rest.remove_prefix(1);
            if (rest.size() < 2 || rest.front() != '"' || rest.back() != '"')
                throw parse_error(source, line_no, "setdest command must be quoted");
            rest = rest.substr(1, rest.size() - 2);
            if (!detail::parse_node_ref(rest, node))
                throw parse_error(source, line_no, "malformed node reference in setdest");
            if (detail::next_token(rest) != "setdest" ||
                !detail::parse_double(detail::next_token(rest), cmd.x) ||
                !detail::parse_double(detail::next_token(rest), cmd.y) ||
                !detail::parse_double(detail::next_token(rest), cmd.speed) ||
                !detail::next_token(rest).empty())
                throw parse_error(source, line_no,
                                  "expected '$node_(<i>) setdest <x> <y> <speed>'");
            if (!(cmd.speed > 0.0))
                throw parse_error(source, line_no, "setdest speed must be > 0");
            if (cmd.at < 0.0)
                throw parse_error(source, line_no, "setdest time must be >= 0");
            node_at(node).commands.push_back(cmd);
            continue;
        }
        throw parse_error(source, line_no, "unrecognized directive");
    }

    if (nodes.empty())
        throw parse_error(source, line_no, "no nodes found");

    // Replay commands into waypoints.
    double last_motion_end = 0.0;
    struct Replay {
        std::vector<Waypoint> wps;
        double arrive_t = 0.0;
        double tx = 0.0, ty = 0.0; // target
    };
    std::vector<Replay> replays(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        detail::Ns2Node& nd = nodes[k];
        if (!nd.x0 || !nd.y0)
            throw parse_error(source, line_no,
                              "node " + std::to_string(k) + " has no initial position");
        std::stable_sort(nd.commands.begin(), nd.commands.end(),
                         [](const auto& a, const auto& b) { return a.at < b.at; });
        Replay& rp = replays[k];
        double x = *nd.x0, y = *nd.y0;
        rp.wps.push_back(Waypoint{0.0, x, y});
        rp.arrive_t = 0.0;
        rp.tx = x;
        rp.ty = y;
        for (const detail::SetdestCommand& cmd : nd.commands) {
            if (cmd.at < rp.arrive_t) {
                // Redirected mid-flight: waypoint at the interception point.
                const Waypoint& from = rp.wps.back();
                const double u = (cmd.at - from.t) / (rp.arrive_t - from.t);
                x = from.x + u * (rp.tx - from.x);
                y = from.y + u * (rp.ty - from.y);
                detail::emit_waypoint(rp.wps, cmd.at, x, y);
            } else {
                // Completed the previous leg, then rested until this command.
                if (rp.arrive_t > rp.wps.back().t)
                    detail::emit_waypoint(rp.wps, rp.arrive_t, rp.tx, rp.ty);
                x = rp.tx;
                y = rp.ty;
                if (cmd.at > rp.wps.back().t)
                    detail::emit_waypoint(rp.wps, cmd.at, x, y);
            }
            const double dist = std::hypot(cmd.x - x, cmd.y - y);
            rp.tx = cmd.x;
            rp.ty = cmd.y;
            rp.arrive_t = dist > 0.0 ? cmd.at + dist / cmd.speed : cmd.at;
            last_motion_end = std::max(last_motion_end, rp.arrive_t);
        }
    }

    const double end_time = horizon ? *horizon : last_motion_end;
    if (!(end_time > 0.0))
        throw parse_error(source, line_no, "movement ends at time 0; pass an explicit horizon");

    Trace trace;
    trace.side_length = side_length;
    trace.horizon = end_time;
    trace.nodes.resize(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        Replay& rp = replays[k];
        auto& wps = rp.wps;
        // Finish the last leg, then truncate or extend to the horizon.
        if (rp.arrive_t > wps.back().t)
            detail::emit_waypoint(wps, rp.arrive_t, rp.tx, rp.ty);
        if (wps.back().t > end_time) {
            std::size_t i = wps.size() - 1;
            while (i > 0 && wps[i - 1].t > end_time)
                --i;
            const Waypoint a = wps[i - 1];
            const Waypoint b = wps[i];
            const double u = (end_time - a.t) / (b.t - a.t);
            wps.resize(i);
            detail::emit_waypoint(wps, end_time, a.x + u * (b.x - a.x),
                                  a.y + u * (b.y - a.y));
        } else if (wps.back().t < end_time) {
            detail::emit_waypoint(wps, end_time, wps.back().x, wps.back().y);
        }
        trace.nodes[k] = std::move(wps);
    }
    try {
        trace.validate();
    } catch (const std::invalid_argument& ex) {
        throw parse_error(source, line_no, std::string("invalid movement: ") + ex.what());
    }
    return trace;
}

inline Trace import_ns2_movements_file(const std::filesystem::path& path, double side_length,
                                       std::optional<double> horizon = std::nullopt) {
    std::ifstream is(path);
    if (!is)
        throw io_error("cannot open for reading: " + path.string());
    return import_ns2_movements(is, side_length, horizon, path.string());
}

} // namespace icmn
