// Pairwise meeting processes. Every unordered node pair meets according to
// an independent homogeneous Poisson process; a schedule is the merged,
// time-ordered stream of those meetings, each carrying a fair-coin choice
// of transmitter. The same schedule type is produced by geometric trace
// extraction, so the routing simulator never cares where meetings came from.
#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "icmn/errors.hpp"
#include "icmn/random.hpp"

namespace icmn {

struct NetworkParams {
    int node_count = 0;        // n
    double side_length = 1.0;  // L, meters
    double tx_range = 0.01;    // d, meters
    double meeting_rate = 0.0; // beta, per second for one unordered pair

    // Full model validity: relaying needs n >= 3, and the contact range must
    // sit inside the region.
    void validate() const {
        if (node_count < 3)
            throw std::invalid_argument("node_count must be >= 3 (two-hop relaying needs at least one relay)");
        if (!(meeting_rate > 0.0))
            throw std::invalid_argument("meeting_rate must be > 0");
        validate_geometry();
    }

    void validate_geometry() const {
        if (!(side_length > 0.0))
            throw std::invalid_argument("side_length must be > 0");
        if (!(tx_range > 0.0) || !(tx_range < side_length))
            throw std::invalid_argument("tx_range must satisfy 0 < tx_range < side_length");
    }

    // Convenience for meeting-rate-only workflows where the geometry is
    // irrelevant (Poisson schedule generation, pure queueing analysis).
    static NetworkParams poisson(int n, double beta) {
        return NetworkParams{n, 1.0, 0.01, beta};
    }
};

struct MeetingEvent {
    double time = 0.0;
    int node_a = -1;     // node_a < node_b
    int node_b = -1;
    int transmitter = -1; // one of node_a, node_b
    std::uint64_t seq = 0;

    int receiver() const { return transmitter == node_a ? node_b : node_a; }
};

struct MeetingSchedule {
    int node_count = 0;
    double horizon = 0.0;
    std::uint64_t seed = 0;
    std::vector<MeetingEvent> events;

    void validate() const {
        if (node_count < 2)
            throw std::invalid_argument("schedule needs at least two nodes");
        if (!(horizon > 0.0))
            throw std::invalid_argument("schedule horizon must be > 0");
        double prev = 0.0;
        for (const MeetingEvent& e : events) {
            if (e.time < prev || e.time > horizon)
                throw std::invalid_argument("schedule events must be time-ordered within [0, horizon]");
            if (e.node_a < 0 || e.node_b >= node_count || e.node_a >= e.node_b)
                throw std::invalid_argument("schedule event has an invalid node pair");
            if (e.transmitter != e.node_a && e.transmitter != e.node_b)
                throw std::invalid_argument("schedule event transmitter is not in its pair");
            prev = e.time;
        }
    }
};

// Number of unordered pairs.
inline std::int64_t pair_count(int n) {
    return static_cast<std::int64_t>(n) * (n - 1) / 2;
}

// One inter-meeting time draw: exponential with mean 1/rate.
inline double sample_inter_meeting(double rate, RandomStream& rng) {
    if (!(rate > 0.0))
        throw std::invalid_argument("meeting rate must be > 0");
    return rng.exponential(rate);
}

// Combined meeting rate across all pairs, n(n-1)/2 * beta. Accepts n >= 2;
// a single pair is a valid meeting process even though routing needs more.
inline double total_meeting_rate(const NetworkParams& params) {
    if (params.node_count < 2)
        throw std::invalid_argument("total_meeting_rate needs at least one pair");
    if (!(params.meeting_rate > 0.0))
        throw std::invalid_argument("meeting_rate must be > 0");
    return static_cast<double>(pair_count(params.node_count)) * params.meeting_rate;
}

namespace stream_kind {
// Substream tags so independent random uses never collide.
inline constexpr std::uint64_t pair_meetings = 1;
inline constexpr std::uint64_t trace_node = 2;
inline constexpr std::uint64_t extract_pair = 3;
inline constexpr std::uint64_t arrivals = 4;
inline constexpr std::uint64_t routing_coin = 5;
inline constexpr std::uint64_t derangement = 6;
} // namespace stream_kind

// Draws every pair's Poisson process on [0, horizon] and merges them into
// one time-ordered stream. Each pair consumes its own substream, so the
// schedule is reproducible and per-pair sequences are independent.
inline MeetingSchedule generate_schedule(const NetworkParams& params, double horizon,
                                         std::uint64_t seed) {
    params.validate();
    if (!(horizon > 0.0))
        throw std::invalid_argument("horizon must be > 0");

    const int n = params.node_count;
    const double beta = params.meeting_rate;

    struct PairState {
        double next_time;
        int node_a;
        int node_b;
        RandomStream rng;
    };
    std::vector<PairState> pairs;
    pairs.reserve(static_cast<std::size_t>(pair_count(n)));
    std::uint64_t pair_idx = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j, ++pair_idx) {
            RandomStream rng(derive_seed(seed, stream_kind::pair_meetings, pair_idx));
            const double first = rng.exponential(beta);
            pairs.push_back(PairState{first, i, j, std::move(rng)});
        }
    }

    // Min-heap over (next_time, pair index); the index breaks exact ties
    // deterministically.
    using HeapItem = std::pair<double, std::uint32_t>;
    std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<HeapItem>> heap;
    for (std::uint32_t k = 0; k < pairs.size(); ++k)
        if (pairs[k].next_time <= horizon)
            heap.emplace(pairs[k].next_time, k);

    MeetingSchedule schedule;
    schedule.node_count = n;
    schedule.horizon = horizon;
    schedule.seed = seed;
    schedule.events.reserve(static_cast<std::size_t>(
        static_cast<double>(pair_count(n)) * beta * horizon * 1.05) + 64);

    while (!heap.empty()) {
        const auto [t, k] = heap.top();
        heap.pop();
        PairState& p = pairs[k];
        MeetingEvent e;
        e.time = t;
        e.node_a = p.node_a;
        e.node_b = p.node_b;
        e.transmitter = p.rng.coin() ? p.node_a : p.node_b;
        e.seq = schedule.events.size();
        schedule.events.push_back(e);
        p.next_time = t + p.rng.exponential(beta);
        if (p.next_time <= horizon)
            heap.emplace(p.next_time, k);
    }
    return schedule;
}

// ---------------------------------------------------------------------------
// Text format:
//   icmn-meetings v1 n=<n> horizon=<T> seed=<s>
//   <time> <i> <j> <transmitter>
// Times are written with 17 significant digits so a round trip is exact.

namespace detail {

inline void append_double(std::string& out, double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    out.append(buf, res.ptr);
}

inline void append_u64(std::string& out, std::uint64_t v) {
    char buf[24];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

inline void append_int(std::string& out, long long v) {
    char buf[24];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

// Strict field scanners for the line-oriented formats. Each consumes one
// token and the separating whitespace.
inline std::string_view next_token(std::string_view& rest) {
    std::size_t b = 0;
    while (b < rest.size() && (rest[b] == ' ' || rest[b] == '\t')) ++b;
    std::size_t e = b;
    while (e < rest.size() && rest[e] != ' ' && rest[e] != '\t') ++e;
    std::string_view tok = rest.substr(b, e - b);
    rest.remove_prefix(e);
    return tok;
}

inline bool parse_double(std::string_view tok, double& out) {
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last;
}

inline bool parse_int(std::string_view tok, int& out) {
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last;
}

inline bool parse_u64(std::string_view tok, std::uint64_t& out) {
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last;
}

// Parses "key=<value>" returning the value part, or empty on mismatch.
inline std::string_view keyed_value(std::string_view tok, std::string_view key) {
    if (tok.size() <= key.size() + 1 || tok.substr(0, key.size()) != key ||
        tok[key.size()] != '=')
        return {};
    return tok.substr(key.size() + 1);
}

} // namespace detail

inline void write_schedule(std::ostream& os, const MeetingSchedule& schedule) {
    std::string buf;
    buf.reserve(1 << 16);
    buf += "icmn-meetings v1 n=";
    detail::append_int(buf, schedule.node_count);
    buf += " horizon=";
    detail::append_double(buf, schedule.horizon);
    buf += " seed=";
    detail::append_u64(buf, schedule.seed);
    buf += '\n';
    for (const MeetingEvent& e : schedule.events) {
        detail::append_double(buf, e.time);
        buf += ' ';
        detail::append_int(buf, e.node_a);
        buf += ' ';
        detail::append_int(buf, e.node_b);
        buf += ' ';
        detail::append_int(buf, e.transmitter);
        buf += '\n';
        if (buf.size() > (1 << 16) - 128) {
            os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
            buf.clear();
        }
    }
    os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

inline void write_schedule_file(const std::filesystem::path& path,
                                const MeetingSchedule& schedule) {
    std::ofstream os(path);
    if (!os)
        throw io_error("cannot open for writing: " + path.string());
    write_schedule(os, schedule);
    os.flush();
    if (!os)
        throw io_error("write failed: " + path.string());
}

inline MeetingSchedule read_schedule(std::istream& is, const std::string& source = "<stream>") {
    std::string line;
    if (!std::getline(is, line))
        throw parse_error(source, 1, "missing header");
    std::string_view rest(line);
    if (detail::next_token(rest) != "icmn-meetings" || detail::next_token(rest) != "v1")
        throw parse_error(source, 1, "expected 'icmn-meetings v1' header");

    MeetingSchedule schedule;
    auto n_tok = detail::keyed_value(detail::next_token(rest), "n");
    auto h_tok = detail::keyed_value(detail::next_token(rest), "horizon");
    auto s_tok = detail::keyed_value(detail::next_token(rest), "seed");
    if (!detail::parse_int(n_tok, schedule.node_count) ||
        !detail::parse_double(h_tok, schedule.horizon) ||
        !detail::parse_u64(s_tok, schedule.seed))
        throw parse_error(source, 1, "malformed header fields (need n= horizon= seed=)");

    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty())
            continue;
        std::string_view fields(line);
        MeetingEvent e;
        if (!detail::parse_double(detail::next_token(fields), e.time) ||
            !detail::parse_int(detail::next_token(fields), e.node_a) ||
            !detail::parse_int(detail::next_token(fields), e.node_b) ||
            !detail::parse_int(detail::next_token(fields), e.transmitter))
            throw parse_error(source, line_no, "expected '<time> <i> <j> <transmitter>'");
        if (!detail::next_token(fields).empty())
            throw parse_error(source, line_no, "trailing fields after transmitter");
        e.seq = schedule.events.size();
        schedule.events.push_back(e);
    }
    try {
        schedule.validate();
    } catch (const std::invalid_argument& ex) {
        throw parse_error(source, line_no, ex.what());
    }
    return schedule;
}

inline MeetingSchedule read_schedule_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is)
        throw io_error("cannot open for reading: " + path.string());
    return read_schedule(is, path.string());
}

} // namespace icmn
