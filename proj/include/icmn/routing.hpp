// Two-hop relay routing over a meeting schedule. Each node keeps one FIFO
// source queue and one FIFO relay queue per foreign flow. On a meeting the
// transmitter either serves its own flow (receiver is its destination) or
// flips a fair coin between handing a packet to the receiver as a relay and
// delivering a relayed packet the receiver is waiting for. At most one
// packet moves per meeting and no packet ever travels more than two hops.
#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <queue>
#include <stdexcept>
#include <vector>

#include "icmn/meeting.hpp"
#include "icmn/random.hpp"

namespace icmn {

struct TrafficParams {
    double arrival_rate = 0.0;    // lambda, packets/second at each source
    std::vector<int> destination; // flow i is sourced at node i, destined to destination[i]
    std::uint64_t seed = 0;

    void validate(int node_count) const {
        if (!(arrival_rate > 0.0))
            throw std::invalid_argument("arrival_rate must be > 0");
        if (static_cast<int>(destination.size()) != node_count)
            throw std::invalid_argument("destination map size must equal node count");
        std::vector<char> seen(destination.size(), 0);
        for (int i = 0; i < node_count; ++i) {
            const int d = destination[static_cast<std::size_t>(i)];
            if (d < 0 || d >= node_count)
                throw std::invalid_argument("destination out of range");
            if (d == i)
                throw std::invalid_argument("destination map has a fixed point");
            if (seen[static_cast<std::size_t>(d)]++)
                throw std::invalid_argument("destination map is not a bijection");
        }
    }
};

// Uniform random derangement by rejection: draw uniform permutations until
// one has no fixed point (acceptance probability tends to 1/e).
inline std::vector<int> sample_derangement(int n, std::uint64_t seed) {
    if (n < 2)
        throw std::invalid_argument("a derangement needs n >= 2");
    RandomStream rng(derive_seed(seed, stream_kind::derangement));
    std::vector<int> perm(static_cast<std::size_t>(n));
    while (true) {
        for (int i = 0; i < n; ++i)
            perm[static_cast<std::size_t>(i)] = i;
        for (int i = n - 1; i > 0; --i) {
            const auto j = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i) + 1));
            std::swap(perm[static_cast<std::size_t>(i)], perm[j]);
        }
        bool fixed = false;
        for (int i = 0; i < n && !fixed; ++i)
            fixed = perm[static_cast<std::size_t>(i)] == i;
        if (!fixed)
            return perm;
    }
}

enum class MeetingOutcome { source_to_destination, source_to_relay, relay_to_destination, idle };

struct PacketRecord {
    std::uint64_t id = 0;
    int flow = -1;
    double created_at = 0.0;
    double delivered_at = -1.0;
    int hops = 0; // 0 while undelivered
    int relay = -1;
    double relayed_at = -1.0;

    bool delivered() const { return hops > 0; }
};

struct SimOptions {
    double warmup = -1.0;        // seconds; < 0 means 10% of the horizon
    bool record_packets = false; // keep one PacketRecord per generated packet
};

struct SimulationStats {
    int node_count = 0;
    double horizon = 0.0;
    double warmup_end = 0.0;

    std::uint64_t generated = 0;
    std::vector<std::uint64_t> generated_per_flow;
    std::vector<std::uint64_t> delivered_per_flow;
    std::vector<std::uint64_t> delivered_in_window_per_flow; // delivered after warmup

    // End-to-end delays of packets created after warmup_end.
    std::vector<double> delays;
    std::uint64_t one_hop_deliveries = 0;
    std::uint64_t two_hop_deliveries = 0;

    // Meeting outcome counters; their sum is the total meeting count Y(T).
    std::uint64_t sd_transmissions = 0;
    std::uint64_t sr_transmissions = 0;
    std::uint64_t rd_transmissions = 0;
    std::uint64_t idle_meetings = 0;

    // Per-node service-opportunity counts for the transmitter role: meetings
    // where the node could serve its source queue (own destination met, or a
    // relay met with a heads coin), regardless of queue contents.
    std::vector<std::uint64_t> service_opportunities;
    std::vector<std::uint64_t> sd_opportunities;
    std::vector<std::uint64_t> sr_opportunities;

    // relay_entries[r][f]: packets of flow f handed to relay r.
    std::vector<std::vector<std::uint64_t>> relay_entries;

    // Time-averaged total queued packets over each quarter of the horizon.
    std::array<double, 4> mean_queue_by_quarter{};

    std::vector<std::uint64_t> source_queue_len_end;
    std::uint64_t in_source_queues_end = 0;
    std::uint64_t in_relay_queues_end = 0;

    std::vector<PacketRecord> packets; // populated when record_packets

    std::uint64_t total_meetings() const {
        return sd_transmissions + sr_transmissions + rd_transmissions + idle_meetings;
    }
    std::uint64_t delivered_total() const {
        std::uint64_t s = 0;
        for (auto d : delivered_per_flow) s += d;
        return s;
    }
    double mean_delay() const {
        if (delays.empty())
            throw std::invalid_argument("no delay samples recorded");
        double s = 0.0;
        for (double d : delays) s += d;
        return s / static_cast<double>(delays.size());
    }
};

// Delivery rate of one flow over the post-warmup window.
inline double measured_throughput(const SimulationStats& stats, int flow = 0) {
    const double window = stats.horizon - stats.warmup_end;
    if (!(window > 0.0))
        throw std::invalid_argument("measurement window must be > 0");
    if (flow < 0 || flow >= stats.node_count)
        throw std::invalid_argument("flow out of range");
    return static_cast<double>(stats.delivered_in_window_per_flow[static_cast<std::size_t>(flow)]) /
           window;
}

// The simulator. Tests drive handle_meeting directly; simulate() below runs
// a whole schedule with Poisson arrivals merged in.
class TwoHopSimulator {
public:
    TwoHopSimulator(const NetworkParams& params, const TrafficParams& traffic,
                    double horizon, SimOptions options = {})
        : n_(params.node_count),
          traffic_(traffic),
          horizon_(horizon),
          options_(options),
          coin_(derive_seed(traffic.seed, stream_kind::routing_coin)) {
        params.validate();
        traffic_.validate(n_);
        if (!(horizon > 0.0))
            throw std::invalid_argument("horizon must be > 0");
        if (options_.warmup < 0.0)
            options_.warmup = 0.1 * horizon;
        if (options_.warmup >= horizon)
            throw std::invalid_argument("warmup must be earlier than the horizon");

        source_of_flow_to_.assign(static_cast<std::size_t>(n_), -1);
        for (int i = 0; i < n_; ++i)
            source_of_flow_to_[static_cast<std::size_t>(traffic_.destination[static_cast<std::size_t>(i)])] = i;

        source_queues_.resize(static_cast<std::size_t>(n_));
        relay_queues_.resize(static_cast<std::size_t>(n_));
        for (auto& per_flow : relay_queues_)
            per_flow.resize(static_cast<std::size_t>(n_));

        stats_.node_count = n_;
        stats_.horizon = horizon_;
        stats_.warmup_end = options_.warmup;
        stats_.generated_per_flow.assign(static_cast<std::size_t>(n_), 0);
        stats_.delivered_per_flow.assign(static_cast<std::size_t>(n_), 0);
        stats_.delivered_in_window_per_flow.assign(static_cast<std::size_t>(n_), 0);
        stats_.service_opportunities.assign(static_cast<std::size_t>(n_), 0);
        stats_.sd_opportunities.assign(static_cast<std::size_t>(n_), 0);
        stats_.sr_opportunities.assign(static_cast<std::size_t>(n_), 0);
        stats_.relay_entries.assign(static_cast<std::size_t>(n_),
                                    std::vector<std::uint64_t>(static_cast<std::size_t>(n_), 0));
    }

    // A new packet enters its source queue.
    void packet_arrival(int flow, double time) {
        advance_queue_integral(time);
        const std::uint64_t id = next_packet_id_++;
        source_queues_[static_cast<std::size_t>(flow)].push_back(Queued{id, time, 0.0});
        ++stats_.generated;
        ++stats_.generated_per_flow[static_cast<std::size_t>(flow)];
        ++total_queued_;
        if (options_.record_packets)
            stats_.packets.push_back(PacketRecord{id, flow, time});
    }

    // One meeting, exactly the two-hop branching.
    MeetingOutcome handle_meeting(const MeetingEvent& event) {
        advance_queue_integral(event.time);
        const int tx = event.transmitter;
        const int rx = event.receiver();
        auto& tx_source = source_queues_[static_cast<std::size_t>(tx)];

        if (traffic_.destination[static_cast<std::size_t>(tx)] == rx) {
            // Source-to-destination.
            ++stats_.service_opportunities[static_cast<std::size_t>(tx)];
            ++stats_.sd_opportunities[static_cast<std::size_t>(tx)];
            if (tx_source.empty()) {
                ++stats_.idle_meetings;
                return MeetingOutcome::idle;
            }
            const Queued p = tx_source.front();
            tx_source.pop_front();
            deliver(p, tx, event.time, 1);
            ++stats_.sd_transmissions;
            return MeetingOutcome::source_to_destination;
        }

        if (coin_.coin()) {
            // Source-to-relay: the head-of-line packet of tx's own flow moves
            // into rx's relay queue for that flow.
            ++stats_.service_opportunities[static_cast<std::size_t>(tx)];
            ++stats_.sr_opportunities[static_cast<std::size_t>(tx)];
            if (tx_source.empty()) {
                ++stats_.idle_meetings;
                return MeetingOutcome::idle;
            }
            Queued p = tx_source.front();
            tx_source.pop_front();
            p.relayed_at = event.time;
            relay_queues_[static_cast<std::size_t>(rx)][static_cast<std::size_t>(tx)].push_back(p);
            ++stats_.relay_entries[static_cast<std::size_t>(rx)][static_cast<std::size_t>(tx)];
            ++stats_.sr_transmissions;
            if (options_.record_packets) {
                PacketRecord& rec = stats_.packets[static_cast<std::size_t>(p.id)];
                rec.relay = rx;
                rec.relayed_at = event.time;
            }
            return MeetingOutcome::source_to_relay;
        }

        // Relay-to-destination: tx serves the flow whose destination is rx.
        const int flow = source_of_flow_to_[static_cast<std::size_t>(rx)];
        auto& queue = relay_queues_[static_cast<std::size_t>(tx)][static_cast<std::size_t>(flow)];
        if (queue.empty()) {
            ++stats_.idle_meetings;
            return MeetingOutcome::idle;
        }
        const Queued p = queue.front();
        queue.pop_front();
        deliver(p, flow, event.time, 2);
        ++stats_.rd_transmissions;
        return MeetingOutcome::relay_to_destination;
    }

    // Closes the books at the horizon and returns the statistics.
    SimulationStats finish() {
        advance_queue_integral(horizon_);
        for (int node = 0; node < n_; ++node) {
            stats_.source_queue_len_end.push_back(source_queues_[static_cast<std::size_t>(node)].size());
            stats_.in_source_queues_end += source_queues_[static_cast<std::size_t>(node)].size();
            for (const auto& q : relay_queues_[static_cast<std::size_t>(node)])
                stats_.in_relay_queues_end += q.size();
        }
        const double quarter = horizon_ / 4.0;
        for (int q = 0; q < 4; ++q)
            stats_.mean_queue_by_quarter[static_cast<std::size_t>(q)] = queue_time_[static_cast<std::size_t>(q)] / quarter;
        return std::move(stats_);
    }

    double warmup_end() const { return options_.warmup; }

private:
    struct Queued {
        std::uint64_t id;
        double created_at;
        double relayed_at;
    };

    void deliver(const Queued& p, int flow, double time, int hops) {
        ++stats_.delivered_per_flow[static_cast<std::size_t>(flow)];
        if (time > options_.warmup)
            ++stats_.delivered_in_window_per_flow[static_cast<std::size_t>(flow)];
        if (p.created_at > options_.warmup)
            stats_.delays.push_back(time - p.created_at);
        if (hops == 1)
            ++stats_.one_hop_deliveries;
        else
            ++stats_.two_hop_deliveries;
        --total_queued_;
        if (options_.record_packets) {
            PacketRecord& rec = stats_.packets[static_cast<std::size_t>(p.id)];
            rec.delivered_at = time;
            rec.hops = hops;
        }
    }

    // Accumulates total queued packets over time, split by horizon quarter.
    void advance_queue_integral(double t) {
        while (last_time_ < t) {
            const double quarter = horizon_ / 4.0;
            auto qi = static_cast<std::size_t>(std::min(3.0, last_time_ / quarter));
            const double q_end = std::min(t, quarter * static_cast<double>(qi + 1));
            queue_time_[qi] += static_cast<double>(total_queued_) * (q_end - last_time_);
            last_time_ = q_end;
        }
    }

    int n_;
    TrafficParams traffic_;
    double horizon_;
    SimOptions options_;
    RandomStream coin_;
    std::vector<int> source_of_flow_to_;
    std::vector<std::deque<Queued>> source_queues_;
    std::vector<std::vector<std::deque<Queued>>> relay_queues_; // [holder][flow]
    SimulationStats stats_;
    std::uint64_t next_packet_id_ = 0;
    std::uint64_t total_queued_ = 0;
    double last_time_ = 0.0;
    std::array<double, 4> queue_time_{};
};

// Runs the full simulation: per-node Poisson arrival streams merged with the
// meeting schedule in global time order. An arrival that coincides exactly
// with a meeting is processed first, so the packet is eligible for it.
inline SimulationStats simulate(const NetworkParams& params, const TrafficParams& traffic,
                                const MeetingSchedule& schedule, SimOptions options = {}) {
    if (schedule.node_count != params.node_count)
        throw std::invalid_argument("schedule and parameters disagree on the node count");

    TwoHopSimulator sim(params, traffic, schedule.horizon, options);

    // Per-node next-arrival times in a small min-heap.
    using Next = std::pair<double, int>;
    std::priority_queue<Next, std::vector<Next>, std::greater<Next>> arrivals;
    std::vector<RandomStream> streams;
    streams.reserve(static_cast<std::size_t>(params.node_count));
    for (int node = 0; node < params.node_count; ++node) {
        streams.emplace_back(derive_seed(traffic.seed, stream_kind::arrivals,
                                         static_cast<std::uint64_t>(node)));
        const double first = streams.back().exponential(traffic.arrival_rate);
        if (first <= schedule.horizon)
            arrivals.emplace(first, node);
    }
    auto drain_arrivals = [&](double until) {
        while (!arrivals.empty() && arrivals.top().first <= until) {
            const auto [t, node] = arrivals.top();
            arrivals.pop();
            sim.packet_arrival(node, t);
            const double next = t + streams[static_cast<std::size_t>(node)].exponential(traffic.arrival_rate);
            if (next <= schedule.horizon)
                arrivals.emplace(next, node);
        }
    };

    for (const MeetingEvent& event : schedule.events) {
        drain_arrivals(event.time);
        sim.handle_meeting(event);
    }
    drain_arrivals(schedule.horizon);
    return sim.finish();
}

} // namespace icmn
