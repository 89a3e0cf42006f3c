// Command-line front end: schedule/trace generation, trace extraction and
// ns-2 import, single simulations, theory calculators, and config-driven
// sweeps. Exit codes: 0 success, 1 parameter/input errors, 2 I/O errors.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "icmn/analysis.hpp"
#include "icmn/experiment.hpp"
#include "icmn/extraction.hpp"
#include "icmn/meeting.hpp"
#include "icmn/mobility.hpp"
#include "icmn/ns2.hpp"
#include "icmn/routing.hpp"

namespace {

void print_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    std::cout << buf << "\n";
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

icmn::SpeedModel speed_from_flags(double v, double v_min, double v_max) {
    if (v > 0.0)
        return icmn::SpeedModel::constant(v);
    return icmn::SpeedModel::uniform_range(v_min, v_max);
}

void warn_if_large_range(double side, double range) {
    if (!icmn::small_range_regime(side, range))
        std::cerr << "warning: d/L = " << fmt(range / side)
                  << " exceeds 0.1; the meeting-rate approximation may be poor\n";
}

void write_stats_report(std::ostream& os, const icmn::SimulationStats& stats,
                        const icmn::TrafficParams& traffic, int flow) {
    auto kv = [&os](const char* k, const std::string& v) { os << k << " = " << v << "\n"; };
    kv("nodes", std::to_string(stats.node_count));
    kv("horizon", fmt(stats.horizon));
    kv("warmup", fmt(stats.warmup_end));
    kv("lambda", fmt(traffic.arrival_rate));
    kv("traffic_seed", std::to_string(traffic.seed));
    {
        std::string d;
        for (std::size_t i = 0; i < traffic.destination.size(); ++i) {
            if (i) d += ' ';
            d += std::to_string(traffic.destination[i]);
        }
        kv("destinations", d);
    }
    kv("flow", std::to_string(flow));
    kv("generated", std::to_string(stats.generated));
    kv("delivered", std::to_string(stats.delivered_total()));
    kv("delivered_flow", std::to_string(stats.delivered_per_flow[static_cast<std::size_t>(flow)]));
    kv("throughput_flow", fmt(icmn::measured_throughput(stats, flow)));
    kv("delay_samples", std::to_string(stats.delays.size()));
    kv("mean_delay", stats.delays.empty() ? "" : fmt(stats.mean_delay()));
    kv("one_hop_deliveries", std::to_string(stats.one_hop_deliveries));
    kv("two_hop_deliveries", std::to_string(stats.two_hop_deliveries));
    kv("sd_transmissions", std::to_string(stats.sd_transmissions));
    kv("sr_transmissions", std::to_string(stats.sr_transmissions));
    kv("rd_transmissions", std::to_string(stats.rd_transmissions));
    kv("idle_meetings", std::to_string(stats.idle_meetings));
    kv("total_meetings", std::to_string(stats.total_meetings()));
    kv("source_backlog_end", std::to_string(stats.in_source_queues_end));
    kv("relay_backlog_end", std::to_string(stats.in_relay_queues_end));
}

void write_packets_csv(const std::string& path, const icmn::SimulationStats& stats) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw icmn::io_error("cannot open for writing: " + path);
    os << "packet_id,flow,created_at,delivered_at,hops\n";
    for (const icmn::PacketRecord& p : stats.packets) {
        os << p.id << ',' << p.flow << ',' << fmt(p.created_at) << ',';
        if (p.delivered())
            os << fmt(p.delivered_at) << ',' << p.hops;
        else
            os << ',';
        os << '\n';
    }
    os.flush();
    if (!os)
        throw icmn::io_error("write failed: " + path);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Poisson-meeting mobile network simulator and analysis toolkit"};
    app.require_subcommand(1);

    // --- simulate ---------------------------------------------------------
    auto* sim_cmd = app.add_subcommand("simulate", "Run two-hop relay routing over a schedule file");
    std::string sim_schedule;
    double sim_lambda = 0.0, sim_rho = 0.0, sim_beta = 0.0, sim_warmup = -1.0;
    std::uint64_t sim_seed = 1;
    int sim_flow = 0;
    std::string sim_report, sim_packets;
    sim_cmd->add_option("--schedule", sim_schedule, "icmn-meetings v1 schedule file")->required();
    sim_cmd->add_option("--lambda", sim_lambda, "per-node packet arrival rate (packets/s)");
    sim_cmd->add_option("--rho", sim_rho, "system load; lambda = rho * n*beta/4");
    sim_cmd->add_option("--beta", sim_beta, "pairwise meeting rate backing --rho (default: estimated from the schedule)");
    sim_cmd->add_option("--warmup", sim_warmup, "measurement warmup in seconds (default: 10% of horizon)");
    sim_cmd->add_option("--seed", sim_seed, "traffic seed (arrivals, coin flips, destination map)");
    sim_cmd->add_option("--flow", sim_flow, "designated measurement flow");
    sim_cmd->add_option("--report", sim_report, "write the key-value report here instead of stdout");
    sim_cmd->add_option("--packets-csv", sim_packets, "also write a per-packet delay CSV");

    // --- sweep ------------------------------------------------------------
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a configured experiment sweep");
    std::string sweep_config, sweep_out_override;
    sweep_cmd->add_option("--config", sweep_config, "key = value experiment config file")->required();
    sweep_cmd->add_option("--output", sweep_out_override, "override the config's output directory");

    // --- trace ------------------------------------------------------------
    auto* trace_cmd = app.add_subcommand("trace", "Mobility trace operations");
    trace_cmd->require_subcommand(1);

    auto* gen_cmd = trace_cmd->add_subcommand("gen", "Generate a mobility trace");
    std::string gen_model, gen_out, gen_boundary = "reflect";
    int gen_n = 0;
    double gen_side = 0.0, gen_v = 0.0, gen_vmin = 0.0, gen_vmax = 0.0;
    double gen_pause = 0.0, gen_travel_mean = 50.0, gen_horizon = 0.0;
    std::uint64_t gen_seed = 1;
    gen_cmd->add_option("--model", gen_model, "rwp or rd")->required();
    gen_cmd->add_option("--n", gen_n, "node count")->required();
    gen_cmd->add_option("--L", gen_side, "region side length (m)")->required();
    gen_cmd->add_option("--v", gen_v, "constant speed (m/s)");
    gen_cmd->add_option("--vmin", gen_vmin, "minimum speed (m/s)");
    gen_cmd->add_option("--vmax", gen_vmax, "maximum speed (m/s)");
    gen_cmd->add_option("--pause", gen_pause, "fixed pause at each waypoint (s)");
    gen_cmd->add_option("--travel-mean", gen_travel_mean, "rd mean leg duration (s)");
    gen_cmd->add_option("--boundary", gen_boundary, "rd boundary: reflect or wrap");
    gen_cmd->add_option("--horizon", gen_horizon, "trace length (s)")->required();
    gen_cmd->add_option("--seed", gen_seed, "trace seed");
    gen_cmd->add_option("--out", gen_out, "output trace file")->required();

    auto* extract_cmd = trace_cmd->add_subcommand("extract", "Extract meetings from a trace");
    std::string ext_trace, ext_out;
    double ext_range = 0.0;
    std::uint64_t ext_seed = 0;
    extract_cmd->add_option("--trace", ext_trace, "icmn-trace v1 file")->required();
    extract_cmd->add_option("--d", ext_range, "transmission range (m)")->required();
    extract_cmd->add_option("--seed", ext_seed, "transmitter-coin seed");
    extract_cmd->add_option("--out", ext_out, "output schedule file")->required();

    auto* import_cmd = trace_cmd->add_subcommand("import-ns2", "Import an ns-2 setdest movement file");
    std::string imp_in, imp_out;
    double imp_side = 0.0, imp_horizon = 0.0;
    import_cmd->add_option("--in", imp_in, "ns-2 movement file")->required();
    import_cmd->add_option("--L", imp_side, "region side length (m)")->required();
    import_cmd->add_option("--horizon", imp_horizon, "truncate/extend to this horizon (s)");
    import_cmd->add_option("--out", imp_out, "output trace file")->required();

    // --- calc -------------------------------------------------------------
    auto* calc_cmd = app.add_subcommand("calc", "Closed-form calculators");
    calc_cmd->require_subcommand(1);
    int calc_n = 0;
    double calc_beta = 0.0, calc_lambda = 0.0, calc_rho = 0.0;
    double calc_side = 0.0, calc_range = 0.0, calc_v = 0.0, calc_vmin = 0.0, calc_vmax = 0.0,
           calc_ev = 0.0;
    std::string calc_model;

    auto* cap_cmd = calc_cmd->add_subcommand("capacity", "Per-flow throughput capacity n*beta/4");
    cap_cmd->add_option("--n", calc_n)->required();
    cap_cmd->add_option("--beta", calc_beta)->required();

    auto* delay_cmd = calc_cmd->add_subcommand("delay", "Expected end-to-end delay (n-1)/(mu-lambda)");
    delay_cmd->add_option("--n", calc_n)->required();
    delay_cmd->add_option("--beta", calc_beta)->required();
    delay_cmd->add_option("--lambda", calc_lambda);
    delay_cmd->add_option("--rho", calc_rho);

    auto* bound_cmd = calc_cmd->add_subcommand("bound", "Delay-throughput bound (1-ln2)/(2(n-1)beta^2)");
    bound_cmd->add_option("--n", calc_n)->required();
    bound_cmd->add_option("--beta", calc_beta)->required();

    auto* beta_cmd = calc_cmd->add_subcommand("beta", "Mobility-model pairwise meeting rate");
    beta_cmd->add_option("--model", calc_model, "rwp or rd")->required();
    beta_cmd->add_option("--L", calc_side)->required();
    beta_cmd->add_option("--d", calc_range)->required();
    beta_cmd->add_option("--v", calc_v, "constant speed (m/s)");
    beta_cmd->add_option("--vmin", calc_vmin);
    beta_cmd->add_option("--vmax", calc_vmax);
    beta_cmd->add_option("--ev", calc_ev, "mean relative speed E[V*] (m/s), overrides speeds");

    try {
        app.parse(argc, argv);

        if (*sim_cmd) {
            const icmn::MeetingSchedule schedule = icmn::read_schedule_file(sim_schedule);
            if (sim_flow < 0 || sim_flow >= schedule.node_count)
                throw std::invalid_argument("--flow must be in [0, n)");
            double lambda = sim_lambda;
            if (lambda <= 0.0) {
                if (!(sim_rho > 0.0))
                    throw std::invalid_argument("pass --lambda or --rho");
                double beta = sim_beta;
                if (!(beta > 0.0)) {
                    beta = icmn::estimate_beta(schedule).value;
                    std::cerr << "note: using beta = " << fmt(beta)
                              << " estimated from the schedule\n";
                }
                lambda = sim_rho * icmn::capacity(schedule.node_count, beta);
            }
            icmn::TrafficParams traffic;
            traffic.arrival_rate = lambda;
            traffic.destination = icmn::sample_derangement(schedule.node_count, sim_seed);
            traffic.seed = sim_seed;
            icmn::SimOptions options;
            options.warmup = sim_warmup;
            options.record_packets = !sim_packets.empty();
            const icmn::NetworkParams params =
                icmn::NetworkParams::poisson(schedule.node_count, 1.0);
            const icmn::SimulationStats stats = icmn::simulate(params, traffic, schedule, options);
            if (sim_report.empty()) {
                write_stats_report(std::cout, stats, traffic, sim_flow);
            } else {
                std::ofstream os(sim_report, std::ios::binary);
                if (!os)
                    throw icmn::io_error("cannot open for writing: " + sim_report);
                write_stats_report(os, stats, traffic, sim_flow);
            }
            if (!sim_packets.empty())
                write_packets_csv(sim_packets, stats);
        } else if (*sweep_cmd) {
            icmn::ExperimentConfig cfg = icmn::parse_experiment_config_file(sweep_config);
            if (!sweep_out_override.empty())
                cfg.output_dir = sweep_out_override;
            if (cfg.mobility != icmn::MeetingSource::poisson) {
                const bool sweeps_range = cfg.scenario == icmn::Scenario::validate_beta ||
                                          cfg.scenario == icmn::Scenario::capacity_vs_range ||
                                          cfg.scenario == icmn::Scenario::delay_vs_range;
                warn_if_large_range(cfg.side_length,
                                    sweeps_range ? cfg.sweep.back() : cfg.tx_range);
            }
            const auto rows = icmn::run_experiment(cfg);
            icmn::emit_report(rows, cfg);
            std::cout << "wrote " << cfg.output_dir << "/results.csv (" << rows.size()
                      << " rows)\n";
        } else if (*gen_cmd) {
            icmn::NetworkParams params;
            params.node_count = gen_n;
            params.side_length = gen_side;
            const icmn::SpeedModel speed = speed_from_flags(gen_v, gen_vmin, gen_vmax);
            const icmn::PauseModel pause =
                gen_pause > 0.0 ? icmn::PauseModel::fixed(gen_pause) : icmn::PauseModel::none();
            icmn::Trace trace;
            if (gen_model == "rwp") {
                trace = icmn::generate_rwp(params, speed, pause, gen_horizon, gen_seed);
            } else if (gen_model == "rd") {
                icmn::Boundary boundary;
                if (gen_boundary == "reflect")
                    boundary = icmn::Boundary::reflect;
                else if (gen_boundary == "wrap")
                    boundary = icmn::Boundary::wrap;
                else
                    throw std::invalid_argument("--boundary must be reflect or wrap");
                trace = icmn::generate_rd(params, speed, pause,
                                          icmn::TravelTimeModel::exponential_mean(gen_travel_mean),
                                          boundary, gen_horizon, gen_seed);
            } else {
                throw std::invalid_argument("--model must be rwp or rd");
            }
            icmn::write_trace_file(gen_out, trace);
            std::cout << "wrote " << gen_out << "\n";
        } else if (*extract_cmd) {
            const icmn::Trace trace = icmn::read_trace_file(ext_trace);
            warn_if_large_range(trace.side_length, ext_range);
            const icmn::MeetingSchedule schedule =
                icmn::extract_meetings(trace, ext_range, ext_seed);
            icmn::write_schedule_file(ext_out, schedule);
            std::cout << "wrote " << ext_out << " (" << schedule.events.size() << " meetings)\n";
        } else if (*import_cmd) {
            std::optional<double> horizon;
            if (imp_horizon > 0.0)
                horizon = imp_horizon;
            const icmn::Trace trace = icmn::import_ns2_movements_file(imp_in, imp_side, horizon);
            icmn::write_trace_file(imp_out, trace);
            std::cout << "wrote " << imp_out << " (" << trace.node_count() << " nodes)\n";
        } else if (*cap_cmd) {
            print_value(icmn::capacity(calc_n, calc_beta));
        } else if (*delay_cmd) {
            double lambda = calc_lambda;
            if (lambda <= 0.0) {
                if (!(calc_rho > 0.0))
                    throw std::invalid_argument("pass --lambda or --rho");
                lambda = calc_rho * icmn::capacity(calc_n, calc_beta);
            }
            print_value(icmn::expected_delay(calc_n, calc_beta, lambda));
        } else if (*bound_cmd) {
            print_value(icmn::tradeoff_bound(calc_n, calc_beta));
        } else if (*beta_cmd) {
            warn_if_large_range(calc_side, calc_range);
            icmn::RelativeSpeed ev{calc_ev};
            if (!(calc_ev > 0.0))
                ev = icmn::expected_relative_speed(speed_from_flags(calc_v, calc_vmin, calc_vmax));
            if (calc_model == "rwp")
                print_value(icmn::beta_rwp(calc_side, calc_range, ev));
            else if (calc_model == "rd")
                print_value(icmn::beta_rd(calc_side, calc_range, ev));
            else
                throw std::invalid_argument("--model must be rwp or rd");
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const icmn::io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
