// Experiment harness: parameter sweeps that pit the simulator against the
// closed-form results, configured by a flat key=value file and emitted as
// CSV plus a plot script. Load sweeps share mobility randomness across sweep
// points (one meeting source per run seed), so points differ only in load.
#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "icmn/analysis.hpp"
#include "icmn/errors.hpp"
#include "icmn/extraction.hpp"
#include "icmn/meeting.hpp"
#include "icmn/mobility.hpp"
#include "icmn/routing.hpp"
#include "icmn/stats.hpp"

namespace icmn {

enum class Scenario {
    throughput_vs_load,
    delay_vs_load,
    capacity_vs_speed,
    delay_vs_speed,
    capacity_vs_range,
    delay_vs_range,
    validate_beta,
};

enum class MeetingSource { poisson, rwp, rd };

inline const char* to_string(Scenario s) {
    switch (s) {
    case Scenario::throughput_vs_load: return "throughput-vs-load";
    case Scenario::delay_vs_load: return "delay-vs-load";
    case Scenario::capacity_vs_speed: return "capacity-vs-speed";
    case Scenario::delay_vs_speed: return "delay-vs-speed";
    case Scenario::capacity_vs_range: return "capacity-vs-d";
    case Scenario::delay_vs_range: return "delay-vs-d";
    case Scenario::validate_beta: return "validate-beta";
    }
    return "?";
}

inline const char* to_string(MeetingSource m) {
    switch (m) {
    case MeetingSource::poisson: return "poisson";
    case MeetingSource::rwp: return "rwp";
    case MeetingSource::rd: return "rd";
    }
    return "?";
}

inline const char* to_string(Boundary b) {
    return b == Boundary::reflect ? "reflect" : "wrap";
}

struct ExperimentConfig {
    Scenario scenario = Scenario::throughput_vs_load;
    MeetingSource mobility = MeetingSource::poisson;
    std::vector<double> sweep;

    int node_count = 0;        // n
    double side_length = 0.0;  // L; required for trace mobility and theory sweeps
    double tx_range = 0.0;     // d; ditto
    double beta = 0.0;         // pairwise rate for the poisson source

    double speed_min = 0.0;    // v (constant when speed_max == 0 or equal)
    double speed_max = 0.0;
    double relative_speed = 0.0; // E[V*] override; derived from speeds when 0
    double pause = 0.0;          // fixed pause seconds
    double rd_travel_mean = 50.0;
    Boundary rd_boundary = Boundary::reflect;

    double horizon = 0.0;
    double warmup = -1.0; // < 0: 10% of horizon
    double rho = 0.8;     // load for delay-vs-speed / delay-vs-d theory curves

    int runs = 5;
    std::uint64_t seed = 1;
    int flow = 0; // designated measurement flow for throughput
    std::string output_dir = "results";

    bool needs_simulation() const {
        return scenario == Scenario::throughput_vs_load || scenario == Scenario::delay_vs_load ||
               scenario == Scenario::validate_beta;
    }
    bool needs_trace() const { return mobility != MeetingSource::poisson; }
    bool needs_speed_model() const {
        if (needs_trace() && needs_simulation())
            return true; // trace generation draws per-leg speeds
        return (scenario == Scenario::capacity_vs_range || scenario == Scenario::delay_vs_range) &&
               relative_speed == 0.0;
    }

    SpeedModel speed_model() const {
        return speed_max > speed_min ? SpeedModel::uniform_range(speed_min, speed_max)
                                     : SpeedModel::constant(speed_min);
    }

    void validate() const {
        if (sweep.empty())
            throw std::invalid_argument("sweep must be non-empty");
        for (std::size_t i = 1; i < sweep.size(); ++i)
            if (!(sweep[i] > sweep[i - 1]))
                throw std::invalid_argument("sweep values must be strictly increasing");
        if (node_count < 3)
            throw std::invalid_argument("n must be >= 3");
        if (runs < 1)
            throw std::invalid_argument("runs must be >= 1");
        if (flow < 0 || flow >= node_count)
            throw std::invalid_argument("flow must be in [0, n)");

        const bool load_sweep =
            scenario == Scenario::throughput_vs_load || scenario == Scenario::delay_vs_load;
        if (load_sweep)
            for (double r : sweep)
                if (!(r > 0.0))
                    throw std::invalid_argument("load sweep values must be > 0");

        if (needs_simulation()) {
            if (!(horizon > 0.0))
                throw std::invalid_argument("horizon must be > 0");
            if (warmup >= horizon)
                throw std::invalid_argument("warmup must be earlier than the horizon");
        }
        if (mobility == MeetingSource::poisson) {
            if (scenario == Scenario::validate_beta)
                throw std::invalid_argument("validate-beta needs trace mobility (rwp or rd)");
            if (scenario == Scenario::capacity_vs_speed || scenario == Scenario::delay_vs_speed ||
                scenario == Scenario::capacity_vs_range || scenario == Scenario::delay_vs_range)
                throw std::invalid_argument("theory sweeps need a mobility model (rwp or rd)");
            if (load_sweep && !(beta > 0.0))
                throw std::invalid_argument("poisson source needs beta > 0");
        } else {
            if (!(side_length > 0.0))
                throw std::invalid_argument("trace mobility needs L > 0");
            if (scenario != Scenario::validate_beta && scenario != Scenario::capacity_vs_range &&
                scenario != Scenario::delay_vs_range && !(tx_range > 0.0 && tx_range < side_length))
                throw std::invalid_argument("trace mobility needs 0 < d < L");
        }
        if (needs_speed_model())
            speed_model().validate();
        else if (scenario == Scenario::capacity_vs_range || scenario == Scenario::delay_vs_range)
            RelativeSpeed{relative_speed}.validate();
        if (scenario == Scenario::delay_vs_speed || scenario == Scenario::delay_vs_range)
            if (!(rho > 0.0 && rho < 1.0))
                throw std::invalid_argument("delay theory sweeps need 0 < rho < 1");
    }
};

struct ExperimentRow {
    double sweep = 0.0;
    std::optional<double> theory;
    std::optional<double> sim_mean;
    std::optional<double> sim_stderr;
    int runs = 0; // simulation runs backing sim_mean (0 for theory-only rows)
    bool stable = true;
};

// ---------------------------------------------------------------------------
// Config file parsing: one `key = value` per line, '#' comments, unknown
// keys are hard errors.

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

inline std::vector<double> parse_double_list(const std::string& value, bool& ok) {
    std::vector<double> out;
    std::string item;
    std::string normalized = value;
    for (char& c : normalized)
        if (c == ',') c = ' ';
    std::istringstream fields(normalized);
    while (fields >> item) {
        double v = 0.0;
        if (!parse_double(item, v)) {
            ok = false;
            return out;
        }
        out.push_back(v);
    }
    ok = !out.empty();
    return out;
}

} // namespace detail

inline ExperimentConfig parse_experiment_config(std::istream& is,
                                                const std::string& source = "<config>") {
    ExperimentConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    bool have_scenario = false, have_mobility = false;
    while (std::getline(is, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        const std::string stripped = detail::trim(line);
        if (stripped.empty())
            continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw parse_error(source, line_no, "expected 'key = value'");
        const std::string key = detail::trim(std::string_view(stripped).substr(0, eq));
        const std::string value = detail::trim(std::string_view(stripped).substr(eq + 1));
        if (key.empty() || value.empty())
            throw parse_error(source, line_no, "expected 'key = value'");

        auto bad_value = [&]() {
            return parse_error(source, line_no, "invalid value for '" + key + "': " + value);
        };
        auto as_double = [&]() {
            double v = 0.0;
            if (!detail::parse_double(value, v))
                throw bad_value();
            return v;
        };
        auto as_int = [&]() {
            int v = 0;
            if (!detail::parse_int(value, v))
                throw bad_value();
            return v;
        };

        if (key == "scenario") {
            have_scenario = true;
            if (value == "throughput-vs-load") cfg.scenario = Scenario::throughput_vs_load;
            else if (value == "delay-vs-load") cfg.scenario = Scenario::delay_vs_load;
            else if (value == "capacity-vs-speed") cfg.scenario = Scenario::capacity_vs_speed;
            else if (value == "delay-vs-speed") cfg.scenario = Scenario::delay_vs_speed;
            else if (value == "capacity-vs-d") cfg.scenario = Scenario::capacity_vs_range;
            else if (value == "delay-vs-d") cfg.scenario = Scenario::delay_vs_range;
            else if (value == "validate-beta") cfg.scenario = Scenario::validate_beta;
            else throw bad_value();
        } else if (key == "mobility") {
            have_mobility = true;
            if (value == "poisson") cfg.mobility = MeetingSource::poisson;
            else if (value == "rwp") cfg.mobility = MeetingSource::rwp;
            else if (value == "rd") cfg.mobility = MeetingSource::rd;
            else throw bad_value();
        } else if (key == "sweep") {
            bool ok = true;
            cfg.sweep = detail::parse_double_list(value, ok);
            if (!ok)
                throw bad_value();
        } else if (key == "n") {
            cfg.node_count = as_int();
        } else if (key == "L") {
            cfg.side_length = as_double();
        } else if (key == "d") {
            cfg.tx_range = as_double();
        } else if (key == "beta") {
            cfg.beta = as_double();
        } else if (key == "v") {
            cfg.speed_min = cfg.speed_max = as_double();
        } else if (key == "v_min") {
            cfg.speed_min = as_double();
        } else if (key == "v_max") {
            cfg.speed_max = as_double();
        } else if (key == "ev") {
            cfg.relative_speed = as_double();
        } else if (key == "pause") {
            cfg.pause = as_double();
        } else if (key == "rd_travel_mean") {
            cfg.rd_travel_mean = as_double();
        } else if (key == "rd_boundary") {
            if (value == "reflect") cfg.rd_boundary = Boundary::reflect;
            else if (value == "wrap") cfg.rd_boundary = Boundary::wrap;
            else throw bad_value();
        } else if (key == "horizon") {
            cfg.horizon = as_double();
        } else if (key == "warmup") {
            cfg.warmup = as_double();
        } else if (key == "rho") {
            cfg.rho = as_double();
        } else if (key == "runs") {
            cfg.runs = as_int();
        } else if (key == "seed") {
            std::uint64_t v = 0;
            if (!detail::parse_u64(value, v))
                throw bad_value();
            cfg.seed = v;
        } else if (key == "flow") {
            cfg.flow = as_int();
        } else if (key == "output") {
            cfg.output_dir = value;
        } else {
            throw parse_error(source, line_no, "unknown key '" + key + "'");
        }
    }
    if (!have_scenario)
        throw parse_error(source, line_no, "missing required key 'scenario'");
    if (!have_mobility)
        throw parse_error(source, line_no, "missing required key 'mobility'");
    cfg.validate();
    return cfg;
}

inline ExperimentConfig parse_experiment_config_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is)
        throw io_error("cannot open for reading: " + path.string());
    return parse_experiment_config(is, path.string());
}

// ---------------------------------------------------------------------------

namespace detail {

// Runs worker(0..count-1) across a small pool; each task writes only its own
// slot, so assembly order never depends on thread timing.
inline void parallel_for_index(std::size_t count, const std::function<void(std::size_t)>& worker) {
    const std::size_t threads =
        std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            worker(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::atomic<std::size_t> next{0};
    for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1))
                worker(i);
        });
    for (auto& th : pool)
        th.join();
}

} // namespace detail

// Effective mean relative speed for the config's mobility, from the explicit
// override or the speed model quadrature.
inline RelativeSpeed experiment_relative_speed(const ExperimentConfig& cfg) {
    if (cfg.relative_speed > 0.0)
        return RelativeSpeed{cfg.relative_speed};
    return expected_relative_speed(cfg.speed_model());
}

// Meeting rate the theory columns use.
inline double experiment_theory_beta(const ExperimentConfig& cfg, double range) {
    switch (cfg.mobility) {
    case MeetingSource::poisson: return cfg.beta;
    case MeetingSource::rwp: return beta_rwp(cfg.side_length, range, experiment_relative_speed(cfg));
    case MeetingSource::rd: return beta_rd(cfg.side_length, range, experiment_relative_speed(cfg));
    }
    return cfg.beta;
}

inline std::vector<ExperimentRow> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const int n = cfg.node_count;
    std::vector<ExperimentRow> rows(cfg.sweep.size());
    for (std::size_t i = 0; i < cfg.sweep.size(); ++i)
        rows[i].sweep = cfg.sweep[i];

    // Pure-theory sweeps: exact function evaluations, no simulation.
    if (!cfg.needs_simulation()) {
        const bool rwp = cfg.mobility == MeetingSource::rwp;
        for (ExperimentRow& row : rows) {
            double beta = 0.0;
            switch (cfg.scenario) {
            case Scenario::capacity_vs_speed:
            case Scenario::delay_vs_speed:
                beta = rwp ? beta_rwp(cfg.side_length, cfg.tx_range, RelativeSpeed{row.sweep})
                           : beta_rd(cfg.side_length, cfg.tx_range, RelativeSpeed{row.sweep});
                break;
            case Scenario::capacity_vs_range:
            case Scenario::delay_vs_range:
                beta = rwp ? beta_rwp(cfg.side_length, row.sweep, experiment_relative_speed(cfg))
                           : beta_rd(cfg.side_length, row.sweep, experiment_relative_speed(cfg));
                break;
            default:
                break;
            }
            const double mu = capacity(n, beta);
            if (cfg.scenario == Scenario::capacity_vs_speed ||
                cfg.scenario == Scenario::capacity_vs_range)
                row.theory = mu;
            else
                row.theory = expected_delay(n, beta, cfg.rho * mu);
            row.runs = 0;
            row.stable = true;
        }
        return rows;
    }

    // Simulation sweeps. One meeting source per run seed, shared across
    // sweep points.
    const double theory_beta = cfg.scenario == Scenario::validate_beta
                                   ? 0.0
                                   : experiment_theory_beta(cfg, cfg.tx_range);
    const double mu = cfg.scenario == Scenario::validate_beta ? 0.0 : capacity(n, theory_beta);

    std::vector<std::vector<double>> values(cfg.sweep.size()); // [point][run]
    for (auto& v : values)
        v.assign(static_cast<std::size_t>(cfg.runs), 0.0);
    std::vector<std::vector<char>> have(cfg.sweep.size(),
                                        std::vector<char>(static_cast<std::size_t>(cfg.runs), 0));

    NetworkParams params;
    params.node_count = n;
    params.side_length = cfg.needs_trace() ? cfg.side_length : 1.0;
    params.tx_range = cfg.needs_trace() ? cfg.tx_range : 0.01;
    params.meeting_rate = cfg.scenario == Scenario::validate_beta ? 1.0 : theory_beta;

    for (int run = 0; run < cfg.runs; ++run) {
        const std::uint64_t run_seed = cfg.seed + static_cast<std::uint64_t>(run);

        Trace trace;
        MeetingSchedule schedule;
        if (cfg.needs_trace()) {
            if (cfg.mobility == MeetingSource::rwp)
                trace = generate_rwp(params, cfg.speed_model(),
                                     cfg.pause > 0.0 ? PauseModel::fixed(cfg.pause) : PauseModel::none(),
                                     cfg.horizon, run_seed);
            else
                trace = generate_rd(params, cfg.speed_model(),
                                    cfg.pause > 0.0 ? PauseModel::fixed(cfg.pause) : PauseModel::none(),
                                    TravelTimeModel::exponential_mean(cfg.rd_travel_mean),
                                    cfg.rd_boundary, cfg.horizon, run_seed);
        }
        if (cfg.scenario != Scenario::validate_beta) {
            schedule = cfg.needs_trace()
                           ? extract_meetings(trace, cfg.tx_range, run_seed)
                           : generate_schedule(params, cfg.horizon, run_seed);
            trace = Trace{}; // the schedule is all the sweep needs
        }

        detail::parallel_for_index(cfg.sweep.size(), [&](std::size_t point) {
            const double x = cfg.sweep[point];
            if (cfg.scenario == Scenario::validate_beta) {
                const MeetingSchedule extracted = extract_meetings(trace, x, run_seed);
                values[point][static_cast<std::size_t>(run)] = estimate_beta(extracted).value;
                have[point][static_cast<std::size_t>(run)] = 1;
                return;
            }
            const double lambda = x * mu;
            if (cfg.scenario == Scenario::delay_vs_load && x >= 1.0)
                return; // unstable point: leave unmeasured
            TrafficParams traffic;
            traffic.arrival_rate = lambda;
            traffic.destination = sample_derangement(n, run_seed);
            traffic.seed = run_seed;
            SimOptions options;
            options.warmup = cfg.warmup;
            const SimulationStats stats = simulate(params, traffic, schedule, options);
            values[point][static_cast<std::size_t>(run)] =
                cfg.scenario == Scenario::throughput_vs_load ? measured_throughput(stats, cfg.flow)
                                                             : stats.mean_delay();
            have[point][static_cast<std::size_t>(run)] = 1;
        });
    }

    for (std::size_t point = 0; point < rows.size(); ++point) {
        ExperimentRow& row = rows[point];
        if (cfg.scenario == Scenario::validate_beta) {
            row.theory = experiment_theory_beta(cfg, row.sweep);
            row.stable = true;
        } else {
            const double lambda = row.sweep * mu;
            row.stable = row.sweep < 1.0;
            if (cfg.scenario == Scenario::throughput_vs_load)
                row.theory = std::min(lambda, mu);
            else if (row.stable)
                row.theory = expected_delay(n, theory_beta, lambda);
        }
        RunningStats agg;
        for (int run = 0; run < cfg.runs; ++run)
            if (have[point][static_cast<std::size_t>(run)])
                agg.add(values[point][static_cast<std::size_t>(run)]);
        row.runs = static_cast<int>(agg.count);
        if (agg.count > 0) {
            row.sim_mean = agg.mean;
            row.sim_stderr = agg.standard_error();
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Report emission: results.csv, config.echo, plot.py.

namespace detail {

inline std::string format_g12(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

} // namespace detail

inline std::string render_csv(const std::vector<ExperimentRow>& rows) {
    std::string out = "sweep,theory,sim_mean,sim_stderr,runs,stable\n";
    for (const ExperimentRow& row : rows) {
        out += detail::format_g12(row.sweep);
        out += ',';
        if (row.theory) out += detail::format_g12(*row.theory);
        out += ',';
        if (row.sim_mean) out += detail::format_g12(*row.sim_mean);
        out += ',';
        if (row.sim_stderr) out += detail::format_g12(*row.sim_stderr);
        out += ',';
        out += std::to_string(row.runs);
        out += ',';
        out += row.stable ? "true" : "false";
        out += '\n';
    }
    return out;
}

inline std::string render_config_echo(const ExperimentConfig& cfg) {
    std::string out;
    auto kv = [&out](const std::string& k, const std::string& v) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    };
    if (cfg.needs_simulation())
        out += "# one meeting source per run seed, shared across all sweep points\n";
    kv("scenario", to_string(cfg.scenario));
    kv("mobility", to_string(cfg.mobility));
    {
        std::string s;
        for (std::size_t i = 0; i < cfg.sweep.size(); ++i) {
            if (i) s += ", ";
            s += detail::format_g12(cfg.sweep[i]);
        }
        kv("sweep", s);
    }
    kv("n", std::to_string(cfg.node_count));
    kv("L", detail::format_g12(cfg.side_length));
    kv("d", detail::format_g12(cfg.tx_range));
    kv("beta", detail::format_g12(cfg.beta));
    kv("v_min", detail::format_g12(cfg.speed_min));
    kv("v_max", detail::format_g12(cfg.speed_max));
    kv("ev", detail::format_g12(cfg.relative_speed));
    kv("pause", detail::format_g12(cfg.pause));
    kv("rd_travel_mean", detail::format_g12(cfg.rd_travel_mean));
    kv("rd_boundary", to_string(cfg.rd_boundary));
    kv("horizon", detail::format_g12(cfg.horizon));
    kv("warmup", detail::format_g12(cfg.warmup < 0.0 ? 0.1 * cfg.horizon : cfg.warmup));
    kv("rho", detail::format_g12(cfg.rho));
    kv("runs", std::to_string(cfg.runs));
    kv("seed", std::to_string(cfg.seed));
    kv("flow", std::to_string(cfg.flow));
    kv("output", cfg.output_dir);
    {
        std::string s;
        for (int run = 0; run < cfg.runs; ++run) {
            if (run) s += ' ';
            s += std::to_string(cfg.seed + static_cast<std::uint64_t>(run));
        }
        kv("run_seeds", s);
    }
    return out;
}

inline std::string render_plot_script(const ExperimentConfig& cfg) {
    std::string x_label;
    switch (cfg.scenario) {
    case Scenario::throughput_vs_load:
    case Scenario::delay_vs_load: x_label = "system load rho"; break;
    case Scenario::capacity_vs_speed:
    case Scenario::delay_vs_speed: x_label = "mean relative speed E[V*] (m/s)"; break;
    case Scenario::capacity_vs_range:
    case Scenario::delay_vs_range: x_label = "transmission range d (m)"; break;
    case Scenario::validate_beta: x_label = "transmission range d (m)"; break;
    }
    std::string y_label;
    switch (cfg.scenario) {
    case Scenario::throughput_vs_load: y_label = "throughput (packets/s)"; break;
    case Scenario::delay_vs_load:
    case Scenario::delay_vs_speed:
    case Scenario::delay_vs_range: y_label = "mean end-to-end delay (s)"; break;
    case Scenario::capacity_vs_speed:
    case Scenario::capacity_vs_range: y_label = "capacity mu (packets/s)"; break;
    case Scenario::validate_beta: y_label = "pairwise meeting rate beta (1/s)"; break;
    }
    std::string out = R"(#!/usr/bin/env python3
"""Renders results.csv (theory line + simulation points) next to this script."""
import csv
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
rows = list(csv.DictReader(open(os.path.join(here, "results.csv"))))

xs_theory = [float(r["sweep"]) for r in rows if r["theory"]]
theory = [float(r["theory"]) for r in rows if r["theory"]]
xs_sim = [float(r["sweep"]) for r in rows if r["sim_mean"]]
sim = [float(r["sim_mean"]) for r in rows if r["sim_mean"]]
err = [float(r["sim_stderr"] or 0.0) for r in rows if r["sim_mean"]]

fig, ax = plt.subplots(figsize=(6, 4))
if theory:
    ax.plot(xs_theory, theory, "k--", label="theory")
if sim:
    ax.errorbar(xs_sim, sim, yerr=err, fmt="o", capsize=3, label="simulation")
)";
    out += "ax.set_xlabel(\"" + x_label + "\")\n";
    out += "ax.set_ylabel(\"" + y_label + "\")\n";
    out += "ax.set_title(\"" + std::string(to_string(cfg.scenario)) + " (" +
           to_string(cfg.mobility) + ")\")\n";
    out += R"(ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(here, "plot.png"), dpi=150)
print("wrote", os.path.join(here, "plot.png"))
)";
    return out;
}

inline void emit_report(const std::vector<ExperimentRow>& rows, const ExperimentConfig& cfg) {
    if (rows.empty())
        throw std::invalid_argument("no rows to report");
    namespace fs = std::filesystem;
    const fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw io_error("cannot create output directory: " + dir.string());
    auto write_file = [&](const char* name, const std::string& content) {
        std::ofstream os(dir / name, std::ios::binary);
        if (!os)
            throw io_error("cannot open for writing: " + (dir / name).string());
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        os.flush();
        if (!os)
            throw io_error("write failed: " + (dir / name).string());
    };
    write_file("results.csv", render_csv(rows));
    write_file("config.echo", render_config_echo(cfg));
    write_file("plot.py", render_plot_script(cfg));
}

} // namespace icmn
