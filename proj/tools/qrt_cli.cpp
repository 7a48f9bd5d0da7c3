// qrt_cli.cpp - command-line driver: landscape, schedule, spectral, run, sweep
//
// Reproduces the reference experiments and exposes each library layer as a
// subcommand with file outputs. Config files use `key = value` lines with `#`
// comments; every key can be overridden on the command line.

#include "qrt/multistep.hpp"
#include "qrt/reports.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace qrt;

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

GridSpec parse_grid(const std::string& text) {
    std::vector<GridAxis> axes;
    std::uint32_t count = 0;
    for (const std::string& axis : split(text, ',')) {
        const auto f = split(axis, ':');
        if (f.size() != 3) throw CLI::ValidationError("--grid", "expected lo:hi:count per variable");
        axes.push_back({std::stod(f[0]), std::stod(f[1])});
        const auto c = static_cast<std::uint32_t>(std::stoul(f[2]));
        if (count != 0 && c != count)
            throw CLI::ValidationError("--grid", "all variables must share one point count");
        count = c;
    }
    return GridSpec(axes, count);
}

std::vector<double> parse_mesh(const std::string& text) {
    const auto f = split(text, ':');
    if (f.size() != 3) throw CLI::ValidationError("mesh", "expected lo:hi:count");
    const double lo = std::stod(f[0]), hi = std::stod(f[1]);
    const auto n = std::stoul(f[2]);
    if (n < 1) throw CLI::ValidationError("mesh", "count must be >= 1");
    std::vector<double> mesh(n);
    for (std::size_t i = 0; i < n; ++i)
        mesh[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return mesh;
}

GridSpec default_grid(const std::string& function_id) {
    if (function_id == "damavandi") return GridSpec({{0, 14}, {0, 14}}, 281);
    if (function_id == "griewank") return GridSpec({{-40, 40}, {-40, 40}}, 801);
    if (function_id == "price") return GridSpec({{-10, 10}, {-10, 10}}, 201);
    throw CLI::ValidationError("--grid", "required for this function");
}

struct ProblemOptions {
    std::string function_id = "price";
    std::string grid_text;
    std::string tabulated_path;

    void attach(CLI::App* cmd) {
        cmd->add_option("--function", function_id, "Objective name: damavandi | griewank | price");
        cmd->add_option("--grid", grid_text, "Grid as lo:hi:count[,lo:hi:count...]");
        cmd->add_option("--tabulated", tabulated_path, "Tabulated objective file (overrides --function/--grid)");
    }

    std::pair<ObjectiveFunction, GridSpec> resolve() const {
        if (!tabulated_path.empty()) {
            const TabulatedObjective tab = load_tabulated(tabulated_path);
            return {tab.as_objective(), tab.grid};
        }
        const GridSpec grid = grid_text.empty() ? default_grid(function_id) : parse_grid(grid_text);
        return {make_objective(function_id, grid.arity()), grid};
    }
};

int default_threads() {
    if (const char* env = std::getenv("QRT_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

TiePolicy parse_ties(const std::string& s) {
    if (s == "exclude") return TiePolicy::exclude;
    if (s == "include") return TiePolicy::include;
    throw CLI::ValidationError("--ties", "expected exclude or include");
}

MixingPolicy parse_mixing(const std::string& s) {
    MixingPolicy p;
    if (s == "exact") return p;
    if (s.rfind("sampled", 0) == 0) {
        p.kind = MixingPolicy::Kind::sampled;
        const auto colon = s.find(':');
        if (colon != std::string::npos) p.samples = std::stoull(s.substr(colon + 1));
        return p;
    }
    throw CLI::ValidationError("--m-policy", "expected exact or sampled[:samples]");
}

std::filesystem::path prepare_out(const std::string& dir) {
    std::filesystem::path p(dir);
    std::filesystem::create_directories(p);
    return p;
}

void print_schedule(const LevelSetReport& report, const ThresholdSchedule& sched) {
    std::printf("# %5s %12s %12s %12s %8s %8s %8s  flags\n", "i", "d", "N_i", "M_i", "rate", "a", "b");
    for (std::size_t i = 0; i < report.steps.size(); ++i) {
        const LevelStats& s = report.steps[i];
        std::printf("  %5zu %12g %12llu %12llu %8.3f %8.4f %8.4f  %c%c%c%s\n", i + 1,
                    sched.thresholds[i], static_cast<unsigned long long>(s.exact_size),
                    static_cast<unsigned long long>(s.mixing_weight), s.rate, s.a, s.b,
                    s.c1 ? '.' : '1', s.c2 ? '.' : '2', s.c3 ? '.' : '3',
                    s.boundary_ties ? "  (boundary ties)" : "");
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multistep resonant-transition optimizer toolkit"};
    app.set_config("--config", "", "Config file with key = value lines");
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    int threads = default_threads();
    std::string out_dir = ".";
    bool lenient = false;
    app.add_option("--seed", seed, "Master RNG seed")->capture_default_str();
    app.add_option("--threads", threads, "Worker cap (env QRT_THREADS)")->capture_default_str();
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_flag("--lenient", lenient, "Demote failed step conditions to warnings");

    // landscape -----------------------------------------------------------
    auto* cmd_landscape = app.add_subcommand("landscape", "Value histogram over the grid");
    ProblemOptions lp;
    lp.attach(cmd_landscape);
    double bin = 0.01;
    std::string range_text;
    cmd_landscape->add_option("--bin", bin, "Histogram bin width")->required();
    cmd_landscape->add_option("--range", range_text, "Value range lo:hi (default: exact grid min/max)");

    // schedule ------------------------------------------------------------
    auto* cmd_schedule = app.add_subcommand("schedule", "Level-set sizes and conditions for a threshold schedule");
    ProblemOptions sp;
    sp.attach(cmd_schedule);
    std::string thresholds_text, auto_text, ties_text = "exclude", mixing_text = "exact";
    cmd_schedule->add_option("--thresholds", thresholds_text, "Explicit decreasing list d1,d2,...");
    cmd_schedule->add_option("--auto", auto_text, "Automatic schedule as rate,d_final");
    cmd_schedule->add_option("--ties", ties_text, "Boundary-tie policy: exclude | include")->capture_default_str();
    cmd_schedule->add_option("--m-policy", mixing_text, "Mixing weights: exact | sampled[:samples]")->capture_default_str();

    // spectral ------------------------------------------------------------
    auto* cmd_spectral = app.add_subcommand("spectral", "Closed-form gap/component tables over (a, b)");
    std::string a_mesh_text = "0:1:101", b_mesh_text = "0:1:101", point_text;
    cmd_spectral->add_option("--a-mesh", a_mesh_text, "a mesh lo:hi:count")->capture_default_str();
    cmd_spectral->add_option("--b-mesh", b_mesh_text, "b mesh lo:hi:count")->capture_default_str();
    cmd_spectral->add_option("--point", point_text, "Single point a,b (prints the summary)");

    // run -------------------------------------------------------------
    auto* cmd_run = app.add_subcommand("run", "Full multistep search");
    ProblemOptions rp;
    rp.attach(cmd_run);
    std::string run_thresholds, run_auto, run_ties = "exclude", run_mixing = "exact";
    std::uint64_t shots = 4000;
    double coupling = 1e-3, omega = 1.0;
    int max_repeats = 200;
    std::vector<std::string> refine_kv;
    cmd_run->add_option("--thresholds", run_thresholds, "Explicit decreasing list d1,d2,...");
    cmd_run->add_option("--auto", run_auto, "Automatic schedule as rate,d_final");
    cmd_run->add_option("--ties", run_ties, "Boundary-tie policy")->capture_default_str();
    cmd_run->add_option("--m-policy", run_mixing, "Mixing weights: exact | sampled[:samples]")->capture_default_str();
    cmd_run->add_option("--shots", shots, "Terminal measurement count")->capture_default_str();
    cmd_run->add_option("--coupling", coupling, "Probe coupling c")->capture_default_str();
    cmd_run->add_option("--omega", omega, "Probe frequency for production steps")->capture_default_str();
    cmd_run->add_option("--max-repeats", max_repeats, "Repeat budget per step")->capture_default_str();
    cmd_run->add_option("--refine", refine_kv, "Zoom-in rounds, e.g. rounds=2 zoom=0.1 [rate=0.5 terminal=1]");

    // sweep -----------------------------------------------------------
    auto* cmd_sweep = app.add_subcommand("sweep", "Probe-frequency sweep for one step");
    ProblemOptions wp;
    wp.attach(cmd_sweep);
    std::string omega_grid_text, d_prev_text;
    double d_cur = 0.0, duration = 0.0;
    double sweep_coupling = 1e-3;
    cmd_sweep->add_option("--d-cur", d_cur, "Threshold of the current step")->required();
    cmd_sweep->add_option("--d-prev", d_prev_text, "Threshold of the previous step (omit for the uniform start)");
    cmd_sweep->add_option("--omega-grid", omega_grid_text, "Frequency grid lo:hi:count")->required();
    cmd_sweep->add_option("--duration", duration, "Evolution time per frequency (default pi/(2c))");
    cmd_sweep->add_option("--coupling", sweep_coupling, "Probe coupling c")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        const auto out = prepare_out(out_dir);

        if (cmd_landscape->parsed()) {
            auto [f, grid] = lp.resolve();
            double lo, hi;
            if (!range_text.empty()) {
                const auto r = split(range_text, ':');
                if (r.size() != 2) throw CLI::ValidationError("--range", "expected lo:hi");
                lo = std::stod(r[0]);
                hi = std::stod(r[1]);
            } else {
                lo = std::numeric_limits<double>::infinity();
                hi = -lo;
                for (std::uint64_t j = 0; j < grid.state_count(); ++j) {
                    const double v = eval_at_index(j, f, grid);
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
                hi += 0.5 * bin;  // keep the max value inside the last bin
            }
            const Histogram h = build_histogram(f, grid, bin, lo, hi, threads);
            write_file((out / "histogram.csv").string(), [&](std::ostream& os) { write_histogram_csv(h, os); });
            std::printf("histogram: %zu bins, max count %llu, overflow %llu -> %s\n", h.counts.size(),
                        static_cast<unsigned long long>(h.max_count()),
                        static_cast<unsigned long long>(h.overflow),
                        (out / "histogram.csv").c_str());
            return 0;
        }

        if (cmd_schedule->parsed()) {
            auto [f, grid] = sp.resolve();
            const TiePolicy ties = parse_ties(ties_text);
            const MixingPolicy mixing = parse_mixing(mixing_text);
            ThresholdSchedule sched;
            if (!auto_text.empty()) {
                const auto parts = split(auto_text, ',');
                if (parts.size() != 2) throw CLI::ValidationError("--auto", "expected rate,d_final");
                AutoScheduleOptions opts;
                opts.policy = ties;
                opts.threads = threads;
                sched = auto_schedule(f, grid, std::stod(parts[0]), std::stod(parts[1]), seed, opts);
            } else if (!thresholds_text.empty()) {
                for (const auto& t : split(thresholds_text, ',')) sched.thresholds.push_back(std::stod(t));
                auto [fmin, fmax] = estimate_range(f, grid, 10000, seed);
                sched.f_min_est = std::min(fmin, sched.thresholds.back() - 1.0);
                sched.f_max_est = std::max(fmax, sched.thresholds.front() + 1.0);
            } else {
                throw CLI::ValidationError("schedule", "need --thresholds or --auto");
            }
            const LevelSetReport report = analyze_schedule(f, grid, sched, mixing, ties, seed, threads);
            write_file((out / "schedule.csv").string(),
                       [&](std::ostream& os) { write_schedule_csv(report, sched, os); });
            write_file((out / "schedule.json").string(), [&](std::ostream& os) {
                auto j = levels_to_json(report);
                j["thresholds"] = sched.thresholds;
                os << j.dump(2) << '\n';
            });
            print_schedule(report, sched);
            if (!report.all_pass) {
                std::fprintf(stderr, "warning: step conditions failed\n");
                if (!lenient) return 3;
            }
            return 0;
        }

        if (cmd_spectral->parsed()) {
            if (!point_text.empty()) {
                const auto parts = split(point_text, ',');
                if (parts.size() != 2) throw CLI::ValidationError("--point", "expected a,b");
                const double a = std::stod(parts[0]), b = std::stod(parts[1]);
                const auto [em, ep] = eigenpair_ab(a, b);
                std::printf("a=%g b=%g  e_minus=%.12g e_plus=%.12g gap=%.12g\n", a, b, em, ep, ep - em);
                if (a > 0 && a < 1) {
                    const auto [x1, x2] = ground_components_ab(a, b);
                    std::printf("x1=%.12g x2=%.12g ratio=%.12g\n", x1, x2, x1 / x2);
                }
                return 0;
            }
            const std::vector<double> am = parse_mesh(a_mesh_text);
            const std::vector<double> bm = parse_mesh(b_mesh_text);
            write_file((out / "spectral.csv").string(),
                       [&](std::ostream& os) { emit_spectral_table(os, am, bm); });
            std::printf("spectral table: %zu rows -> %s\n", am.size() * bm.size(),
                        (out / "spectral.csv").c_str());
            return 0;
        }

        if (cmd_run->parsed()) {
            auto [f, grid] = rp.resolve();
            RunConfig cfg;
            cfg.step.seed = seed;
            cfg.step.coupling = coupling;
            cfg.step.omega = omega;
            cfg.step.max_repeats = max_repeats;
            cfg.mixing = parse_mixing(run_mixing);
            cfg.ties = parse_ties(run_ties);
            cfg.shots = shots;
            cfg.threads = threads;

            ThresholdSchedule sched;
            if (!run_auto.empty()) {
                const auto parts = split(run_auto, ',');
                if (parts.size() != 2) throw CLI::ValidationError("--auto", "expected rate,d_final");
                AutoScheduleOptions opts;
                opts.policy = cfg.ties;
                opts.threads = threads;
                sched = auto_schedule(f, grid, std::stod(parts[0]), std::stod(parts[1]), seed, opts);
            } else if (!run_thresholds.empty()) {
                for (const auto& t : split(run_thresholds, ',')) sched.thresholds.push_back(std::stod(t));
                auto [fmin, fmax] = estimate_range(f, grid, 10000, seed);
                sched.f_min_est = std::min(fmin, sched.thresholds.back() - 1.0);
                sched.f_max_est = std::max(fmax, sched.thresholds.front() + 1.0);
            } else {
                throw CLI::ValidationError("run", "need --thresholds or --auto");
            }

            const RunReport report = run_multistep(f, grid, sched, cfg);
            write_run_report_json(report, (out / "run_report.json").string());
            write_file((out / "trace.csv").string(), [&](std::ostream& os) { write_trace_csv(report, os); });
            if (!report.all_steps_decayed) {
                std::fprintf(stderr, "error: a step failed to decay within the repeat budget\n");
                return 2;
            }
            std::printf("best value %.12g at J=%llu (", report.best_value,
                        static_cast<unsigned long long>(report.best_index));
            for (std::size_t s = 0; s < report.best_point.size(); ++s)
                std::printf("%s%.10g", s ? ", " : "", report.best_point[s]);
            std::printf(")\n");

            if (!refine_kv.empty()) {
                RefineOptions ropts;
                for (const auto& kv : refine_kv) {
                    const auto eq = kv.find('=');
                    if (eq == std::string::npos)
                        throw CLI::ValidationError("--refine", "expected key=value entries");
                    const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
                    if (key == "rounds") ropts.rounds = std::stoi(val);
                    else if (key == "zoom") ropts.zoom = std::stod(val);
                    else if (key == "rate") ropts.rate = std::stod(val);
                    else if (key == "terminal") ropts.terminal_count = std::stoull(val);
                    else throw CLI::ValidationError("--refine", "unknown key " + key);
                }
                const RefineReport refined = refine(f, grid, report.best_point, ropts, cfg);
                for (std::size_t r = 0; r < refined.rounds.size(); ++r) {
                    const std::string name = "run_report_round" + std::to_string(r + 1) + ".json";
                    write_run_report_json(refined.rounds[r], (out / name).string());
                }
                std::printf("refined best value %.12g at (", refined.best_value);
                for (std::size_t s = 0; s < refined.best_point.size(); ++s)
                    std::printf("%s%.12g", s ? ", " : "", refined.best_point[s]);
                std::printf(") after %zu round(s)\n", refined.rounds.size());
            }
            if (!report.conditions_pass) {
                std::fprintf(stderr, "warning: step conditions failed\n");
                if (!lenient) return 3;
            }
            return 0;
        }

        if (cmd_sweep->parsed()) {
            auto [f, grid] = wp.resolve();
            const std::uint64_t n = grid.state_count();
            const std::uint64_t n_cur = count_level_set(f, grid, d_cur, TiePolicy::exclude, threads);
            if (n_cur == 0) throw InfeasibleSchedule("sweep: empty level set at --d-cur");
            std::uint64_t n_prev = n, m_prev = n;
            if (!d_prev_text.empty()) {
                n_prev = count_level_set(f, grid, std::stod(d_prev_text), TiePolicy::exclude, threads);
                m_prev = n_prev;
            }
            const MixingParams prev = MixingParams::from_counts(n, n_prev, m_prev);
            const MixingParams cur = MixingParams::from_counts(n, n_cur, n_cur);
            const CellPartition part = CellPartition::nested(n, n_prev, n_cur);
            StepConfig scfg;
            scfg.coupling = sweep_coupling;
            scfg.seed = seed;
            const double T = duration > 0 ? duration : std::numbers::pi / (2.0 * sweep_coupling);
            const SweepResult res = frequency_sweep(prev, cur, part, scfg, parse_mesh(omega_grid_text), T);
            write_file((out / "sweep.csv").string(), [&](std::ostream& os) {
                os << "omega,population\n";
                for (const auto& p : res.profile)
                    os << fmt17(p.omega) << ',' << fmt17(p.population) << '\n';
            });
            std::printf("peak omega %.12g -> e0 estimate %.12g (exact %.12g)\n", res.peak_omega,
                        res.e0_estimate, ground_energy(cur));
            return 0;
        }
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
    return 0;
}
