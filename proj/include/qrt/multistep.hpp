// multistep.hpp - chaining the resonant-transition steps over a schedule
//
// Drives the full search: exact level-set scan, mixing weights per policy,
// the step chain through the collapsed sector, terminal sampling and the
// zoom-in refinement rounds. The chain is H0 -> H1 -> ... -> H_{m-1} -> HP
// with the ground energy of H0 exactly -1; the final element is the pure
// projector onto the terminal level set.

#pragma once

#include "qrt/landscape.hpp"
#include "qrt/protocol.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

namespace qrt {

struct RunConfig {
    StepConfig step;
    MixingPolicy mixing;
    TiePolicy ties = TiePolicy::exclude;
    std::uint64_t shots = 4000;
    int threads = 1;
};

struct StepRecord {
    double threshold = 0.0;
    std::uint64_t level_size = 0;     // N_i
    std::uint64_t mixing_weight = 0;  // M_i used in the step operator (0 on the final projector)
    double e0 = 0.0;
    double g0 = 0.0;
    double alpha = 0.0;
    double coupling = 0.0;            // probe coupling used for this step
    double time = 0.0;
    int repeats = 0;
    bool decayed = false;
    double p0_analytic = 0.0;
    double p0_empirical = 0.0;
    double detuning = 0.0;
    double rebase_loss = 0.0;
    double fidelity = 0.0;
    double gap_two_level = 0.0;
    double gap_first_excited = 0.0;
};

struct SampleRecord {
    std::uint64_t index = 0;
    double value = 0.0;
};

struct RunReport {
    std::string function_id;
    GridSpec grid;
    ThresholdSchedule schedule;
    LevelSetReport levels;
    std::vector<StepRecord> steps;
    std::vector<double> final_cell_distribution;
    std::vector<SampleRecord> samples;
    std::vector<double> best_point;
    std::uint64_t best_index = 0;
    double best_value = 0.0;
    double total_evolution_time = 0.0;
    double wall_seconds = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t shots = 0;
    bool conditions_pass = false;
    bool all_steps_decayed = false;
};

// Uniform draws from the terminal level set. Small sets are enumerated once;
// larger ones are rejection-sampled from the full grid with an acceptance
// guard.
inline std::vector<SampleRecord> sample_final(const ObjectiveFunction& f, const GridSpec& g,
                                              double threshold, TiePolicy policy,
                                              std::uint64_t level_size, std::uint64_t shots,
                                              Rng& rng) {
    if (level_size == 0) throw std::invalid_argument("sample_final: empty terminal set");
    const std::uint64_t n = g.state_count();
    std::vector<SampleRecord> samples;
    samples.reserve(shots);
    if (level_size <= 4096) {
        const std::vector<std::uint64_t> members = enumerate_level_set(f, g, threshold, policy);
        for (std::uint64_t s = 0; s < shots; ++s) {
            const std::uint64_t j = members[rng.uniform_index(members.size())];
            samples.push_back({j, eval_at_index(j, f, g)});
        }
        return samples;
    }
    const double rate = static_cast<double>(level_size) / static_cast<double>(n);
    if (rate < 1e-6)
        throw SamplingTooSlow("sample_final: acceptance rate below 1e-6; enumerate the set instead");
    for (std::uint64_t s = 0; s < shots; ++s) {
        for (;;) {
            const std::uint64_t j = rng.uniform_index(n);
            const double v = eval_at_index(j, f, g);
            if (in_level_set(v, threshold, policy)) {
                samples.push_back({j, v});
                break;
            }
        }
    }
    return samples;
}

inline RunReport run_multistep(const ObjectiveFunction& f, const GridSpec& g,
                               const ThresholdSchedule& schedule, const RunConfig& cfg) {
    const auto wall_start = std::chrono::steady_clock::now();
    const std::uint64_t n = g.state_count();

    RunReport report;
    report.function_id = f.id;
    report.grid = g;
    report.schedule = schedule;
    report.seed = cfg.step.seed;
    report.shots = cfg.shots;
    report.levels = analyze_schedule(f, g, schedule, cfg.mixing, cfg.ties, cfg.step.seed, cfg.threads);
    report.conditions_pass = report.levels.all_pass;

    const std::size_t m = schedule.size();
    if (report.levels.steps.back().exact_size < 1)
        throw InfeasibleSchedule("run_multistep: terminal level set is empty");
    if (report.levels.steps.front().exact_size >= n)
        throw InfeasibleSchedule("run_multistep: the first threshold does not cut the state space");

    MixingParams prev = MixingParams::from_counts(n, n, n);  // H0
    CellPartition part{};
    std::vector<Complex> register_amps;
    report.steps.reserve(m);
    report.all_steps_decayed = true;

    for (std::size_t i = 0; i < m; ++i) {
        const LevelStats& level = report.levels.steps[i];
        const bool final_step = i + 1 == m;
        const MixingParams cur = final_step
                                     ? projector_params(n, level.exact_size)
                                     : MixingParams::from_counts(n, level.exact_size, level.mixing_weight);
        const CellPartition next_part = CellPartition::nested(n, prev.level_size, cur.level_size);

        StepRecord rec;
        rec.threshold = level.d;
        rec.level_size = level.exact_size;
        rec.mixing_weight = cur.mixing_weight;

        if (i == 0) {
            register_amps = previous_ground_in_cells(prev, next_part);
        } else {
            RebaseResult rebased = rebase_register(part, next_part, register_amps);
            rec.rebase_loss = rebased.loss;
            register_amps = std::move(rebased.amps);
        }
        part = next_part;

        // The probe coupling must stay well below the separation between the
        // previous operator's ground level and its nearest sector level (the
        // flat level closes in as the level sets shrink); otherwise the
        // transition leaks into that quasi-degenerate direction and the
        // repeat loop can trap the register there. Tighten c per step,
        // keeping the user's value as an upper bound.
        StepConfig step_cfg = cfg.step;
        if (!step_cfg.time_override) {
            const double alpha =
                step_cfg.alpha_override
                    ? *step_cfg.alpha_override
                    : (ground_energy(cur) - step_cfg.omega) / ground_energy(prev);
            const double separation = sector_ground_separation(prev, part, true);
            if (std::isfinite(separation))
                step_cfg.coupling = std::min(step_cfg.coupling, 0.01 * std::abs(alpha) * separation);
        }
        rec.coupling = step_cfg.coupling;

        Rng step_rng = Rng::substream(cfg.step.seed, 0x7374657000ull + i);
        const StepOutcome outcome = run_step(register_amps, prev, cur, part, step_cfg, step_rng);

        rec.e0 = outcome.e0_cur;
        rec.g0 = outcome.g0;
        rec.alpha = outcome.alpha;
        rec.time = outcome.time;
        rec.repeats = outcome.repeats;
        rec.decayed = outcome.decayed;
        rec.p0_analytic = outcome.p0_analytic;
        rec.p0_empirical = outcome.p0_empirical;
        rec.detuning = outcome.detuning;
        rec.fidelity = outcome.fidelity;
        const SpectralSummary summary = spectral_summary(cur);
        rec.gap_two_level = summary.gap;
        rec.gap_first_excited = summary.gap_to_first_excited;
        report.total_evolution_time += outcome.time * outcome.repeats;
        report.steps.push_back(rec);

        if (!outcome.decayed) {
            report.all_steps_decayed = false;
            break;
        }
        register_amps = outcome.post.register_branch(0);
        prev = cur;
    }

    if (report.all_steps_decayed) {
        report.final_cell_distribution.resize(register_amps.size());
        for (std::size_t j = 0; j < register_amps.size(); ++j)
            report.final_cell_distribution[j] = std::norm(register_amps[j]);

        Rng sample_rng = Rng::substream(cfg.step.seed, 0x73616d706c65ull);
        report.samples = sample_final(f, g, schedule.thresholds.back(), cfg.ties,
                                      report.levels.steps.back().exact_size, cfg.shots, sample_rng);
        report.best_value = std::numeric_limits<double>::infinity();
        for (const SampleRecord& s : report.samples) {
            if (s.value < report.best_value ||
                (s.value == report.best_value && s.index < report.best_index)) {
                report.best_value = s.value;
                report.best_index = s.index;
            }
        }
        report.best_point = index_to_point(make_index(report.best_index, g), g);
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    return report;
}

// Threshold placed just above the `terminal_count`-th smallest grid value
// (ties keep the whole value class), so the terminal level set is the set of
// grid minimizers when terminal_count = 1.
inline double threshold_for_terminal_count(std::vector<double> sorted_values,
                                           std::uint64_t terminal_count) {
    const std::uint64_t n = sorted_values.size();
    const std::uint64_t k = std::min<std::uint64_t>(std::max<std::uint64_t>(terminal_count, 1), n);
    const double v_k = sorted_values[k - 1];
    for (std::uint64_t j = k; j < n; ++j)
        if (sorted_values[j] > v_k) return 0.5 * (v_k + sorted_values[j]);
    return v_k + std::max(1.0, std::abs(v_k)) * 1e-6;
}

struct RefineOptions {
    double zoom = 0.1;
    int rounds = 1;
    double rate = 0.5;                // auto-schedule target reduction rate
    std::uint64_t terminal_count = 1; // target size of each round's terminal set
};

struct RefineReport {
    std::vector<RunReport> rounds;
    std::vector<double> best_point;
    double best_value = 0.0;
};

// Zoom-in refinement: each round re-grids a hypercube of side (previous
// side) * zoom centered on the incumbent best (clipped to the original
// domain), builds a fresh schedule and re-runs the multistep search. The
// incumbent never worsens.
inline RefineReport refine(const ObjectiveFunction& f, const GridSpec& base_grid,
                           std::span<const double> start_point, const RefineOptions& opts,
                           const RunConfig& cfg) {
    if (!(opts.zoom > 0.0 && opts.zoom <= 1.0)) throw std::invalid_argument("refine: zoom must be in (0,1]");
    if (opts.rounds < 1) throw std::invalid_argument("refine: rounds must be >= 1");

    RefineReport out;
    out.best_point.assign(start_point.begin(), start_point.end());
    out.best_value = f.evaluator(start_point);

    std::vector<double> side(base_grid.arity());
    for (std::size_t s = 0; s < base_grid.arity(); ++s)
        side[s] = base_grid.axes[s].hi - base_grid.axes[s].lo;

    for (int round = 1; round <= opts.rounds; ++round) {
        bool degenerate = false;
        std::vector<GridAxis> axes(base_grid.arity());
        for (std::size_t s = 0; s < base_grid.arity(); ++s) {
            side[s] *= opts.zoom;
            if (side[s] < 1e-12) {
                degenerate = true;
                break;
            }
            const GridAxis& dom = base_grid.axes[s];
            double lo = out.best_point[s] - 0.5 * side[s];
            lo = std::min(std::max(lo, dom.lo), dom.hi - side[s]);
            axes[s] = {lo, lo + side[s]};
        }
        if (degenerate) break;
        const GridSpec grid(axes, base_grid.points_per_axis);

        std::vector<double> values(grid.state_count());
        for (std::uint64_t j = 0; j < grid.state_count(); ++j)
            values[j] = eval_at_index(j, f, grid);
        std::sort(values.begin(), values.end());
        const double d_final = threshold_for_terminal_count(values, opts.terminal_count);

        AutoScheduleOptions auto_opts;
        auto_opts.policy = cfg.ties;
        auto_opts.threads = cfg.threads;
        const ThresholdSchedule schedule =
            auto_schedule(f, grid, opts.rate, d_final, cfg.step.seed ^ mix64(round), auto_opts);

        RunConfig round_cfg = cfg;
        round_cfg.step.seed = cfg.step.seed ^ mix64(0x726f756e64ull + round);
        RunReport report = run_multistep(f, grid, schedule, round_cfg);
        const bool improved = report.all_steps_decayed && report.best_value < out.best_value;
        if (improved) {
            out.best_value = report.best_value;
            out.best_point = report.best_point;
        }
        out.rounds.push_back(std::move(report));
    }
    return out;
}

} // namespace qrt
