// reports.hpp - file artifacts: run_report.json, trace.csv, schedule.csv,
// histogram.csv, spectral.csv
//
// CSVs use '.' decimals, LF endings, a header row and 17-significant-digit
// floats, so they are byte-stable across platforms. The JSON report is fully
// reproducible for a given config and seed except for the "timing" object.

#pragma once

#include "qrt/landscape.hpp"
#include "qrt/multistep.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <string>

namespace qrt {

inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline const char* tie_policy_name(TiePolicy p) {
    return p == TiePolicy::exclude ? "exclude" : "include";
}

inline nlohmann::ordered_json grid_to_json(const GridSpec& g) {
    nlohmann::ordered_json axes = nlohmann::ordered_json::array();
    for (const auto& a : g.axes) axes.push_back({{"lo", a.lo}, {"hi", a.hi}});
    return {{"axes", axes},
            {"points_per_axis", g.points_per_axis},
            {"state_count", g.state_count()},
            {"qubit_count", g.qubit_count()}};
}

inline nlohmann::ordered_json levels_to_json(const LevelSetReport& r) {
    nlohmann::ordered_json steps = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
        const LevelStats& s = r.steps[i];
        steps.push_back({{"i", i + 1},
                         {"d", s.d},
                         {"exact_size", s.exact_size},
                         {"boundary_ties", s.boundary_ties},
                         {"mixing_weight", s.mixing_weight},
                         {"estimate_halfwidth", s.estimate_halfwidth},
                         {"rate", s.rate},
                         {"a", s.a},
                         {"b", s.b},
                         {"c1", s.c1},
                         {"c2", s.c2},
                         {"c3", s.c3}});
    }
    return {{"state_count", r.state_count},
            {"tie_policy", tie_policy_name(r.policy)},
            {"rate_floor", r.rate_floor},
            {"all_pass", r.all_pass},
            {"steps", steps}};
}

inline nlohmann::ordered_json run_report_to_json(const RunReport& r) {
    nlohmann::ordered_json steps = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
        const StepRecord& s = r.steps[i];
        steps.push_back({{"i", i + 1},
                         {"d", s.threshold},
                         {"n_i", s.level_size},
                         {"m_i", s.mixing_weight},
                         {"e0", s.e0},
                         {"g0", s.g0},
                         {"alpha", s.alpha},
                         {"c", s.coupling},
                         {"t_i", s.time},
                         {"repeats", s.repeats},
                         {"decayed", s.decayed},
                         {"p0_analytic", s.p0_analytic},
                         {"p0_empirical", s.p0_empirical},
                         {"detuning", s.detuning},
                         {"rebase_loss", s.rebase_loss},
                         {"fidelity", s.fidelity},
                         {"gap_two_level", s.gap_two_level},
                         {"gap_first_excited", s.gap_first_excited}});
    }
    nlohmann::ordered_json samples = nlohmann::ordered_json::array();
    for (const SampleRecord& s : r.samples) samples.push_back({{"j", s.index}, {"value", s.value}});

    const auto now_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::system_clock::now().time_since_epoch())
                            .count();
    return {{"function", r.function_id},
            {"grid", grid_to_json(r.grid)},
            {"schedule",
             {{"thresholds", r.schedule.thresholds},
              {"f_min_est", r.schedule.f_min_est},
              {"f_max_est", r.schedule.f_max_est}}},
            {"levels", levels_to_json(r.levels)},
            {"steps", steps},
            {"final_cell_distribution", r.final_cell_distribution},
            {"samples", samples},
            {"best_index", r.best_index},
            {"best_point", r.best_point},
            {"best_value", r.best_value},
            {"total_evolution_time", r.total_evolution_time},
            {"shots", r.shots},
            {"seed", r.seed},
            {"conditions_pass", r.conditions_pass},
            {"all_steps_decayed", r.all_steps_decayed},
            {"timing", {{"generated_at_ms", now_ms}, {"wall_seconds", r.wall_seconds}}}};
}

inline void write_run_report_json(const RunReport& r, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << run_report_to_json(r).dump(2) << '\n';
}

inline void write_trace_csv(const RunReport& r, std::ostream& out) {
    out << "i,d,n_i,m_i,e0,g0,t_i,repeats,p0_analytic,p0_empirical\n";
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
        const StepRecord& s = r.steps[i];
        out << i + 1 << ',' << fmt17(s.threshold) << ',' << s.level_size << ',' << s.mixing_weight
            << ',' << fmt17(s.e0) << ',' << fmt17(s.g0) << ',' << fmt17(s.time) << ',' << s.repeats
            << ',' << fmt17(s.p0_analytic) << ',' << fmt17(s.p0_empirical) << '\n';
    }
}

inline void write_schedule_csv(const LevelSetReport& r, const ThresholdSchedule& sched,
                               std::ostream& out) {
    out << "i,d_i,n_i,m_i,rate,a,b,c1,c2,c3\n";
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
        const LevelStats& s = r.steps[i];
        out << i + 1 << ',' << fmt17(sched.thresholds[i]) << ',' << s.exact_size << ','
            << s.mixing_weight << ',' << fmt17(s.rate) << ',' << fmt17(s.a) << ',' << fmt17(s.b)
            << ',' << (s.c1 ? 1 : 0) << ',' << (s.c2 ? 1 : 0) << ',' << (s.c3 ? 1 : 0) << '\n';
    }
}

inline void write_histogram_csv(const Histogram& h, std::ostream& out) {
    out << "bin_lo,count\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i)
        out << fmt17(h.lo + static_cast<double>(i) * h.bin_width) << ',' << h.counts[i] << '\n';
}

inline void write_file(const std::string& path, const std::function<void(std::ostream&)>& writer) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    writer(out);
}

} // namespace qrt
