// landscape.hpp - level sets of an objective under threshold schedules
//
// Exact level-set counting, Monte-Carlo fraction estimation, value histograms,
// threshold-schedule construction and the algorithm's per-step admissibility
// conditions. Scans stream over the state index in fixed chunks with a
// deterministic reduction order, so counts and estimates are reproducible
// bit-for-bit for a given seed, independent of the worker count.

#pragma once

#include "qrt/objective.hpp"
#include "qrt/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

namespace qrt {

// Values within tie_tolerance(d) of a threshold are "boundary ties". The
// reference tabulations this library reproduces exclude them; the inclusive
// rule keeps them. Either way they are counted and reported separately.
enum class TiePolicy { exclude, include };

inline double tie_tolerance(double d) { return 1e-9 * std::max(1.0, std::abs(d)); }

// -1: strictly below the tie window, 0: boundary tie, +1: above.
inline int classify_value(double value, double d) {
    const double tol = tie_tolerance(d);
    if (std::abs(value - d) <= tol) return 0;
    return value < d ? -1 : 1;
}

inline bool in_level_set(double value, double d, TiePolicy policy = TiePolicy::include) {
    const int c = classify_value(value, d);
    return policy == TiePolicy::include ? c <= 0 : c < 0;
}

inline bool in_level_set(const BasisIndex& idx, const ObjectiveFunction& f, const GridSpec& g,
                         double d, TiePolicy policy = TiePolicy::include) {
    return in_level_set(eval_at_index(idx, f, g), d, policy);
}

namespace detail {

constexpr std::uint64_t kScanChunk = 1u << 16;

// Dispatch chunks [begin, end) of a range to up to `threads` workers. Each
// chunk writes only its own slot, so the combined result does not depend on
// scheduling.
template <class Fn>
void for_chunks(std::uint64_t total, std::uint64_t chunk, int threads, Fn&& fn) {
    const std::uint64_t n_chunks = total == 0 ? 0 : (total - 1) / chunk + 1;
    if (threads <= 1 || n_chunks <= 1) {
        for (std::uint64_t c = 0; c < n_chunks; ++c)
            fn(c, c * chunk, std::min(total, (c + 1) * chunk));
        return;
    }
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::uint64_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            fn(c, c * chunk, std::min(total, (c + 1) * chunk));
        }
    };
    std::vector<std::thread> pool;
    const int n_workers = static_cast<int>(std::min<std::uint64_t>(threads, n_chunks));
    pool.reserve(n_workers);
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

} // namespace detail

// One pass over the grid, counting states below / tied at every threshold.
struct LevelScan {
    std::vector<std::uint64_t> below;  // strictly below the tie window
    std::vector<std::uint64_t> ties;   // within the tie window

    std::uint64_t count(std::size_t i, TiePolicy policy) const {
        return policy == TiePolicy::include ? below[i] + ties[i] : below[i];
    }
};

inline LevelScan scan_level_sets(const ObjectiveFunction& f, const GridSpec& g,
                                 std::span<const double> thresholds, int threads = 1) {
    const std::uint64_t n = g.state_count();
    const std::size_t m = thresholds.size();
    const std::uint64_t n_chunks = n == 0 ? 0 : (n - 1) / detail::kScanChunk + 1;
    std::vector<std::uint64_t> below(n_chunks * m, 0), ties(n_chunks * m, 0);

    detail::for_chunks(n, detail::kScanChunk, threads,
                       [&](std::uint64_t c, std::uint64_t begin, std::uint64_t end) {
                           BasisIndex idx = make_index(begin, g);
                           for (std::uint64_t J = begin; J < end; ++J) {
                               if (J != begin) {
                                   // increment mixed-radix digits in place
                                   for (std::size_t s = g.arity(); s-- > 0;) {
                                       if (++idx.digits[s] < g.points_per_axis) break;
                                       idx.digits[s] = 0;
                                   }
                                   idx.J = J;
                               }
                               const double v = eval_at_index(idx, f, g);
                               for (std::size_t i = 0; i < m; ++i) {
                                   const int cls = classify_value(v, thresholds[i]);
                                   if (cls < 0) ++below[c * m + i];
                                   else if (cls == 0) ++ties[c * m + i];
                               }
                           }
                       });

    LevelScan scan;
    scan.below.assign(m, 0);
    scan.ties.assign(m, 0);
    for (std::uint64_t c = 0; c < n_chunks; ++c)
        for (std::size_t i = 0; i < m; ++i) {
            scan.below[i] += below[c * m + i];
            scan.ties[i] += ties[c * m + i];
        }
    return scan;
}

inline std::uint64_t count_level_set(const ObjectiveFunction& f, const GridSpec& g, double d,
                                     TiePolicy policy = TiePolicy::exclude, int threads = 1) {
    const double ds[1] = {d};
    return scan_level_sets(f, g, ds, threads).count(0, policy);
}

// Exhaustive enumeration of a level set's member indices.
inline std::vector<std::uint64_t> enumerate_level_set(const ObjectiveFunction& f, const GridSpec& g,
                                                      double d, TiePolicy policy = TiePolicy::exclude) {
    std::vector<std::uint64_t> members;
    const std::uint64_t n = g.state_count();
    for (std::uint64_t J = 0; J < n; ++J)
        if (in_level_set(eval_at_index(J, f, g), d, policy)) members.push_back(J);
    return members;
}

struct FractionEstimate {
    double fraction = 0.0;
    double halfwidth = 0.0;  // 95% normal-approximation half width
    std::uint64_t hits = 0;
    std::uint64_t samples = 0;

    std::uint64_t rounded_count(std::uint64_t n) const {
        return static_cast<std::uint64_t>(std::llround(fraction * static_cast<double>(n)));
    }
};

// Uniform i.i.d. sampling of grid states; the hit fraction estimates N_i / N.
inline FractionEstimate estimate_level_fraction(const ObjectiveFunction& f, const GridSpec& g,
                                                double d, std::uint64_t samples, std::uint64_t seed,
                                                TiePolicy policy = TiePolicy::include,
                                                int threads = 1) {
    if (samples < 100) throw std::invalid_argument("estimate_level_fraction: need at least 100 samples");
    const std::uint64_t n = g.state_count();
    constexpr std::uint64_t kBlock = 4096;
    const std::uint64_t n_blocks = (samples - 1) / kBlock + 1;
    std::vector<std::uint64_t> hits(n_blocks, 0);

    detail::for_chunks(samples, kBlock, threads,
                       [&](std::uint64_t b, std::uint64_t begin, std::uint64_t end) {
                           Rng rng = Rng::substream(seed, b);
                           std::uint64_t h = 0;
                           for (std::uint64_t s = begin; s < end; ++s) {
                               const std::uint64_t J = rng.uniform_index(n);
                               if (in_level_set(eval_at_index(J, f, g), d, policy)) ++h;
                           }
                           hits[b] = h;
                       });

    FractionEstimate est;
    est.samples = samples;
    for (std::uint64_t b = 0; b < n_blocks; ++b) est.hits += hits[b];
    est.fraction = static_cast<double>(est.hits) / static_cast<double>(samples);
    est.halfwidth = 1.96 * std::sqrt(est.fraction * (1.0 - est.fraction) / static_cast<double>(samples));
    return est;
}

struct Histogram {
    double bin_width = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::uint64_t> counts;
    std::uint64_t overflow = 0;  // states with value outside [lo, hi)

    std::uint64_t max_count() const {
        std::uint64_t m = 0;
        for (auto c : counts) m = std::max(m, c);
        return m;
    }
};

inline Histogram build_histogram(const ObjectiveFunction& f, const GridSpec& g, double bin_width,
                                 double lo, double hi, int threads = 1) {
    if (!(bin_width > 0.0)) throw std::invalid_argument("build_histogram: bin width must be positive");
    if (!(hi > lo)) throw std::invalid_argument("build_histogram: bad range");
    const auto n_bins = static_cast<std::size_t>(std::ceil((hi - lo) / bin_width));
    const std::uint64_t n = g.state_count();
    const std::uint64_t n_chunks = n == 0 ? 0 : (n - 1) / detail::kScanChunk + 1;

    std::vector<std::vector<std::uint64_t>> partial(n_chunks);
    std::vector<std::uint64_t> over(n_chunks, 0);
    detail::for_chunks(n, detail::kScanChunk, threads,
                       [&](std::uint64_t c, std::uint64_t begin, std::uint64_t end) {
                           auto& bins = partial[c];
                           bins.assign(n_bins, 0);
                           for (std::uint64_t J = begin; J < end; ++J) {
                               const double v = eval_at_index(J, f, g);
                               const double rel = (v - lo) / bin_width;
                               if (rel < 0.0 || rel >= static_cast<double>(n_bins)) {
                                   ++over[c];
                                   continue;
                               }
                               ++bins[static_cast<std::size_t>(rel)];
                           }
                       });

    Histogram h;
    h.bin_width = bin_width;
    h.lo = lo;
    h.hi = hi;
    h.counts.assign(n_bins, 0);
    for (std::uint64_t c = 0; c < n_chunks; ++c) {
        h.overflow += over[c];
        for (std::size_t i = 0; i < n_bins; ++i) h.counts[i] += partial[c][i];
    }
    return h;
}

// Sampled bracket of the value range. The upper end gets a 5% margin; the
// lower end a full sampled-span margin, so a sharp unseen minimum still
// falls inside the bracket.
inline std::pair<double, double> estimate_range(const ObjectiveFunction& f, const GridSpec& g,
                                                std::uint64_t samples, std::uint64_t seed) {
    if (samples < 1000) throw std::invalid_argument("estimate_range: need at least 1000 samples");
    const std::uint64_t n = g.state_count();
    Rng rng = Rng::substream(seed, 0x72616e6765ull);  // "range"
    double vmin = std::numeric_limits<double>::infinity();
    double vmax = -std::numeric_limits<double>::infinity();
    for (std::uint64_t s = 0; s < samples; ++s) {
        const double v = eval_at_index(rng.uniform_index(n), f, g);
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    double span = vmax - vmin;
    if (span == 0.0) {
        const double w = 0.05 * std::max(1.0, std::abs(vmin));
        return {vmin - w, vmax + w};
    }
    return {vmin - span, vmax + 0.05 * span};
}

struct ThresholdSchedule {
    std::vector<double> thresholds;  // strictly decreasing
    double f_min_est = 0.0;
    double f_max_est = 0.0;

    std::size_t size() const { return thresholds.size(); }

    void validate() const {
        if (thresholds.empty()) throw std::invalid_argument("schedule: empty threshold list");
        for (std::size_t i = 1; i < thresholds.size(); ++i)
            if (!(thresholds[i] < thresholds[i - 1]))
                throw std::invalid_argument("schedule: thresholds must be strictly decreasing");
        if (!(f_max_est > thresholds.front()) || !(thresholds.back() > f_min_est))
            throw std::invalid_argument("schedule: thresholds must lie inside the value bracket");
    }
};

class InfeasibleSchedule : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct AutoScheduleOptions {
    std::uint64_t samples = 100000;   // Monte-Carlo budget per fraction probe
    TiePolicy policy = TiePolicy::exclude;
    std::size_t max_steps = 64;
    int threads = 1;
};

// Threshold construction: bisection on d so that each step's estimated
// fraction is ~ rate * previous fraction (10% relative window). Fractions are
// Monte-Carlo estimates while the target stays resolvable at the sample
// budget; below that the probe falls back to exact counts over the cached
// sorted value table. Accepted thresholds are snapped to midpoints between
// adjacent distinct grid values, so the schedule is free of boundary ties.
inline ThresholdSchedule auto_schedule(const ObjectiveFunction& f, const GridSpec& g, double rate,
                                       double d_final, std::uint64_t seed,
                                       const AutoScheduleOptions& opts = {}) {
    if (!(rate >= 0.1 && rate <= 0.9)) throw std::invalid_argument("auto_schedule: rate must be in [0.1, 0.9]");
    const std::uint64_t n = g.state_count();
    if (n > 10000000ull) throw std::invalid_argument("auto_schedule: grid too large for cached scan");

    std::vector<double> sorted(n);
    for (std::uint64_t J = 0; J < n; ++J) sorted[J] = eval_at_index(J, f, g);
    std::sort(sorted.begin(), sorted.end());

    auto exact_fraction = [&](double d) {
        const double tol = tie_tolerance(d);
        const double edge = opts.policy == TiePolicy::exclude ? d - tol : d + tol;
        const auto it = opts.policy == TiePolicy::exclude
                            ? std::lower_bound(sorted.begin(), sorted.end(), edge)
                            : std::upper_bound(sorted.begin(), sorted.end(), edge);
        return static_cast<double>(it - sorted.begin()) / static_cast<double>(n);
    };

    const double terminal_fraction = exact_fraction(d_final);
    if (terminal_fraction <= 0.0)
        throw InfeasibleSchedule("auto_schedule: level set at the final threshold is empty");

    std::uint64_t probe_counter = 0;
    auto probe_fraction = [&](double d, double target) {
        const double mc_floor = 50.0 / static_cast<double>(opts.samples);
        if (target < mc_floor) return exact_fraction(d);
        return estimate_level_fraction(f, g, d, opts.samples, seed ^ mix64(probe_counter),
                                       opts.policy, opts.threads)
            .fraction;
    };

    // Snap to the midpoint between the largest in-set and smallest out-of-set
    // values, keeping the achieved count stable under either tie policy.
    auto snap = [&](double d) {
        const auto k = static_cast<std::uint64_t>(
            std::lower_bound(sorted.begin(), sorted.end(), d - tie_tolerance(d)) - sorted.begin());
        if (k == 0 || k >= n) return d;
        const double below = sorted[k - 1], above = sorted[k];
        return below < above ? 0.5 * (below + above) : d;
    };

    ThresholdSchedule sched;
    auto [fmin, fmax] = estimate_range(f, g, std::max<std::uint64_t>(1000, opts.samples / 10), seed);
    fmin = std::min(fmin, d_final - std::max(1.0, std::abs(d_final)) * 1e-6);
    sched.f_min_est = fmin;
    sched.f_max_est = fmax;

    double prev_fraction = 1.0;
    double d_hi = fmax;
    while (sched.thresholds.size() < opts.max_steps) {
        const double target = rate * prev_fraction;
        if (terminal_fraction >= 0.9 * target) {
            sched.thresholds.push_back(d_final);
            break;
        }
        double lo = d_final, hi = d_hi, d = d_final;
        for (int it = 0; it < 60; ++it) {
            d = 0.5 * (lo + hi);
            ++probe_counter;
            const double frac = probe_fraction(d, target);
            if (frac > 1.1 * target) hi = d;
            else if (frac < 0.9 * target) lo = d;
            else break;
        }
        d = snap(d);
        if (!sched.thresholds.empty() && d >= sched.thresholds.back()) {
            // Coarse value ladder: the bisection window held no distinct
            // value. Step down past the largest value class below the last
            // threshold so the schedule keeps descending.
            const double last = sched.thresholds.back();
            const auto k = static_cast<std::uint64_t>(
                std::lower_bound(sorted.begin(), sorted.end(), last - tie_tolerance(last)) -
                sorted.begin());
            if (k == 0) {
                sched.thresholds.push_back(d_final);
                break;
            }
            const double v_hi = sorted[k - 1];
            const auto j = static_cast<std::uint64_t>(
                std::lower_bound(sorted.begin(), sorted.end(), v_hi) - sorted.begin());
            d = j == 0 ? d_final : 0.5 * (sorted[j - 1] + v_hi);
        }
        if (d <= d_final) {
            sched.thresholds.push_back(d_final);
            break;
        }
        sched.thresholds.push_back(d);
        prev_fraction = exact_fraction(d);
        d_hi = d;
        if (prev_fraction <= terminal_fraction) {
            sched.thresholds.back() = d_final;
            break;
        }
    }
    if (sched.thresholds.empty() || sched.thresholds.back() != d_final)
        sched.thresholds.push_back(d_final);
    sched.validate();
    return sched;
}

// How the mixing weights M_i are chosen for a run.
struct MixingPolicy {
    enum class Kind { exact, sampled } kind = Kind::exact;
    std::uint64_t samples = 100000;  // for Kind::sampled
};

struct LevelStats {
    double d = 0.0;
    std::uint64_t exact_size = 0;     // N_i
    std::uint64_t boundary_ties = 0;  // states within the tie window of d
    std::uint64_t mixing_weight = 0;  // M_i
    double estimate_halfwidth = 0.0;  // 95% half width of M_i/N when sampled
    double rate = 0.0;                // N_i / N_{i-1}
    double a = 0.0;                   // N_i / N
    double b = 0.0;                   // M_i / N
    bool c1 = false, c2 = false, c3 = false;

    bool pass() const { return c1 && c2 && c3; }
};

struct LevelSetReport {
    std::uint64_t state_count = 0;  // N
    TiePolicy policy = TiePolicy::exclude;
    double rate_floor = 0.05;
    std::vector<LevelStats> steps;
    bool all_pass = false;
};

// Per-step admissibility: (c1) the point (a, b) stays away from (0, 1/2),
// (c2) 2 M_i (N - N_i) < N^2, equivalently the ground state stays weighted
// toward the level set, (c3) the reduction rate is bounded below.
inline void validate_schedule(LevelSetReport& report) {
    const auto n = static_cast<double>(report.state_count);
    report.all_pass = true;
    for (std::size_t i = 0; i < report.steps.size(); ++i) {
        LevelStats& s = report.steps[i];
        s.a = static_cast<double>(s.exact_size) / n;
        s.b = static_cast<double>(s.mixing_weight) / n;
        s.c1 = std::hypot(s.a, s.b - 0.5) >= 0.1 || s.a >= 0.05;
        const auto lhs = static_cast<unsigned __int128>(2) * s.mixing_weight *
                         (report.state_count - s.exact_size);
        const auto rhs = static_cast<unsigned __int128>(report.state_count) * report.state_count;
        s.c2 = lhs < rhs;
        s.c3 = s.rate >= report.rate_floor - 1e-12;
        report.all_pass = report.all_pass && s.pass();
    }
}

// Full per-step report for a schedule: exact sizes, boundary ties, mixing
// weights per policy, reduction rates and condition flags.
inline LevelSetReport analyze_schedule(const ObjectiveFunction& f, const GridSpec& g,
                                       const ThresholdSchedule& sched,
                                       const MixingPolicy& mixing = {},
                                       TiePolicy policy = TiePolicy::exclude,
                                       std::uint64_t seed = 0, int threads = 1) {
    sched.validate();
    const std::uint64_t n = g.state_count();
    const LevelScan scan = scan_level_sets(f, g, sched.thresholds, threads);

    LevelSetReport report;
    report.state_count = n;
    report.policy = policy;
    report.steps.resize(sched.size());
    std::uint64_t prev = n;
    for (std::size_t i = 0; i < sched.size(); ++i) {
        LevelStats& s = report.steps[i];
        s.d = sched.thresholds[i];
        s.exact_size = scan.count(i, policy);
        s.boundary_ties = scan.ties[i];
        if (mixing.kind == MixingPolicy::Kind::exact) {
            s.mixing_weight = s.exact_size;
        } else {
            const FractionEstimate est = estimate_level_fraction(
                f, g, s.d, mixing.samples, seed ^ mix64(i), policy, threads);
            s.mixing_weight = std::max<std::uint64_t>(1, est.rounded_count(n));
            s.estimate_halfwidth = est.halfwidth;
        }
        s.rate = prev == 0 ? 0.0 : static_cast<double>(s.exact_size) / static_cast<double>(prev);
        prev = s.exact_size;
    }
    validate_schedule(report);
    return report;
}

} // namespace qrt
