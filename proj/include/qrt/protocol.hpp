// protocol.hpp - exact simulation of the multistep resonant-transition search
//
// A probe qubit is coupled to the register; each step drives the register
// from the ground state of the previous step operator to that of the current
// one, signalled by probe decay. Every operator involved preserves the span
// of {|probe bit> x uniform(cell)} for the <=3 cells (current level set,
// previous minus current, complement of previous), so the whole step is
// simulated exactly in a <=6 dimensional sector regardless of the grid size.
// The dense oracle reproduces the same dynamics in the full 2N space for
// validation.

#pragma once

#include "qrt/landscape.hpp"
#include "qrt/objective.hpp"
#include "qrt/rng.hpp"
#include "qrt/spectral.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qrt {

using Complex = std::complex<double>;

class NoResonance : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class FitFailed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class SamplingTooSlow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Pure marked-set projector operator (the terminal chain element): b = 0.
inline MixingParams projector_params(std::uint64_t n, std::uint64_t level_size) {
    if (level_size < 1 || level_size > n)
        throw std::invalid_argument("projector params: need 1 <= N_i <= N");
    MixingParams p;
    p.state_count = n;
    p.level_size = level_size;
    p.mixing_weight = 0;
    p.a = static_cast<double>(level_size) / static_cast<double>(n);
    p.b = 0.0;
    return p;
}

// Disjoint cells spanning the state space for one step: C1 = current level
// set, C2 = previous minus current, C3 = complement of previous. Empty cells
// are dropped from the sector basis; k is the number of live cells.
struct CellPartition {
    std::uint64_t state_count = 0;
    std::array<std::uint64_t, 3> slot_size{};  // {C1, C2, C3}

    static CellPartition nested(std::uint64_t n, std::uint64_t n_prev, std::uint64_t n_cur) {
        if (!(n_cur >= 1 && n_cur <= n_prev && n_prev <= n))
            throw std::invalid_argument("cell partition: need 1 <= N_cur <= N_prev <= N");
        CellPartition p;
        p.state_count = n;
        p.slot_size = {n_cur, n_prev - n_cur, n - n_prev};
        return p;
    }

    int cells() const {
        int k = 0;
        for (auto s : slot_size) k += s > 0 ? 1 : 0;
        return k;
    }

    // Sector basis position of a slot, -1 when the slot is empty.
    int position(int slot) const {
        if (slot_size[static_cast<std::size_t>(slot)] == 0) return -1;
        int pos = 0;
        for (int s = 0; s < slot; ++s) pos += slot_size[static_cast<std::size_t>(s)] > 0 ? 1 : 0;
        return pos;
    }

    bool slot_in_prev(int slot) const { return slot <= 1; }
    bool slot_in_cur(int slot) const { return slot == 0; }
};

// Real symmetric matrix on the probe x cell sector, dimension 2k <= 6.
struct SectorMatrix {
    int dim = 0;
    double m[6][6] = {};
};

// Probe x cell amplitudes; index = bit * k + cell position.
struct SectorState {
    int cells = 0;
    std::vector<Complex> amps;

    static SectorState with_register(int k, std::span<const Complex> register_amps, int probe_bit) {
        SectorState s;
        s.cells = k;
        s.amps.assign(2 * static_cast<std::size_t>(k), Complex{0.0, 0.0});
        for (int j = 0; j < k; ++j)
            s.amps[static_cast<std::size_t>(probe_bit * k + j)] = register_amps[static_cast<std::size_t>(j)];
        return s;
    }

    double norm2() const {
        double n = 0.0;
        for (const auto& a : amps) n += std::norm(a);
        return n;
    }

    double probe_population(int bit) const {
        double p = 0.0;
        for (int j = 0; j < cells; ++j) p += std::norm(amps[static_cast<std::size_t>(bit * cells + j)]);
        return p;
    }

    // Register amplitudes of one probe branch, not renormalized.
    std::vector<Complex> register_branch(int bit) const {
        std::vector<Complex> r(static_cast<std::size_t>(cells));
        for (int j = 0; j < cells; ++j) r[static_cast<std::size_t>(j)] = amps[static_cast<std::size_t>(bit * cells + j)];
        return r;
    }
};

struct StepConfig {
    double omega = 1.0;                   // probe frequency used for the production step
    double coupling = 1e-3;               // c
    std::optional<double> alpha_override; // rescale of the previous operator
    std::optional<double> time_override;  // evolution time per repeat
    int max_repeats = 200;
    std::uint64_t seed = 0;
};

namespace detail {

// Cyclic Jacobi diagonalization for the tiny symmetric sector matrices.
inline void jacobi_eigensolve(const SectorMatrix& h, double eigvals[6], double vecs[6][6]) {
    const int n = h.dim;
    double a[6][6];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            a[i][j] = h.m[i][j];
            vecs[i][j] = i == j ? 1.0 : 0.0;
        }
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double cs = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * cs;
                for (int r = 0; r < n; ++r) {
                    const double arp = a[r][p], arq = a[r][q];
                    a[r][p] = cs * arp - sn * arq;
                    a[r][q] = sn * arp + cs * arq;
                }
                for (int r = 0; r < n; ++r) {
                    const double apr = a[p][r], aqr = a[q][r];
                    a[p][r] = cs * apr - sn * aqr;
                    a[q][r] = sn * apr + cs * aqr;
                }
                for (int r = 0; r < n; ++r) {
                    const double vrp = vecs[r][p], vrq = vecs[r][q];
                    vecs[r][p] = cs * vrp - sn * vrq;
                    vecs[r][q] = sn * vrp + cs * vrq;
                }
            }
    }
    for (int i = 0; i < n; ++i) eigvals[i] = a[i][i];
}

} // namespace detail

// Cell-basis matrix of b*H0 + (1-b)*(-P) where P projects onto the cells
// flagged as members. <u(Ci)|H0|u(Cj)> = -sqrt(|Ci||Cj|)/N.
inline void fill_cell_hamiltonian(const CellPartition& part, double b, bool project_prev,
                                  double out[3][3]) {
    const auto n = static_cast<double>(part.state_count);
    const int k = part.cells();
    double root[3];
    bool member[3];
    int pos = 0;
    for (int slot = 0; slot < 3; ++slot) {
        if (part.slot_size[static_cast<std::size_t>(slot)] == 0) continue;
        root[pos] = std::sqrt(static_cast<double>(part.slot_size[static_cast<std::size_t>(slot)]));
        member[pos] = project_prev ? part.slot_in_prev(slot) : part.slot_in_cur(slot);
        ++pos;
    }
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            out[i][j] = -b * root[i] * root[j] / n;
            if (i == j && member[i]) out[i][j] -= 1.0 - b;
        }
}

// Distance from the branch ground energy to the nearest other eigenvalue of
// the branch operator restricted to the sector cells. For a three-cell step
// this includes the flat level of the previous operator, which approaches its
// ground energy as the level sets shrink; the probe coupling must stay small
// against this separation or the transition leaks into that direction.
inline double sector_ground_separation(const MixingParams& op, const CellPartition& part,
                                       bool project_prev) {
    double cells[3][3];
    fill_cell_hamiltonian(part, op.b, project_prev, cells);
    SectorMatrix h;
    h.dim = part.cells();
    for (int i = 0; i < h.dim; ++i)
        for (int j = 0; j < h.dim; ++j) h.m[i][j] = cells[i][j];
    double eigvals[6], vecs[6][6];
    detail::jacobi_eigensolve(h, eigvals, vecs);
    double ground = eigvals[0];
    for (int i = 1; i < h.dim; ++i) ground = std::min(ground, eigvals[i]);
    double sep = std::numeric_limits<double>::infinity();
    for (int i = 0; i < h.dim; ++i)
        if (eigvals[i] > ground) sep = std::min(sep, eigvals[i] - ground);
    return sep;
}

// Sector matrix of the step operator
//   -(w/2) sz x I + alpha |1><1| x Hprev + |0><0| x Hcur + c sx x I
// restricted to span{|bit> x u(cell)}.
inline SectorMatrix build_step_hamiltonian(const MixingParams& prev, const MixingParams& cur,
                                           const CellPartition& part, const StepConfig& cfg,
                                           double alpha) {
    // A pure uniform-projector branch (b = 1) has no marked-set term, so any
    // partition is compatible with it.
    if (cur.b != 1.0 && cur.level_size != part.slot_size[0])
        throw std::invalid_argument("build_step_hamiltonian: partition does not match operators");
    if (prev.b != 1.0 && prev.level_size != part.slot_size[0] + part.slot_size[1])
        throw std::invalid_argument("build_step_hamiltonian: partition does not match operators");
    const int k = part.cells();
    if (k < 2 || k > 3) throw std::invalid_argument("build_step_hamiltonian: need 2 or 3 cells");

    double h_prev[3][3], h_cur[3][3];
    fill_cell_hamiltonian(part, prev.b, true, h_prev);
    fill_cell_hamiltonian(part, cur.b, false, h_cur);

    SectorMatrix h;
    h.dim = 2 * k;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            h.m[i][j] = h_cur[i][j];                // |0><0| block
            h.m[k + i][k + j] = alpha * h_prev[i][j];  // |1><1| block
        }
    for (int i = 0; i < k; ++i) {
        h.m[i][i] += -0.5 * cfg.omega;
        h.m[k + i][k + i] += 0.5 * cfg.omega;
        h.m[i][k + i] += cfg.coupling;
        h.m[k + i][i] += cfg.coupling;
    }
    return h;
}

inline SectorMatrix build_step_hamiltonian(const MixingParams& prev, const MixingParams& cur,
                                           const CellPartition& part, const StepConfig& cfg) {
    const double alpha = cfg.alpha_override
                             ? *cfg.alpha_override
                             : (ground_energy(cur) - cfg.omega) / ground_energy(prev);
    return build_step_hamiltonian(prev, cur, part, cfg, alpha);
}

// exp(-i H t) |state> via Jacobi eigendecomposition of the sector matrix.
inline SectorState evolve(const SectorState& state, const SectorMatrix& h, double t) {
    if (h.dim != 2 * state.cells) throw std::invalid_argument("evolve: dimension mismatch");
    for (int i = 0; i < h.dim; ++i)
        for (int j = i + 1; j < h.dim; ++j)
            if (std::abs(h.m[i][j] - h.m[j][i]) > 1e-12)
                throw std::runtime_error("evolve: sector matrix is not symmetric");

    double eigvals[6], vecs[6][6];
    detail::jacobi_eigensolve(h, eigvals, vecs);

    Complex coeffs[6];
    for (int k = 0; k < h.dim; ++k) {
        Complex c{0.0, 0.0};
        for (int j = 0; j < h.dim; ++j) c += vecs[j][k] * state.amps[static_cast<std::size_t>(j)];
        coeffs[k] = c * std::exp(Complex(0.0, -eigvals[k] * t));
    }
    SectorState out;
    out.cells = state.cells;
    out.amps.assign(static_cast<std::size_t>(h.dim), Complex{0.0, 0.0});
    for (int j = 0; j < h.dim; ++j) {
        Complex c{0.0, 0.0};
        for (int k = 0; k < h.dim; ++k) c += vecs[j][k] * coeffs[k];
        out.amps[static_cast<std::size_t>(j)] = c;
    }
    return out;
}

// Projective probe measurement: draw a bit with the branch populations,
// collapse and renormalize.
inline std::pair<int, SectorState> measure_probe(const SectorState& state, Rng& rng) {
    const double p0 = state.probe_population(0);
    int bit = rng.uniform() < p0 ? 0 : 1;
    double branch = bit == 0 ? p0 : 1.0 - p0;
    if (branch <= 0.0) {  // guard: the drawn branch carries no weight
        bit = 1 - bit;
        branch = 1.0 - branch;
    }
    SectorState collapsed;
    collapsed.cells = state.cells;
    collapsed.amps.assign(state.amps.size(), Complex{0.0, 0.0});
    const double scale = 1.0 / std::sqrt(branch);
    for (int j = 0; j < state.cells; ++j) {
        const auto idx = static_cast<std::size_t>(bit * state.cells + j);
        collapsed.amps[idx] = state.amps[idx] * scale;
    }
    return {bit, collapsed};
}

// Ground state of the previous operator expressed over the partition cells.
inline std::vector<Complex> previous_ground_in_cells(const MixingParams& prev,
                                                     const CellPartition& part) {
    const auto [x1, x2] = prev.level_size == prev.state_count
                              ? std::pair<double, double>{1.0, 0.0}
                              : ground_components(prev);
    const auto np = static_cast<double>(prev.level_size);
    const double n_out = static_cast<double>(prev.state_count) - np;
    std::vector<Complex> r(static_cast<std::size_t>(part.cells()), Complex{0.0, 0.0});
    for (int slot = 0; slot < 3; ++slot) {
        const int pos = part.position(slot);
        if (pos < 0) continue;
        const auto sz = static_cast<double>(part.slot_size[static_cast<std::size_t>(slot)]);
        r[static_cast<std::size_t>(pos)] =
            part.slot_in_prev(slot) ? x1 * std::sqrt(sz / np) : x2 * std::sqrt(sz / n_out);
    }
    return r;
}

// Ground state of the current operator over the partition cells.
inline std::vector<Complex> current_ground_in_cells(const MixingParams& cur,
                                                    const CellPartition& part) {
    const auto [x1, x2] = cur.level_size == cur.state_count
                              ? std::pair<double, double>{1.0, 0.0}
                              : ground_components(cur);
    const auto nc = static_cast<double>(cur.level_size);
    const double n_out = static_cast<double>(cur.state_count) - nc;
    std::vector<Complex> r(static_cast<std::size_t>(part.cells()), Complex{0.0, 0.0});
    for (int slot = 0; slot < 3; ++slot) {
        const int pos = part.position(slot);
        if (pos < 0) continue;
        const auto sz = static_cast<double>(part.slot_size[static_cast<std::size_t>(slot)]);
        r[static_cast<std::size_t>(pos)] =
            part.slot_in_cur(slot) ? x1 * std::sqrt(sz / nc) : x2 * std::sqrt(sz / n_out);
    }
    return r;
}

struct StepOutcome {
    bool decayed = false;
    int repeats = 0;
    SectorState post;          // post-measurement state
    double p0_analytic = 0.0;  // sin^2(c t g0)
    double p0_empirical = 0.0; // decays observed / repeats used
    double detuning = 0.0;     // omega - (E0_cur - alpha E0_prev)
    double alpha = 0.0;
    double time = 0.0;
    double e0_prev = 0.0;
    double e0_cur = 0.0;
    double g0 = 0.0;
    double fidelity = 0.0;     // |<phi_cur | post register>|^2 on decay
    double rebase_loss = 0.0;  // filled by the multistep driver
};

// One resonant-transition step: set alpha from the resonance condition,
// t = pi / (2 c g0), then evolve and measure until the probe decays or the
// repeat budget runs out.
inline StepOutcome run_step(std::span<const Complex> prev_register, const MixingParams& prev,
                            const MixingParams& cur, const CellPartition& part,
                            const StepConfig& cfg, Rng& rng) {
    const double e0_prev = ground_energy(prev);
    const double e0_cur = ground_energy(cur);
    const double g0 = overlap(part.state_count, prev.level_size, cur.level_size,
                              prev.mixing_weight, cur.mixing_weight);

    StepOutcome out;
    out.e0_prev = e0_prev;
    out.e0_cur = e0_cur;
    out.g0 = g0;
    out.alpha = cfg.alpha_override ? *cfg.alpha_override : (e0_cur - cfg.omega) / e0_prev;
    out.time = cfg.time_override ? *cfg.time_override
                                 : std::numbers::pi / (2.0 * cfg.coupling * g0);
    out.detuning = cfg.omega - (e0_cur - out.alpha * e0_prev);
    out.p0_analytic = std::pow(std::sin(cfg.coupling * out.time * g0), 2);

    const SectorMatrix h = build_step_hamiltonian(prev, cur, part, cfg, out.alpha);
    SectorState state = SectorState::with_register(part.cells(), prev_register, 1);

    int decays = 0;
    for (out.repeats = 1; out.repeats <= cfg.max_repeats; ++out.repeats) {
        state = evolve(state, h, out.time);
        auto [bit, collapsed] = measure_probe(state, rng);
        state = std::move(collapsed);
        if (bit == 0) {
            ++decays;
            out.decayed = true;
            break;
        }
    }
    if (!out.decayed) out.repeats = cfg.max_repeats;
    out.p0_empirical = static_cast<double>(decays) / static_cast<double>(out.repeats);
    out.post = state;

    if (out.decayed) {
        const std::vector<Complex> target = current_ground_in_cells(cur, part);
        Complex ip{0.0, 0.0};
        for (int j = 0; j < part.cells(); ++j)
            ip += std::conj(target[static_cast<std::size_t>(j)]) *
                  out.post.amps[static_cast<std::size_t>(j)];
        out.fidelity = std::norm(ip) / out.post.probe_population(0);
    }
    return out;
}

struct SweepPoint {
    double omega = 0.0;
    double population = 0.0;
};

struct SweepResult {
    double e0_estimate = 0.0;
    double peak_omega = 0.0;
    std::vector<SweepPoint> profile;
};

// Probe-frequency sweep with the previous operator unscaled (alpha = 1): the
// decay peak sits at omega* = E0_cur - E0_prev, which recovers E0_cur given
// E0_prev. The peak is localized by quadratic interpolation of the top three
// grid points.
inline SweepResult frequency_sweep(const MixingParams& prev, const MixingParams& cur,
                                   const CellPartition& part, const StepConfig& cfg,
                                   std::span<const double> omega_grid, double duration) {
    if (omega_grid.size() < 3) throw std::invalid_argument("frequency_sweep: need at least 3 frequencies");
    const std::vector<Complex> phi_prev = previous_ground_in_cells(prev, part);
    SweepResult res;
    res.profile.reserve(omega_grid.size());
    for (const double w : omega_grid) {
        StepConfig swept = cfg;
        swept.omega = w;
        swept.alpha_override = 1.0;
        const SectorMatrix h = build_step_hamiltonian(prev, cur, part, swept, 1.0);
        const SectorState evolved =
            evolve(SectorState::with_register(part.cells(), phi_prev, 1), h, duration);
        res.profile.push_back({w, evolved.probe_population(0)});
    }

    std::size_t peak = 0;
    std::vector<double> pops;
    pops.reserve(res.profile.size());
    for (std::size_t i = 0; i < res.profile.size(); ++i) {
        pops.push_back(res.profile[i].population);
        if (res.profile[i].population > res.profile[peak].population) peak = i;
    }
    std::nth_element(pops.begin(), pops.begin() + pops.size() / 2, pops.end());
    const double baseline = pops[pops.size() / 2];
    const double p_max = res.profile[peak].population;
    if (p_max < 1e-12 || p_max < 2.0 * baseline)
        throw NoResonance("frequency_sweep: no clear decay peak in the frequency window");

    res.peak_omega = res.profile[peak].omega;
    if (peak > 0 && peak + 1 < res.profile.size()) {
        const double pl = res.profile[peak - 1].population;
        const double pc = res.profile[peak].population;
        const double pr = res.profile[peak + 1].population;
        const double denom = pl - 2.0 * pc + pr;
        if (denom < 0.0) {
            const double h = res.profile[peak + 1].omega - res.profile[peak].omega;
            res.peak_omega += 0.5 * h * (pl - pr) / denom;
        }
    }
    res.e0_estimate = res.peak_omega + ground_energy(prev);
    return res;
}

// Overlap magnitude from the decay-probability law p(t) = sin^2(c g0 t):
// least squares over g0 on early-time samples taken at resonance.
inline double estimate_overlap_from_rabi(const MixingParams& prev, const MixingParams& cur,
                                         const CellPartition& part, const StepConfig& cfg,
                                         std::span<const double> times) {
    if (times.size() < 2) throw std::invalid_argument("estimate_overlap_from_rabi: need >= 2 time samples");
    const std::vector<Complex> phi_prev = previous_ground_in_cells(prev, part);
    const double e0_prev = ground_energy(prev);
    const double e0_cur = ground_energy(cur);

    StepConfig resonant = cfg;
    resonant.omega = e0_cur - e0_prev;  // resonance at alpha = 1
    const SectorMatrix h = build_step_hamiltonian(prev, cur, part, resonant, 1.0);

    std::vector<double> pops;
    double t_min = times[0];
    double p_max = 0.0;
    for (const double t : times) {
        t_min = std::min(t_min, t);
        const SectorState evolved =
            evolve(SectorState::with_register(part.cells(), phi_prev, 1), h, t);
        pops.push_back(evolved.probe_population(0));
        p_max = std::max(p_max, pops.back());
    }
    if (p_max < 1e-5)
        throw FitFailed("estimate_overlap_from_rabi: no decay signal at the sampled times");

    const double g_max = std::numbers::pi / (2.0 * cfg.coupling * t_min);
    auto sse = [&](double g) {
        double e = 0.0;
        for (std::size_t i = 0; i < pops.size(); ++i) {
            const double model = std::pow(std::sin(cfg.coupling * g * times[i]), 2);
            e += (model - pops[i]) * (model - pops[i]);
        }
        return e;
    };

    const int grid = 4096;
    double best_g = g_max / grid, best_e = sse(best_g);
    for (int i = 2; i <= grid; ++i) {
        const double g = g_max * i / grid;
        const double e = sse(g);
        if (e < best_e) {
            best_e = e;
            best_g = g;
        }
    }
    double lo = std::max(0.0, best_g - g_max / grid), hi = std::min(g_max, best_g + g_max / grid);
    for (int it = 0; it < 80; ++it) {  // ternary refinement
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (sse(m1) < sse(m2)) hi = m2;
        else lo = m1;
    }
    best_g = 0.5 * (lo + hi);

    const double rms = std::sqrt(sse(best_g) / static_cast<double>(pops.size()));
    if (rms > 0.1) throw FitFailed("estimate_overlap_from_rabi: residual inconsistent with sin^2 law");
    return best_g;
}

// Re-express register amplitudes over the next step's cells. Components
// outside the new span are inert for the remaining chain (orthogonal to every
// later cell-uniform vector and to the uniform state), so they are projected
// out; the discarded weight is returned and the state renormalized.
struct RebaseResult {
    std::vector<Complex> amps;
    double loss = 0.0;
};

inline RebaseResult rebase_register(const CellPartition& old_part, const CellPartition& new_part,
                                    std::span<const Complex> old_amps) {
    auto size_of = [](const CellPartition& p, int slot) {
        return static_cast<double>(p.slot_size[static_cast<std::size_t>(slot)]);
    };
    const double n1 = size_of(old_part, 0);
    const double n3p = size_of(new_part, 2);
    RebaseResult out;
    out.amps.assign(static_cast<std::size_t>(new_part.cells()), Complex{0.0, 0.0});

    auto old_amp = [&](int slot) -> Complex {
        const int pos = old_part.position(slot);
        return pos < 0 ? Complex{0.0, 0.0} : old_amps[static_cast<std::size_t>(pos)];
    };
    auto put = [&](int slot, Complex v) {
        const int pos = new_part.position(slot);
        if (pos >= 0) out.amps[static_cast<std::size_t>(pos)] += v;
    };

    // new C1', C2' partition old C1; old C2 and C3 sit inside new C3'.
    put(0, old_amp(0) * std::sqrt(size_of(new_part, 0) / n1));
    put(1, old_amp(0) * std::sqrt(size_of(new_part, 1) / n1));
    if (n3p > 0.0) {
        put(2, old_amp(1) * std::sqrt(size_of(old_part, 1) / n3p) +
                   old_amp(2) * std::sqrt(size_of(old_part, 2) / n3p));
    }

    double before = 0.0, after = 0.0;
    for (const auto& a : old_amps) before += std::norm(a);
    for (const auto& a : out.amps) after += std::norm(a);
    out.loss = std::max(0.0, before - after);
    if (after > 0.0) {
        const double scale = std::sqrt(before / after);
        for (auto& a : out.amps) a *= scale;
    }
    return out;
}

} // namespace qrt
