// spectral.hpp - closed-form eigenstructure of the intermediate operators
//
// Each step of the multistep search works with H = b*H0 + (1-b)*HP, where H0
// is minus the projector onto the uniform superposition over all N states and
// HP is minus the projector onto a marked subset of size N_i. With a = N_i/N
// and b = M_i/N the whole spectrum is known in closed form: a 2x2 block in
// the span of the two cell-uniform vectors, a flat level -(1-b) inside the
// marked block and a zero level outside. Everything here is that closed form;
// the dense oracle validates it from the other direction.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qrt {

struct MixingParams {
    std::uint64_t state_count = 0;    // N
    std::uint64_t level_size = 0;     // N_i
    std::uint64_t mixing_weight = 0;  // M_i
    double a = 0.0;                   // N_i / N
    double b = 0.0;                   // M_i / N

    static MixingParams from_counts(std::uint64_t n, std::uint64_t level_size,
                                    std::uint64_t mixing_weight) {
        if (level_size < 1 || level_size > n)
            throw std::invalid_argument("mixing params: need 1 <= N_i <= N");
        if (mixing_weight < 1 || mixing_weight > n)
            throw std::invalid_argument("mixing params: need 0 < M_i <= N");
        MixingParams p;
        p.state_count = n;
        p.level_size = level_size;
        p.mixing_weight = mixing_weight;
        p.a = static_cast<double>(level_size) / static_cast<double>(n);
        p.b = static_cast<double>(mixing_weight) / static_cast<double>(n);
        return p;
    }
};

// Radicand of the 2x2 block eigenvalues, in product form 1 - 4b(1-a)(1-b)
// (equal to 1 - 4b + 4ab + 4b^2 - 4ab^2 but free of cancellation for small
// a, b).
inline double spectral_radicand(double a, double b) {
    return 1.0 - 4.0 * b * (1.0 - a) * (1.0 - b);
}

inline std::pair<double, double> eigenpair_ab(double a, double b) {
    const double r = spectral_radicand(a, b);
    if (r < 0.0) throw std::domain_error("eigenpair: negative radicand");
    const double s = std::sqrt(r);
    return {-0.5 - 0.5 * s, -0.5 + 0.5 * s};
}

inline std::pair<double, double> eigenpair(const MixingParams& p) { return eigenpair_ab(p.a, p.b); }

// Gap E+ - E- of the 2x2 block. Zero only at (a, b) = (0, 1/2).
inline double energy_gap_ab(double a, double b) { return std::sqrt(spectral_radicand(a, b)); }

inline double energy_gap(const MixingParams& p) { return energy_gap_ab(p.a, p.b); }

inline double ground_energy(const MixingParams& p) { return eigenpair(p).first; }

// Raw component ratio x1/x2 of the ground vector in the basis of the two
// cell-uniform directions (marked block, complement).
inline double ground_ratio_ab(double a, double b) {
    if (!(a > 0.0 && a < 1.0)) throw std::domain_error("ground components: need a in (0,1)");
    if (b <= 0.0) return std::numeric_limits<double>::infinity();
    const double s = std::sqrt(spectral_radicand(a, b));
    return (1.0 + s) / (2.0 * b * std::sqrt(a * (1.0 - a))) - std::sqrt(1.0 / a - 1.0);
}

// Normalized ground components (x1, x2), x1^2 + x2^2 = 1, x2 > 0. The b -> 0
// limit is (1, 0): the ground space collapses onto the marked block.
inline std::pair<double, double> ground_components_ab(double a, double b) {
    if (!(a > 0.0 && a < 1.0)) throw std::domain_error("ground components: need a in (0,1)");
    if (b <= 0.0) return {1.0, 0.0};
    const double raw = ground_ratio_ab(a, b);
    if (std::abs(raw) > 1e150) return {raw > 0 ? 1.0 : -1.0, 1.0 / std::abs(raw)};
    const double norm = std::sqrt(1.0 + raw * raw);
    return {raw / norm, 1.0 / norm};
}

inline std::pair<double, double> ground_components(const MixingParams& p) {
    return ground_components_ab(p.a, p.b);
}

struct EigenLevel {
    double value = 0.0;
    std::uint64_t multiplicity = 0;
};

// Complete spectrum with multiplicities: {E-, E+, -(1-b) x (N_i - 1),
// 0 x (N - N_i - 1)}. When the marked set is the whole space there is no
// border direction and the spectrum degenerates to {-1, -(1-b) x (N-1)}.
inline std::vector<EigenLevel> full_spectrum(const MixingParams& p) {
    std::vector<EigenLevel> levels;
    if (p.level_size == p.state_count) {
        levels.push_back({-1.0, 1});
        if (p.state_count > 1) levels.push_back({-(1.0 - p.b), p.state_count - 1});
        return levels;
    }
    const auto [em, ep] = eigenpair(p);
    levels.push_back({em, 1});
    levels.push_back({ep, 1});
    if (p.level_size >= 2) levels.push_back({-(1.0 - p.b), p.level_size - 1});
    if (p.state_count > p.level_size + 1) levels.push_back({0.0, p.state_count - p.level_size - 1});
    return levels;
}

// Ordered summary of one step operator. `gap` is the 2x2 block gap E+ - E-;
// `gap_to_first_excited` is the distance from the ground level to the nearest
// level above it, which is the flat level -(1-b) whenever N_i >= 2.
struct SpectralSummary {
    double e_minus = 0.0;
    double e_plus = 0.0;
    double gap = 0.0;
    double gap_to_first_excited = 0.0;
    double flat_level = 0.0;
    std::uint64_t flat_multiplicity = 0;
    std::uint64_t zero_multiplicity = 0;
    double x1 = 0.0;
    double x2 = 0.0;
};

inline SpectralSummary spectral_summary(const MixingParams& p) {
    SpectralSummary s;
    if (p.level_size == p.state_count) {
        // whole space marked: {-1, -(1-b) x (N-1)}; the listed e_plus is the
        // first of the flat levels
        s.e_minus = -1.0;
        s.flat_level = s.e_plus = -(1.0 - p.b);
        s.gap = s.gap_to_first_excited = p.b;
        s.flat_multiplicity = p.state_count - 2;
        s.zero_multiplicity = 0;
        s.x1 = 1.0;
        s.x2 = 0.0;
        return s;
    }
    const auto [em, ep] = eigenpair(p);
    s.e_minus = em;
    s.e_plus = ep;
    s.gap = ep - em;
    s.flat_level = -(1.0 - p.b);
    s.flat_multiplicity = p.level_size >= 1 ? p.level_size - 1 : 0;
    s.zero_multiplicity = p.state_count - p.level_size - 1;
    s.gap_to_first_excited = s.flat_multiplicity > 0 ? s.flat_level - em : ep - em;
    auto [x1, x2] = ground_components(p);
    s.x1 = x1;
    s.x2 = x2;
    return s;
}

// Overlap <V-(prev) | V-(cur)> between ground states of two nested step
// operators sharing the state space. The previous step may be the uniform
// superposition itself (N_prev = N) and the current one a pure projector
// (M_cur = 0); both reduce to components (1, 0).
inline double overlap(std::uint64_t n, std::uint64_t n_prev, std::uint64_t n_cur,
                      std::uint64_t m_prev, std::uint64_t m_cur) {
    if (!(n_cur <= n_prev && n_prev <= n) || n_cur < 1)
        throw std::invalid_argument("overlap: need 1 <= N_cur <= N_prev <= N");
    if (n_prev == n_cur && m_prev == m_cur) return 1.0;

    const auto nd = static_cast<double>(n);
    const auto np = static_cast<double>(n_prev);
    const auto nc = static_cast<double>(n_cur);

    const auto [x1p, x2p] = n_prev == n
                                ? std::pair<double, double>{1.0, 0.0}
                                : ground_components_ab(np / nd, static_cast<double>(m_prev) / nd);
    const auto [x1c, x2c] = m_cur == 0
                                ? std::pair<double, double>{1.0, 0.0}
                                : ground_components_ab(nc / nd, static_cast<double>(m_cur) / nd);

    double g = std::sqrt(nc / np) * x1p * x1c;
    g += (np - nc) / std::sqrt(np * (nd - nc)) * x1p * x2c;
    if (n > n_prev) g += std::sqrt((nd - np) / (nd - nc)) * x2p * x2c;
    return g;
}

// Gap at b = a + delta expanded to second order in delta. R0 = 1 - 4a(1-a)^2
// is the on-diagonal radicand; the leading term sqrt(R0) has its minimum
// sqrt(11/27) at a = 1/3.
inline double gap_expansion(double a, double delta) {
    const double r0 = 1.0 - 4.0 * a * (1.0 - a) * (1.0 - a);
    const double s0 = std::sqrt(r0);
    const double first = -2.0 * (1.0 - a) * (1.0 - 2.0 * a) / s0;
    const double second = 2.0 * a * (1.0 - a) / (r0 * s0);
    return s0 + first * delta + second * delta * delta;
}

// Component ratio x1/x2 at b = a + delta expanded to first order in delta.
// The leading term has its minimum 2.21 at a = (3 - sqrt(3))/2.
inline double ratio_expansion(double a, double delta) {
    if (!(a > 0.0 && a < 1.0)) throw std::domain_error("ratio_expansion: need a in (0,1)");
    const double r0 = 1.0 - 4.0 * a * (1.0 - a) * (1.0 - a);
    const double s0 = std::sqrt(r0);
    const double root_a = std::sqrt(a * (1.0 - a));
    const double lead = (1.0 - 2.0 * a + 2.0 * a * a + s0) / (2.0 * a * root_a);
    const double slope = -(1.0 - 2.0 * a + 2.0 * a * a + s0) / (2.0 * a * a * root_a * s0);
    return lead + slope * delta;
}

// Coefficients of the rank-structured form of the step operator in the
// reduced (marked states, border) basis: H = alpha e e^T + beta (e e_n^T +
// e_n e^T) + (gamma - 2 beta) e_n e_n^T - (1 - b) I.
struct ReducedCoefficients {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;

    // The 2x2 block this form induces on {uniform(marked), border}; its
    // eigenvalues reproduce eigenpair().
    void two_by_two(const MixingParams& p, double out[2][2]) const {
        const auto ni = static_cast<double>(p.level_size);
        const double shift = -(1.0 - p.b);
        out[0][0] = alpha * ni + shift;
        out[0][1] = out[1][0] = (alpha + beta) * std::sqrt(ni);
        out[1][1] = alpha + gamma + shift;
    }
};

inline ReducedCoefficients reduced_coefficients(const MixingParams& p) {
    const auto n = static_cast<double>(p.state_count);
    const auto m = static_cast<double>(p.mixing_weight);
    const double root = std::sqrt(n - static_cast<double>(p.level_size)) - 1.0;
    ReducedCoefficients c;
    c.alpha = -m / (n * n);
    c.beta = -m * root / (n * n);
    c.gamma = 2.0 * c.beta + 1.0 - m / n - m * root * root / (n * n);
    return c;
}

// (a, b, E-, E+, gap, x1, x2) table over a mesh, one row per point.
inline void emit_spectral_table(std::ostream& out, std::span<const double> a_mesh,
                                std::span<const double> b_mesh) {
    out << "a,b,e_minus,e_plus,gap,x1,x2\n";
    char buf[256];
    for (const double a : a_mesh)
        for (const double b : b_mesh) {
            const auto [em, ep] = eigenpair_ab(a, b);
            double x1 = 1.0, x2 = 0.0;
            if (a > 0.0 && a < 1.0) {
                auto [c1, c2] = ground_components_ab(a, b);
                x1 = c1;
                x2 = c2;
            }
            std::snprintf(buf, sizeof buf,
                          "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                          a, b, em, ep, ep - em, x1, x2);
            out << buf;
        }
}

} // namespace qrt
