#include "qrt/spectral.hpp"
#include "qrt/oracle.hpp"
#include "qrt/rng.hpp"
#include "fixtures.hpp"

#include <catch2/catch.hpp>

#include <algorithm>
#include <cmath>

using namespace qrt;

namespace {

// Expand (value, multiplicity) pairs into an ascending list.
std::vector<double> expanded_spectrum(const MixingParams& p) {
    std::vector<double> values;
    for (const EigenLevel& level : full_spectrum(p))
        values.insert(values.end(), level.multiplicity, level.value);
    std::sort(values.begin(), values.end());
    return values;
}

Eigen::MatrixXd dense_from_params(const MixingParams& p, Rng& rng) {
    auto [mask, unused] = random_nested_masks(p.state_count, p.level_size, p.level_size, rng);
    (void)unused;
    return dense_hamiltonian(p.state_count, mask, p.mixing_weight);
}

} // namespace

TEST_CASE("two-level eigenvalues") {
    SECTION("projector limits") {
        const auto [em1, ep1] = eigenpair_ab(1.0, 1.0);
        CHECK(em1 == Approx(-1.0).margin(1e-15));
        CHECK(ep1 == Approx(0.0).margin(1e-15));
        const auto [em0, ep0] = eigenpair_ab(0.37, 0.0);
        CHECK(em0 == Approx(-1.0).margin(1e-15));
        CHECK(ep0 == Approx(0.0).margin(1e-15));
    }
    SECTION("against the dense oracle at the first benchmark reduction") {
        // same (a, b) as the first reference step, realized exactly at N = 100
        const MixingParams p = MixingParams::from_counts(100, 62, 62);
        Rng rng(2);
        const DenseEigen dense = dense_eigensolve(dense_from_params(p, rng));
        const auto [em, ep] = eigenpair(p);
        // ascending dense order: E-, then N_i - 1 flat levels, then E+, zeros
        CHECK(em == Approx(dense.values(0)).margin(1e-12));
        CHECK(ep == Approx(dense.values(62)).margin(1e-12));
    }
}

TEST_CASE("energy gap anchors") {
    CHECK(energy_gap_ab(0.0, 0.5) == Approx(0.0).margin(1e-12));
    CHECK(energy_gap_ab(1.0 / 3.0, 1.0 / 3.0) ==
          Approx(std::sqrt(11.0) / (3.0 * std::sqrt(3.0))).margin(1e-12));
    CHECK(energy_gap_ab(0.77, 0.0) == Approx(1.0).margin(1e-15));

    SECTION("positive away from (0, 1/2)") {
        Rng rng(19);
        for (int i = 0; i < 2000; ++i) {
            const double a = rng.uniform(), b = rng.uniform();
            if (std::hypot(a, b - 0.5) < 0.05) continue;
            CHECK(energy_gap_ab(a, b) > 0.0);
        }
    }
}

TEST_CASE("full spectrum with multiplicities") {
    SECTION("no flat level when the set is a single state") {
        const MixingParams p = MixingParams::from_counts(4, 1, 1);
        const auto levels = full_spectrum(p);
        std::uint64_t total = 0;
        bool has_zero_pair = false;
        for (const auto& level : levels) {
            total += level.multiplicity;
            if (level.value == 0.0 && level.multiplicity == 2) has_zero_pair = true;
        }
        CHECK(total == 4);
        CHECK(has_zero_pair);
    }
    SECTION("pure uniform projector") {
        const MixingParams p = MixingParams::from_counts(16, 16, 16);
        const auto levels = full_spectrum(p);
        REQUIRE(levels.size() == 2);
        CHECK(levels[0].value == Approx(-1.0));
        CHECK(levels[0].multiplicity == 1);
        CHECK(levels[1].value == Approx(0.0).margin(1e-15));
        CHECK(levels[1].multiplicity == 15);
    }
    SECTION("matches a dense diagonalization") {
        const MixingParams p = MixingParams::from_counts(8, 4, 4);
        Rng rng(5);
        const DenseEigen dense = dense_eigensolve(dense_from_params(p, rng));
        const std::vector<double> closed = expanded_spectrum(p);
        REQUIRE(closed.size() == 8);
        for (int k = 0; k < 8; ++k)
            CHECK(closed[static_cast<std::size_t>(k)] == Approx(dense.values(k)).margin(1e-10));
    }
    SECTION("random instances against the dense oracle") {
        Rng rng(23);
        for (int trial = 0; trial < 30; ++trial) {
            const std::uint64_t n = 8 + rng.uniform_index(120);
            const std::uint64_t ni = 1 + rng.uniform_index(n);
            const std::uint64_t mi = 1 + rng.uniform_index(n);
            const MixingParams p = MixingParams::from_counts(n, ni, mi);
            const DenseEigen dense = dense_eigensolve(dense_from_params(p, rng));
            const std::vector<double> closed = expanded_spectrum(p);
            REQUIRE(closed.size() == n);
            for (std::uint64_t k = 0; k < n; ++k)
                REQUIRE(closed[k] == Approx(dense.values(static_cast<Eigen::Index>(k))).margin(1e-10));
        }
    }
}

TEST_CASE("ground components") {
    SECTION("b -> 0 collapses onto the marked block") {
        const auto [x1, x2] = ground_components_ab(0.3, 0.0);
        CHECK(x1 == 1.0);
        CHECK(x2 == 0.0);
    }
    SECTION("ratio minimum location") {
        const double a_star = (3.0 - std::sqrt(3.0)) / 2.0;
        const auto [x1, x2] = ground_components_ab(a_star, a_star);
        CHECK(x1 / x2 == Approx(2.21).margin(5e-3));
    }
    SECTION("against the dense ground vector cell averages") {
        const MixingParams p = MixingParams::from_counts(64, 32, 32);
        Rng rng(7);
        auto [mask, unused] = random_nested_masks(64, 32, 32, rng);
        (void)unused;
        const Eigen::MatrixXd h = dense_hamiltonian(64, mask, 32);
        const Eigen::VectorXd ground = dense_eigensolve(h).ground_vector();
        double inside = 0.0, outside = 0.0;
        for (int j = 0; j < 64; ++j)
            (mask[static_cast<std::size_t>(j)] ? inside : outside) += ground(j);
        inside /= std::sqrt(32.0);
        outside /= std::sqrt(32.0);
        const double sign = inside < 0 ? -1.0 : 1.0;
        const auto [x1, x2] = ground_components(p);
        CHECK(x1 == Approx(sign * inside).margin(1e-10));
        CHECK(x2 == Approx(sign * outside).margin(1e-10));
    }
    SECTION("normalization holds over the whole parameter square") {
        Rng rng(11);
        for (int i = 0; i < 10000; ++i) {
            const double a = 1e-6 + (1.0 - 2e-6) * rng.uniform();
            const double b = 1e-6 + (1.0 - 1e-6) * rng.uniform();
            const auto [x1, x2] = ground_components_ab(a, b);
            REQUIRE(std::abs(x1 * x1 + x2 * x2 - 1.0) <= 1e-12);
        }
    }
    SECTION("degenerate partitions are rejected") {
        CHECK_THROWS_AS(ground_components_ab(0.0, 0.5), std::domain_error);
        CHECK_THROWS_AS(ground_components_ab(1.0, 0.5), std::domain_error);
    }
}

TEST_CASE("adjacent-step ground-state overlap") {
    SECTION("identical operators") {
        CHECK(overlap(1000, 200, 200, 200, 200) == 1.0);
    }
    SECTION("shrunken benchmark chain step against the dense oracle") {
        const std::uint64_t n = 404, n_prev = 251, n_cur = 125;
        Rng rng(3);
        auto [prev_mask, cur_mask] = random_nested_masks(n, n_prev, n_cur, rng);
        const Eigen::VectorXd g_prev =
            dense_eigensolve(dense_hamiltonian(n, prev_mask, n_prev)).ground_vector();
        const Eigen::VectorXd g_cur =
            dense_eigensolve(dense_hamiltonian(n, cur_mask, n_cur)).ground_vector();
        const double dense = std::abs(g_prev.dot(g_cur));
        const double closed = overlap(n, n_prev, n_cur, n_prev, n_cur);
        CHECK(closed == Approx(dense).margin(1e-8));
    }
    SECTION("uniform start against the dense oracle") {
        const std::uint64_t n = 64, n_cur = 20;
        Rng rng(9);
        auto [mask, unused] = random_nested_masks(n, n_cur, n_cur, rng);
        (void)unused;
        const Eigen::VectorXd g_cur =
            dense_eigensolve(dense_hamiltonian(n, mask, n_cur)).ground_vector();
        const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(64, 1.0 / 8.0);
        const double dense = std::abs(uniform.dot(g_cur));
        const double closed = overlap(n, n, n_cur, n, n_cur);
        CHECK(closed == Approx(dense).margin(1e-10));

        const auto [x1, x2] = ground_components_ab(20.0 / 64.0, 20.0 / 64.0);
        const double a = 20.0 / 64.0;
        CHECK(closed == Approx(std::sqrt(a) * x1 + std::sqrt(1 - a) * x2).margin(1e-12));
    }
    SECTION("bounds and degradation") {
        double last = 1.0;
        for (std::uint64_t n_cur : {400ull, 200ull, 100ull, 50ull, 25ull, 12ull, 6ull, 3ull}) {
            const double g = overlap(10000, 800, n_cur, 800, n_cur);
            CHECK(g > 0.0);
            CHECK(g <= 1.0 + 1e-12);
            if (n_cur < 400) CHECK(g <= last + 1e-12);
            last = g;
        }
    }
    SECTION("nesting is enforced") {
        CHECK_THROWS_AS(overlap(100, 20, 30, 20, 30), std::invalid_argument);
    }
}

TEST_CASE("gap expansion in the mixing-weight error") {
    CHECK(gap_expansion(0.25, 0.0) ==
          Approx(std::sqrt(1.0 - 4.0 * 0.25 * 0.75 * 0.75)).margin(1e-15));
    CHECK(gap_expansion(1.0 / 3.0, 0.0) == Approx(0.6383).margin(1e-4));
    CHECK(gap_expansion(0.3, 0.01) == Approx(energy_gap_ab(0.3, 0.31)).margin(5e-5));
}

TEST_CASE("component-ratio expansion") {
    const double a_star = (3.0 - std::sqrt(3.0)) / 2.0;
    CHECK(ratio_expansion(a_star, 0.0) == Approx(2.21).margin(5e-3));

    for (double a : {0.2, 0.5, 0.8}) {
        const auto [x1, x2] = ground_components_ab(a, a);
        CHECK(ratio_expansion(a, 0.0) == Approx(x1 / x2).margin(1e-10));
    }
    // At a = 0.5 the curvature of the exact ratio is ~32, so the first-order
    // truncation carries an O(16 delta^2) remainder; check the value and the
    // quadratic shrinkage of the remainder.
    const auto [x1a, x2a] = ground_components_ab(0.5, 0.52);
    const double err_02 = std::abs(ratio_expansion(0.5, 0.02) - x1a / x2a);
    CHECK(err_02 < 8e-3);
    const auto [x1b, x2b] = ground_components_ab(0.5, 0.51);
    const double err_01 = std::abs(ratio_expansion(0.5, 0.01) - x1b / x2b);
    CHECK(err_01 == Approx(err_02 / 4.0).epsilon(0.15));

    CHECK_THROWS_AS(ratio_expansion(0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(ratio_expansion(1.0, 0.0), std::domain_error);
}

TEST_CASE("two-level gap stays open along the benchmark schedules") {
    struct Chain {
        std::uint64_t n;
        const std::vector<std::uint64_t>* sizes;
    };
    const Chain chains[] = {{78961, &fixtures::damavandi_sizes},
                            {641601, &fixtures::griewank_sizes},
                            {40401, &fixtures::price_sizes}};
    for (const Chain& chain : chains)
        for (const std::uint64_t n_i : *chain.sizes) {
            const double a = static_cast<double>(n_i) / static_cast<double>(chain.n);
            CHECK(energy_gap_ab(a, a) >= 0.05);  // exact weights: b = a
        }
}

TEST_CASE("weight condition has three equivalent forms") {
    Rng rng(29);
    for (int i = 0; i < 10000; ++i) {
        const std::uint64_t n = 1000;
        const std::uint64_t ni = 1 + rng.uniform_index(n - 1);
        const std::uint64_t mi = 1 + rng.uniform_index(n);
        const double a = static_cast<double>(ni) / 1000.0;
        const double b = static_cast<double>(mi) / 1000.0;
        const auto [x1, x2] = ground_components_ab(a, b);
        const bool weighted_inward = x1 > x2;
        const bool fraction_form = b < 1.0 / (2.0 * (1.0 - a));
        const bool integer_form = 2 * mi * (n - ni) < n * n;
        REQUIRE(weighted_inward == fraction_form);
        REQUIRE(fraction_form == integer_form);
    }
}

TEST_CASE("rank-structured coefficients reproduce the 2x2 block") {
    Rng rng(31);
    for (int i = 0; i < 200; ++i) {
        const std::uint64_t n = 4 + rng.uniform_index(1000);
        const std::uint64_t ni = 1 + rng.uniform_index(n - 1);
        const std::uint64_t mi = 1 + rng.uniform_index(n);
        const MixingParams p = MixingParams::from_counts(n, ni, mi);
        const ReducedCoefficients c = reduced_coefficients(p);
        double block[2][2];
        c.two_by_two(p, block);
        const double tr = block[0][0] + block[1][1];
        const double det = block[0][0] * block[1][1] - block[0][1] * block[1][0];
        const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
        const auto [em, ep] = eigenpair(p);
        REQUIRE(0.5 * (tr - disc) == Approx(em).margin(1e-12));
        REQUIRE(0.5 * (tr + disc) == Approx(ep).margin(1e-12));
    }
}

TEST_CASE("spectral summary orders the levels") {
    Rng rng(37);
    for (int i = 0; i < 500; ++i) {
        const std::uint64_t n = 8 + rng.uniform_index(500);
        const std::uint64_t ni = 2 + rng.uniform_index(n - 2);
        const std::uint64_t mi = 1 + rng.uniform_index(n);
        const MixingParams p = MixingParams::from_counts(n, ni, mi);
        const SpectralSummary s = spectral_summary(p);
        REQUIRE(s.e_minus <= s.flat_level + 1e-12);
        REQUIRE(s.flat_level <= s.e_plus + 1e-12);
        REQUIRE(s.e_plus <= 1e-12);
        REQUIRE(s.gap_to_first_excited <= s.gap + 1e-12);
        REQUIRE(1 + 1 + s.flat_multiplicity + s.zero_multiplicity == n);
        REQUIRE(std::abs(s.x1 * s.x1 + s.x2 * s.x2 - 1.0) <= 1e-12);
    }
    SECTION("whole space marked") {
        const SpectralSummary s = spectral_summary(MixingParams::from_counts(16, 16, 8));
        CHECK(s.e_minus == -1.0);
        CHECK(s.gap_to_first_excited == Approx(0.5));
        CHECK(1 + 1 + s.flat_multiplicity + s.zero_multiplicity == 16);
    }
}
