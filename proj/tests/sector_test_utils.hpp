// sector_test_utils.hpp - shared scaffolding for validating the collapsed
// sector against the dense oracle: random nested instances, the cell
// isometry, and dense/sector state comparisons.

#pragma once

#include "qrt/oracle.hpp"
#include "qrt/protocol.hpp"
#include "qrt/rng.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <vector>

namespace sector_utils {

using qrt::CellPartition;
using qrt::Complex;
using qrt::MixingParams;
using qrt::Rng;

struct NestedInstance {
    std::uint64_t n = 0, n_prev = 0, n_cur = 0, m_prev = 0, m_cur = 0;
    std::vector<char> prev_mask, cur_mask;

    MixingParams prev() const { return MixingParams::from_counts(n, n_prev, m_prev); }
    MixingParams cur() const { return MixingParams::from_counts(n, n_cur, m_cur); }
    CellPartition partition() const { return CellPartition::nested(n, n_prev, n_cur); }
};

inline NestedInstance random_instance(Rng& rng, std::uint64_t n_max, bool exact_weights = true) {
    NestedInstance inst;
    inst.n = 8 + rng.uniform_index(n_max - 7);
    inst.n_prev = 2 + rng.uniform_index(inst.n - 2);
    inst.n_cur = 1 + rng.uniform_index(inst.n_prev - 1);
    inst.m_prev = exact_weights ? inst.n_prev : 1 + rng.uniform_index(inst.n);
    inst.m_cur = exact_weights ? inst.n_cur : 1 + rng.uniform_index(inst.n);
    auto masks = qrt::random_nested_masks(inst.n, inst.n_prev, inst.n_cur, rng);
    inst.prev_mask = std::move(masks.first);
    inst.cur_mask = std::move(masks.second);
    return inst;
}

// Isometry from the 2k sector basis into the dense 2N space: column (bit,
// cell) is |bit> x uniform(cell), probe-|0> block first.
inline Eigen::MatrixXd sector_isometry(const NestedInstance& inst) {
    const CellPartition part = inst.partition();
    const auto n = static_cast<Eigen::Index>(inst.n);
    const int k = part.cells();
    Eigen::MatrixXd iso = Eigen::MatrixXd::Zero(2 * n, 2 * k);
    auto slot_of_state = [&](Eigen::Index j) {
        if (inst.cur_mask[static_cast<std::size_t>(j)]) return 0;
        if (inst.prev_mask[static_cast<std::size_t>(j)]) return 1;
        return 2;
    };
    for (Eigen::Index j = 0; j < n; ++j) {
        const int slot = slot_of_state(j);
        const int pos = part.position(slot);
        const double amp =
            1.0 / std::sqrt(static_cast<double>(part.slot_size[static_cast<std::size_t>(slot)]));
        iso(j, pos) = amp;                  // probe |0> block
        iso(n + j, k + pos) = amp;          // probe |1> block
    }
    return iso;
}

inline Eigen::MatrixXd dense_step_operator(const NestedInstance& inst, double omega, double alpha,
                                           double coupling) {
    const Eigen::MatrixXd h_prev = qrt::dense_hamiltonian(inst.n, inst.prev_mask, inst.m_prev);
    const Eigen::MatrixXd h_cur =
        inst.m_cur == 0
            ? qrt::dense_marked_projector_hamiltonian(inst.cur_mask)
            : qrt::dense_hamiltonian(inst.n, inst.cur_mask, inst.m_cur);
    return qrt::dense_step_hamiltonian(h_prev, h_cur, omega, alpha, coupling);
}

inline Eigen::VectorXcd embed_sector_state(const NestedInstance& inst, const qrt::SectorState& s) {
    const Eigen::MatrixXd iso = sector_isometry(inst);
    Eigen::VectorXcd amps(static_cast<Eigen::Index>(s.amps.size()));
    for (Eigen::Index j = 0; j < amps.size(); ++j) amps(j) = s.amps[static_cast<std::size_t>(j)];
    return iso.cast<Complex>() * amps;
}

inline double fidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    return std::norm(a.dot(b)) / (a.squaredNorm() * b.squaredNorm());
}

} // namespace sector_utils
