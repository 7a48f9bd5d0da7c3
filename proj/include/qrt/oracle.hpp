// oracle.hpp - brute-force reference implementations for validation
//
// Dense operator assembly in the full computational basis, dense symmetric
// eigensolve, dense time evolution and exhaustive grid minimization. Hard
// size caps keep these unusable at production scale on purpose; tests use
// proportionally shrunken instances with the same (a, b).

#pragma once

#include "qrt/objective.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace qrt {

constexpr std::uint64_t kDenseAssemblyCap = 4096;
constexpr Eigen::Index kDenseEvolveCap = 512;
constexpr std::uint64_t kBruteForceCap = 10000000;

// -|psi0><psi0| on N states: every entry -1/N.
inline Eigen::MatrixXd dense_uniform_projector_hamiltonian(std::uint64_t n) {
    if (n > kDenseAssemblyCap) throw std::invalid_argument("dense oracle: size cap exceeded");
    const auto nn = static_cast<Eigen::Index>(n);
    return Eigen::MatrixXd::Constant(nn, nn, -1.0 / static_cast<double>(n));
}

// -sum_{q in A} |q><q| for a membership mask.
inline Eigen::MatrixXd dense_marked_projector_hamiltonian(const std::vector<char>& mask) {
    if (mask.size() > kDenseAssemblyCap) throw std::invalid_argument("dense oracle: size cap exceeded");
    const auto n = static_cast<Eigen::Index>(mask.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        if (mask[static_cast<std::size_t>(j)]) h(j, j) = -1.0;
    return h;
}

// (M/N) H0 + (1 - M/N) HP in the full computational basis.
inline Eigen::MatrixXd dense_hamiltonian(std::uint64_t n, const std::vector<char>& mask,
                                         std::uint64_t mixing_weight) {
    if (n > kDenseAssemblyCap) throw std::invalid_argument("dense oracle: size cap exceeded");
    if (mask.size() != n) throw std::invalid_argument("dense oracle: mask size mismatch");
    bool any = false;
    for (char c : mask) any = any || c;
    if (!any) throw std::invalid_argument("dense oracle: marked set is empty");
    const double b = static_cast<double>(mixing_weight) / static_cast<double>(n);
    return b * dense_uniform_projector_hamiltonian(n) +
           (1.0 - b) * dense_marked_projector_hamiltonian(mask);
}

// Full (2N)x(2N) step operator: -(w/2) sz x I + alpha |1><1| x Hprev
// + |0><0| x Hcur + c sx x I. Basis order: probe bit major, |0> block first.
inline Eigen::MatrixXd dense_step_hamiltonian(const Eigen::MatrixXd& h_prev,
                                              const Eigen::MatrixXd& h_cur, double omega,
                                              double alpha, double coupling) {
    if (h_prev.rows() != h_cur.rows()) throw std::invalid_argument("dense oracle: block size mismatch");
    const Eigen::Index n = h_prev.rows();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    h.topLeftCorner(n, n) = h_cur;
    h.topLeftCorner(n, n).diagonal().array() += -0.5 * omega;
    h.bottomRightCorner(n, n) = alpha * h_prev;
    h.bottomRightCorner(n, n).diagonal().array() += 0.5 * omega;
    h.topRightCorner(n, n).diagonal().setConstant(coupling);
    h.bottomLeftCorner(n, n).diagonal().setConstant(coupling);
    return h;
}

inline void require_symmetric(const Eigen::MatrixXd& h, const char* who) {
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument(std::string(who) + ": matrix is not symmetric");
}

struct DenseEigen {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // columns match values

    Eigen::VectorXd ground_vector() const { return vectors.col(0); }
};

inline DenseEigen dense_eigensolve(const Eigen::MatrixXd& h) {
    require_symmetric(h, "dense_eigensolve");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success) throw std::runtime_error("dense_eigensolve: failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

// exp(-i H t) |state> through the eigendecomposition of the real symmetric H.
inline Eigen::VectorXcd dense_evolve(const Eigen::MatrixXd& h, const Eigen::VectorXcd& state,
                                     double t) {
    if (h.rows() > kDenseEvolveCap) throw std::invalid_argument("dense_evolve: size cap exceeded");
    if (state.size() != h.rows()) throw std::invalid_argument("dense_evolve: state size mismatch");
    const DenseEigen eig = dense_eigensolve(h);
    Eigen::VectorXcd coeffs = eig.vectors.transpose() * state;
    for (Eigen::Index k = 0; k < coeffs.size(); ++k)
        coeffs(k) *= std::exp(std::complex<double>(0.0, -eig.values(k) * t));
    return eig.vectors * coeffs;
}

// One fully assembled dense reference instance: the membership mask, the
// mixing weight and the three operators built from them. The mixed operator
// follows the rank-structured pattern in the reduced (marked, border) basis:
// diagonal -(M/N^2 + 1 - M/N) on the marked block, off-diagonal -M/N^2,
// border -M sqrt(N - N_i)/N^2 and corner -M (N - N_i)/N^2.
struct DenseInstance {
    std::uint64_t state_count = 0;
    std::vector<char> mask;
    std::uint64_t mixing_weight = 0;
    Eigen::MatrixXd uniform;    // -|psi0><psi0|
    Eigen::MatrixXd projector;  // -sum_{q in A} |q><q|
    Eigen::MatrixXd mixed;      // (M/N) uniform-part + (1 - M/N) projector

    static DenseInstance make(std::uint64_t n, std::vector<char> membership,
                              std::uint64_t mixing_weight) {
        DenseInstance inst;
        inst.state_count = n;
        inst.mask = std::move(membership);
        inst.mixing_weight = mixing_weight;
        inst.uniform = dense_uniform_projector_hamiltonian(n);
        inst.projector = dense_marked_projector_hamiltonian(inst.mask);
        inst.mixed = dense_hamiltonian(n, inst.mask, mixing_weight);
        return inst;
    }

    // Full probe-coupled step operator with this instance as the |0> branch.
    Eigen::MatrixXd step_operator(const Eigen::MatrixXd& h_prev, double omega, double alpha,
                                  double coupling) const {
        return dense_step_hamiltonian(h_prev, mixed, omega, alpha, coupling);
    }
};

struct BruteForceResult {
    BasisIndex argmin;                     // smallest-J minimizer
    double value = 0.0;                    // minimum over the grid
    std::vector<std::uint64_t> minimizers; // every J attaining the minimum exactly
};

inline BruteForceResult brute_force_minimum(const ObjectiveFunction& f, const GridSpec& g) {
    const std::uint64_t n = g.state_count();
    if (n > kBruteForceCap) throw std::invalid_argument("brute_force_minimum: grid too large");
    BruteForceResult r;
    r.value = std::numeric_limits<double>::infinity();
    for (std::uint64_t J = 0; J < n; ++J) {
        const double v = eval_at_index(J, f, g);
        if (v < r.value) {
            r.value = v;
            r.minimizers.assign(1, J);
        } else if (v == r.value) {
            r.minimizers.push_back(J);
        }
    }
    r.argmin = make_index(r.minimizers.front(), g);
    return r;
}

// Random nested membership masks with prescribed sizes, for test instances.
template <class RngT>
std::pair<std::vector<char>, std::vector<char>> random_nested_masks(std::uint64_t n,
                                                                    std::uint64_t size_prev,
                                                                    std::uint64_t size_cur,
                                                                    RngT& rng) {
    if (!(size_cur >= 1 && size_cur <= size_prev && size_prev <= n))
        throw std::invalid_argument("random_nested_masks: need 1 <= cur <= prev <= N");
    std::vector<std::uint64_t> order(n);
    for (std::uint64_t j = 0; j < n; ++j) order[j] = j;
    for (std::uint64_t j = n - 1; j > 0; --j)
        std::swap(order[j], order[rng.uniform_index(j + 1)]);
    std::vector<char> prev(n, 0), cur(n, 0);
    for (std::uint64_t j = 0; j < size_prev; ++j) prev[order[j]] = 1;
    for (std::uint64_t j = 0; j < size_cur; ++j) cur[order[j]] = 1;
    return {prev, cur};
}

} // namespace qrt
