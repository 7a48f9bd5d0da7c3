// objective.hpp - test functions, discretization grid and the index codec
//
// A continuous minimization problem is discretized on a uniform grid with the
// same number of points per variable. Grid states are labelled by a single
// integer J (mixed radix, most significant variable first) and the function
// value at state J plays the role of the diagonal problem operator.

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qrt {

// sin(z)/z with the removable singularity filled in.
inline double guarded_sinc(double z) {
    return std::abs(z) < 1e-12 ? 1.0 : std::sin(z) / z;
}

inline double eval_damavandi(double x1, double x2) {
    const double pi = std::numbers::pi;
    const double s = guarded_sinc(pi * (x1 - 2.0)) * guarded_sinc(pi * (x2 - 2.0));
    const double spike = 1.0 - std::pow(std::abs(s), 5.0);
    const double bowl = 2.0 + (x1 - 7.0) * (x1 - 7.0) + 2.0 * (x2 - 7.0) * (x2 - 7.0);
    return spike * bowl;
}

inline double eval_griewank(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("griewank: empty argument vector");
    double sum = 0.0;
    double prod = 1.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sum += x[k] * x[k];
        prod *= std::cos(x[k] / std::sqrt(static_cast<double>(k + 1)));
    }
    return sum / 4000.0 - prod + 1.0;
}

inline double eval_price(double x1, double x2) {
    const double u = std::abs(x1) - 5.0;
    const double v = std::abs(x2) - 5.0;
    return u * u + v * v;
}

struct GridAxis {
    double lo = 0.0;
    double hi = 0.0;
};

// Uniform grid, endpoints inclusive, equal point count per variable.
struct GridSpec {
    std::vector<GridAxis> axes;
    std::uint32_t points_per_axis = 0;  // l

    GridSpec() = default;
    GridSpec(std::vector<GridAxis> ax, std::uint32_t l) : axes(std::move(ax)), points_per_axis(l) {
        validate();
    }

    std::size_t arity() const { return axes.size(); }

    std::uint64_t state_count() const {  // N = l^r
        std::uint64_t n = 1;
        for (std::size_t s = 0; s < axes.size(); ++s) {
            if (n > (std::uint64_t(1) << 62) / points_per_axis)
                throw std::overflow_error("grid: state count exceeds 2^62");
            n *= points_per_axis;
        }
        return n;
    }

    // Informational qubit count: r * ceil(log2 l).
    unsigned qubit_count() const {
        unsigned bits = 0;
        while ((std::uint64_t(1) << bits) < points_per_axis) ++bits;
        return static_cast<unsigned>(axes.size()) * bits;
    }

    double step(std::size_t axis) const {
        return (axes[axis].hi - axes[axis].lo) / static_cast<double>(points_per_axis - 1);
    }

    // Coordinate of element k on one axis. Computed as lo + (k*(hi-lo))/(l-1):
    // the numerator is exact for integer k, so decimal grids land on decimal
    // values without accumulated step error.
    double coordinate(std::size_t axis, std::uint32_t k) const {
        const GridAxis& a = axes[axis];
        return a.lo + (static_cast<double>(k) * (a.hi - a.lo)) / static_cast<double>(points_per_axis - 1);
    }

    void validate() const {
        if (axes.empty()) throw std::invalid_argument("grid: no axes");
        if (points_per_axis < 2) throw std::invalid_argument("grid: need at least 2 points per axis");
        for (const auto& a : axes)
            if (!(a.hi > a.lo)) throw std::invalid_argument("grid: axis hi must exceed lo");
        (void)state_count();
    }
};

// State label J together with its per-variable digits, J = sum digits[s] * l^(r-1-s).
struct BasisIndex {
    std::uint64_t J = 0;
    std::vector<std::uint32_t> digits;
};

inline BasisIndex make_index(std::uint64_t J, const GridSpec& g) {
    const std::uint64_t n = g.state_count();
    if (J >= n) throw std::out_of_range("index: J out of range");
    BasisIndex idx;
    idx.J = J;
    idx.digits.resize(g.arity());
    std::uint64_t rem = J;
    for (std::size_t s = g.arity(); s-- > 0;) {
        idx.digits[s] = static_cast<std::uint32_t>(rem % g.points_per_axis);
        rem /= g.points_per_axis;
    }
    return idx;
}

inline std::vector<double> index_to_point(const BasisIndex& idx, const GridSpec& g) {
    if (idx.J >= g.state_count()) throw std::out_of_range("index_to_point: J out of range");
    std::vector<double> x(g.arity());
    for (std::size_t s = 0; s < g.arity(); ++s) x[s] = g.coordinate(s, idx.digits[s]);
    return x;
}

inline BasisIndex point_to_index(std::span<const double> x, const GridSpec& g) {
    if (x.size() != g.arity()) throw std::invalid_argument("point_to_index: arity mismatch");
    BasisIndex idx;
    idx.digits.resize(g.arity());
    std::uint64_t J = 0;
    for (std::size_t s = 0; s < g.arity(); ++s) {
        const double h = g.step(s);
        if (x[s] < g.axes[s].lo - 0.5 * h || x[s] > g.axes[s].hi + 0.5 * h)
            throw std::out_of_range("point_to_index: coordinate outside grid");
        auto k = static_cast<std::int64_t>(std::llround((x[s] - g.axes[s].lo) / h));
        if (k < 0) k = 0;
        if (k >= g.points_per_axis) k = g.points_per_axis - 1;
        idx.digits[s] = static_cast<std::uint32_t>(k);
        J = J * g.points_per_axis + static_cast<std::uint64_t>(k);
    }
    idx.J = J;
    return idx;
}

// An objective together with its conventional domain. The evaluator must be
// pure and finite at every grid point.
struct ObjectiveFunction {
    std::string id;
    std::size_t arity = 0;
    std::vector<GridAxis> domain;
    std::function<double(std::span<const double>)> evaluator;

    double operator()(std::span<const double> x) const { return evaluator(x); }
};

// Value of the objective at grid state J. This is the diagonal entry the
// problem operator assigns to |J>.
inline double eval_at_index(const BasisIndex& idx, const ObjectiveFunction& f, const GridSpec& g) {
    thread_local std::vector<double> x;
    x.resize(g.arity());
    for (std::size_t s = 0; s < g.arity(); ++s) x[s] = g.coordinate(s, idx.digits[s]);
    return f.evaluator(x);
}

inline double eval_at_index(std::uint64_t J, const ObjectiveFunction& f, const GridSpec& g) {
    return eval_at_index(make_index(J, g), f, g);
}

// Built-in objectives, keyed by name token.
inline ObjectiveFunction make_objective(const std::string& id, std::size_t arity = 2) {
    if (id == "damavandi") {
        return {id, 2, {{0.0, 14.0}, {0.0, 14.0}},
                [](std::span<const double> x) { return eval_damavandi(x[0], x[1]); }};
    }
    if (id == "griewank") {
        if (arity < 1) throw std::invalid_argument("griewank: arity must be >= 1");
        return {id, arity, std::vector<GridAxis>(arity, GridAxis{-40.0, 40.0}),
                [](std::span<const double> x) { return eval_griewank(x); }};
    }
    if (id == "price") {
        return {id, 2, {{-10.0, 10.0}, {-10.0, 10.0}},
                [](std::span<const double> x) { return eval_price(x[0], x[1]); }};
    }
    throw std::invalid_argument("unknown objective: " + id);
}

// Tabulated objective loaded from a plain-text file:
//   header  "r l lo1 hi1 ... lor hir"
//   then one line "J value" for every J in ascending order, no gaps.
struct TabulatedObjective {
    GridSpec grid;
    std::vector<double> values;  // indexed by J

    // The evaluator shares a copy of the table, so it stays valid after this
    // object goes away.
    ObjectiveFunction as_objective(const std::string& id = "tabulated") const {
        const GridSpec g = grid;
        auto vals = std::make_shared<const std::vector<double>>(values);
        return {id, grid.arity(), grid.axes,
                [g, vals](std::span<const double> x) {
                    return (*vals)[point_to_index(x, g).J];
                }};
    }
};

inline TabulatedObjective load_tabulated(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open tabulated function file: " + path);
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("tabulated file: missing header");
    std::istringstream hs(header);
    std::size_t r = 0;
    std::uint32_t l = 0;
    if (!(hs >> r >> l)) throw std::runtime_error("tabulated file: bad header");
    std::vector<GridAxis> axes(r);
    for (std::size_t s = 0; s < r; ++s)
        if (!(hs >> axes[s].lo >> axes[s].hi))
            throw std::runtime_error("tabulated file: bad header ranges");

    TabulatedObjective tab;
    tab.grid = GridSpec(std::move(axes), l);
    const std::uint64_t n = tab.grid.state_count();
    tab.values.resize(n);
    std::uint64_t expected = 0;
    std::uint64_t j;
    double v;
    while (in >> j >> v) {
        if (j != expected) throw std::runtime_error("tabulated file: indices must be 0..N-1 ascending");
        tab.values[j] = v;
        ++expected;
    }
    if (expected != n) throw std::runtime_error("tabulated file: missing entries");
    return tab;
}

} // namespace qrt
