// fixtures.hpp - shared reference data for the test suites: the three
// benchmark grids, their threshold schedules and the reference level-set
// sizes and reduction rates.

#pragma once

#include "qrt/objective.hpp"

#include <vector>

namespace fixtures {

inline qrt::GridSpec damavandi_grid() { return qrt::GridSpec({{0, 14}, {0, 14}}, 281); }
inline qrt::GridSpec griewank_grid() { return qrt::GridSpec({{-40, 40}, {-40, 40}}, 801); }
inline qrt::GridSpec price_grid() { return qrt::GridSpec({{-10, 10}, {-10, 10}}, 201); }

inline const std::vector<double> damavandi_thresholds = {70,  30,  15,  7,    4,   3,
                                                         2.5, 2.2, 2.1, 2.02, 2.0, 1.0};
inline const std::vector<std::uint64_t> damavandi_sizes = {56634, 24939, 11573, 4452, 1772, 892,
                                                           448,   178,   94,    20,   5,    1};
inline const std::vector<double> damavandi_rates = {0.717, 0.440, 0.464, 0.385, 0.398, 0.503,
                                                    0.502, 0.397, 0.528, 0.213, 0.250, 0.200};

inline const std::vector<double> griewank_thresholds = {1.0,  0.6,  0.4,  0.3,  0.2,   0.1,
                                                        0.06, 0.04, 0.02, 0.01, 0.005, 0.002};
inline const std::vector<std::uint64_t> griewank_sizes = {197363, 76951, 34453, 18937, 8283, 2033,
                                                          723,    319,   77,    23,    5,    1};
inline const std::vector<double> griewank_rates = {0.31, 0.39, 0.45, 0.55, 0.44, 0.25,
                                                   0.36, 0.44, 0.24, 0.30, 0.22, 0.20};

inline const std::vector<double> price_thresholds = {20,  10,  5,    2,    1,   0.5,
                                                     0.2, 0.1, 0.05, 0.02, 0.01};
inline const std::vector<std::uint64_t> price_sizes = {25108, 12532, 6260, 2484, 1220, 596,
                                                       244,   116,   52,   20,   4};
inline const std::vector<double> price_rates = {0.62, 0.50, 0.50, 0.40, 0.49, 0.49,
                                                0.41, 0.48, 0.45, 0.38, 0.20};

} // namespace fixtures
