#pragma once

#include <gtest/gtest.h>

#include <random>

#include "hamsplit.hpp"

namespace hamsplit::testing {

inline Vec vec(std::initializer_list<double> xs) {
    Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

inline PointSet unit_square() { return {vec({0, 0}), vec({1, 0}), vec({1, 1}), vec({0, 1})}; }

inline Vec random_unit(std::mt19937_64& rng, std::ptrdiff_t n) {
    std::normal_distribution<double> g;
    Vec v(n);
    for (auto& x : v) x = g(rng);
    return v.normalized();
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace hamsplit::testing
