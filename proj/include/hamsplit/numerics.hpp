#pragma once

// Deterministic numerical building blocks: radial cap fractions, Halton
// points, sphere lattices and orthonormal tangent frames.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "hamsplit/core.hpp"

namespace hamsplit::numerics {

/// Fraction of the radial profile (1 - s^2)^a on [-1, 1] lying in [t, 1].
/// For a uniform ball in R^n a = (n-1)/2; a density (1 - |x|^2)^k adds k.
inline long double cap_fraction(long double t, long double a) {
    if (t >= 1.0L) return 0.0L;
    if (t <= -1.0L) return 1.0L;
    const long double abs_t = std::fabs(t);
    // near the center 1 - t^2 loses t entirely; integrate the slab [0, |t|] instead
    const long double tail = abs_t < 0.5L ? 0.5L - 0.5L * boost::math::ibeta(0.5L, a + 1.0L, abs_t * abs_t)
                                          : 0.5L * boost::math::ibeta(a + 1.0L, 0.5L, (1.0L - abs_t) * (1.0L + abs_t));
    return t >= 0.0L ? tail : 1.0L - tail;
}

/// Closed forms used as independent checks of cap_fraction.
inline double disc_cap_fraction(double t) {
    if (t >= 1.0) return 0.0;
    if (t <= -1.0) return 1.0;
    return (std::acos(t) - t * std::sqrt(1.0 - t * t)) / std::numbers::pi;
}
inline double ball3_cap_fraction(double t) {
    if (t >= 1.0) return 0.0;
    if (t <= -1.0) return 1.0;
    return (1.0 - t) * (1.0 - t) * (2.0 + t) / 4.0;
}

/// Integral of (1 - |x|^2)^k over the unit ball of R^n.
inline double unit_profile_integral(int n, int k) {
    const double half_n = 0.5 * n;
    return std::pow(std::numbers::pi, half_n) * std::tgamma(k + 1.0) / std::tgamma(half_n + k + 1.0);
}

/// Radical inverse of index in the given prime base; element of a Halton point.
inline double radical_inverse(std::uint64_t index, unsigned base) {
    double result = 0.0;
    double f = 1.0 / base;
    while (index > 0) {
        result += f * static_cast<double>(index % base);
        index /= base;
        f /= base;
    }
    return result;
}

inline constexpr std::array<unsigned, 16> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

/// Halton point with the given index in [0,1)^dim. Index 0 is skipped by
/// callers that want to avoid the origin.
inline Vec halton(std::uint64_t index, std::ptrdiff_t dim) {
    if (dim > static_cast<std::ptrdiff_t>(kPrimes.size())) {
        throw UnsupportedError("halton: dimension above 16");
    }
    Vec x(dim);
    for (std::ptrdiff_t j = 0; j < dim; ++j) x[j] = radical_inverse(index, kPrimes[static_cast<std::size_t>(j)]);
    return x;
}

/// Deterministic, roughly uniform lattice of unit vectors on S^(n-1).
///  n = 1: the two directions; n = 2: equally spaced angles;
///  n = 3: Fibonacci spiral; n > 3: Halton points pushed through the normal
///  quantile and normalized.
inline std::vector<Vec> sphere_lattice(std::ptrdiff_t n, std::size_t count) {
    std::vector<Vec> out;
    out.reserve(count);
    if (n == 1) {
        for (std::size_t i = 0; i < count; ++i) out.push_back(Vec::Constant(1, i % 2 == 0 ? 1.0 : -1.0));
        return out;
    }
    if (n == 2) {
        for (std::size_t i = 0; i < count; ++i) {
            const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(count);
            Vec v(2);
            v << std::cos(angle), std::sin(angle);
            out.push_back(std::move(v));
        }
        return out;
    }
    if (n == 3) {
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (std::size_t i = 0; i < count; ++i) {
            const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = golden * static_cast<double>(i);
            Vec v(3);
            v << r * std::cos(phi), r * std::sin(phi), z;
            out.push_back(v / v.norm());
        }
        return out;
    }
    for (std::size_t i = 0; i < count; ++i) {
        Vec u = halton(i + 1, n);
        Vec g(n);
        for (std::ptrdiff_t j = 0; j < n; ++j) {
            g[j] = std::sqrt(2.0) * boost::math::erf_inv(2.0 * u[j] - 1.0);
        }
        out.push_back(g / g.norm());
    }
    return out;
}

/// Orthonormal basis of the complement of the unit vector v, as columns.
inline Mat tangent_frame(const Vec& v) {
    const std::ptrdiff_t n = v.size();
    Mat basis(n, n);
    basis.col(0) = v;
    // Complete with the coordinate axes, skipping the one most aligned with v.
    Eigen::Index skip = 0;
    v.cwiseAbs().maxCoeff(&skip);
    Eigen::Index col = 1;
    for (Eigen::Index j = 0; j < n && col < n; ++j) {
        if (j == skip) continue;
        basis.col(col++) = Vec::Unit(n, j);
    }
    Eigen::HouseholderQR<Mat> qr(basis);
    Mat q = qr.householderQ() * Mat::Identity(n, n);
    return q.rightCols(n - 1);
}

/// Point on S^(n-1) reached from v by moving y in the tangent frame.
inline Vec chart_point(const Vec& v, const Mat& frame, const Vec& y) {
    Vec w = v + frame * y;
    return w / w.norm();
}

}  // namespace hamsplit::numerics
