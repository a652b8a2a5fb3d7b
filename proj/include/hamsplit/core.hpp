#pragma once

// Shared vocabulary types: points, oriented hyperplanes, mass values and the
// exception hierarchy used across the library.

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hamsplit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Base class of everything the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands live in different ambient dimensions.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// An argument lies outside the domain of the operation (bad tolerance,
/// alpha outside [0,1], non-unit normal, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Configuration the library deliberately does not handle, e.g. a problem
/// whose measure count differs from the ambient dimension.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

inline constexpr double kUnitTolerance = 1e-12;

inline void require_dimension(std::ptrdiff_t got, std::ptrdiff_t want, const char* what) {
    if (got != want) {
        throw DimensionError(std::string(what) + ": dimension " + std::to_string(got) +
                             " does not match " + std::to_string(want));
    }
}

inline bool all_finite(const Vec& x) { return x.allFinite(); }

/// Oriented hyperplane H = {x : <x, normal> = offset}. The closed positive side
/// is {x : <x, normal> >= offset}.
class Hyperplane {
public:
    Hyperplane() = default;

    /// Throws DomainError unless |normal| = 1 within kUnitTolerance.
    Hyperplane(Vec normal, double offset) : normal_(std::move(normal)), offset_(offset) {
        if (normal_.size() == 0 || !all_finite(normal_) || !std::isfinite(offset_)) {
            throw DomainError("hyperplane: normal and offset must be finite");
        }
        if (std::abs(normal_.norm() - 1.0) > kUnitTolerance) {
            throw DomainError("hyperplane: normal is not a unit vector");
        }
    }

    /// Scales an arbitrary nonzero normal (and the offset with it) to unit length.
    static Hyperplane normalized(const Vec& normal, double offset) {
        const double len = normal.norm();
        if (!(len > 0.0) || !std::isfinite(len)) {
            throw DomainError("hyperplane: zero normal");
        }
        Vec unit = normal / len;
        unit /= unit.norm();
        return Hyperplane(std::move(unit), offset / len);
    }

    const Vec& normal() const { return normal_; }
    double offset() const { return offset_; }
    std::ptrdiff_t dim() const { return normal_.size(); }

    /// Signed distance of x from the hyperplane, positive on H+.
    double signed_distance(const Vec& x) const { return x.dot(normal_) - offset_; }

    bool contains_positive(const Vec& x) const { return signed_distance(x) >= 0.0; }

    /// Same point set, opposite orientation: H+ and H- swap.
    Hyperplane flipped() const { return Hyperplane(-normal_, -offset_); }

    /// The half-space on the given side (+1 or -1) as a hyperplane whose
    /// positive side is that half-space.
    Hyperplane side(int sign) const { return sign >= 0 ? *this : flipped(); }

    Hyperplane shifted(double delta) const { return Hyperplane(normal_, offset_ + delta); }

private:
    Vec normal_;
    double offset_ = 0.0;
};

/// A mass together with an error bound: value - error_bound <= true mass <=
/// value + error_bound. Closed-form evaluators report a rounding-level bound.
struct MassValue {
    double value = 0.0;
    double error_bound = 0.0;
};

/// Radius and center of a ball that contains a support.
struct Ball {
    Vec center;
    double radius = 0.0;

    bool contains(const Vec& x, double slack = 0.0) const {
        return (x - center).norm() <= radius + slack;
    }
    /// [min, max] of <x, v> over the ball.
    std::pair<double, double> projection_range(const Vec& v) const {
        const double c = center.dot(v);
        return {c - radius, c + radius};
    }
};

}  // namespace hamsplit
