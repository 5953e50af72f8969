#pragma once

#include <vector>

#include "geotrack/manifold.hpp"
#include "geotrack/numerics.hpp"

namespace geotrack {

/// Scalar function on the ambient space whose restriction to the manifold
/// steers the error state toward a target value.
class NavigationFunction {
public:
    virtual ~NavigationFunction() = default;

    virtual double value(const Vec3& e) const = 0;

    /// Differential of the ambient extension (a plain gradient in R^3).
    virtual Vec3 ambient_differential(const Vec3& e) const = 0;
};

/// The coordinate function e -> e[axis]: linear, with constant differential.
class CoordinateNavigation final : public NavigationFunction {
public:
    explicit CoordinateNavigation(int axis);

    double value(const Vec3& e) const override { return e[axis_]; }
    Vec3 ambient_differential(const Vec3& e) const override;

private:
    int axis_;
};

/// Intrinsic gradient: tangential projection of the ambient differential.
Vec3 riemannian_gradient(const Manifold& man, const NavigationFunction& nav, const Vec3& q);

/// A refined critical point of the restricted navigation function.
struct CriticalPoint {
    Vec3 q = Vec3::Zero();
    double value = 0.0;
    /// Negative-eigenvalue count of the intrinsic Hessian:
    /// 0 = local minimum, dim = local maximum, otherwise saddle.
    int negative_directions = 0;
};

struct NavigationReport {
    std::vector<CriticalPoint> critical_points;
    int minima = 0;
    int maxima = 0;
    int saddles = 0;
    /// Worst tangency residual of the intrinsic gradient over all samples.
    double max_gradient_tangency = 0.0;
};

/// Certify the critical-point structure of the navigation function on the
/// manifold: from n_samples deterministic seeds, follow gradient descent and
/// ascent to stationarity (gradient norm below 1e-8), merge duplicates, and
/// classify each critical point by a finite-difference intrinsic Hessian in
/// the tangent chart s -> retract(q + B s). Throws DegenerateCritical when a
/// Hessian determinant falls below 1e-6 in magnitude.
NavigationReport verify_navigation(const NavigationFunction& nav, const Manifold& man,
                                   int n_samples);

}  // namespace geotrack
