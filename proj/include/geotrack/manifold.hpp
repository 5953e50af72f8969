#pragma once

#include "geotrack/numerics.hpp"

namespace geotrack {

/// Tolerance below which a point/vector is accepted as exactly feasible.
inline constexpr double kPointTol = 1e-9;
inline constexpr double kTangentTol = 1e-9;
/// Defects below this bound are silently repaired by projection/retraction;
/// anything larger is rejected.
inline constexpr double kRepairLimit = 1e-3;

/// A 2-constraint-at-most embedded submanifold of R^3, described by its
/// projection, retraction, and geodesic-correction operators in ambient
/// coordinates.
class Manifold {
public:
    virtual ~Manifold() = default;

    int ambient_dim() const { return 3; }
    virtual int dim() const = 0;

    /// Max-norm constraint violation of an ambient point.
    virtual double constraint_residual(const Vec3& q) const = 0;

    /// Map a drifted ambient point back onto the manifold.
    virtual Vec3 retract(const Vec3& x) const = 0;

    /// Orthogonal projection of w onto the tangent space at q.
    virtual Vec3 project_tangent(const Vec3& q, const Vec3& w) const = 0;

    /// Complement of project_tangent: w = tangent part + normal part exactly.
    Vec3 project_normal(const Vec3& q, const Vec3& w) const {
        return w - project_tangent(q, w);
    }

    /// Norm of the non-tangential part of w at q.
    double tangency_residual(const Vec3& q, const Vec3& w) const {
        return project_normal(q, w).norm();
    }

    /// The term (grad_v P^perp) v, so that uncontrolled dynamics reads
    /// v' = -connection_correction(q, v) and controlled dynamics
    /// v' = u - connection_correction(q, v).
    virtual Vec3 connection_correction(const Vec3& q, const Vec3& v) const = 0;

    /// Orthonormal tangent basis at q as a 3 x dim() matrix.
    virtual Mat tangent_basis(const Vec3& q) const = 0;

    /// Deterministic sample point (index k of n), used for coverage sweeps.
    virtual Vec3 sample_point(int k, int n) const = 0;
};

/// The unit sphere S^2 = { q : |q| = 1 }.
class Sphere final : public Manifold {
public:
    int dim() const override { return 2; }
    double constraint_residual(const Vec3& q) const override;
    Vec3 retract(const Vec3& x) const override;
    Vec3 project_tangent(const Vec3& q, const Vec3& w) const override;
    Vec3 connection_correction(const Vec3& q, const Vec3& v) const override;
    Mat tangent_basis(const Vec3& q) const override;
    Vec3 sample_point(int k, int n) const override;
};

/// The closed Lissajous curve L = { h1 = 0, h2 = 0 } with
///   h1 = x^2 + y^2 + z^2 - 2xyz - 1,
///   h2 = 4x^2 y - 2xz - y,
/// which carries the parameterization t -> (cos t, sin 2t, sin 3t).
class LissajousCurve final : public Manifold {
public:
    int dim() const override { return 1; }

    static Vec2 h(const Vec3& q);
    static Eigen::Matrix<double, 2, 3> h_jacobian(const Vec3& q);
    static Mat3 h1_hessian(const Vec3& q);
    static Mat3 h2_hessian(const Vec3& q);

    /// Points of the defining parameterization.
    static Vec3 curve_point(double t);
    static Vec3 curve_velocity(double t);
    static Vec3 curve_acceleration(double t);

    double constraint_residual(const Vec3& q) const override;

    /// Damped constraint-Newton retraction (at most 50 iterations, halving
    /// line search); throws RetractionFailed when the residual stays above
    /// 1e-9.
    Vec3 retract(const Vec3& x) const override;

    Vec3 project_tangent(const Vec3& q, const Vec3& w) const override;

    /// Lagrange multipliers of the geodesic equation: solves
    /// (Dh Dh^T) lambda = -(v^T D2h_i v). Throws RankDeficientConstraint
    /// when the constraint Gram matrix has condition number above 1e10.
    Vec2 geodesic_multipliers(const Vec3& q, const Vec3& v) const;

    Vec3 connection_correction(const Vec3& q, const Vec3& v) const override;
    Mat tangent_basis(const Vec3& q) const override;
    Vec3 sample_point(int k, int n) const override;

private:
    /// Orthonormalized constraint normals at q (columns).
    Eigen::Matrix<double, 3, 2> normal_basis(const Vec3& q) const;
};

/// A validated configuration: on the manifold within kPointTol, possibly
/// auto-repaired by retraction when the defect is below kRepairLimit.
class ManifoldPoint {
public:
    ManifoldPoint(const Manifold& man, const Vec3& q);

    const Vec3& value() const { return q_; }
    bool repaired() const { return repaired_; }

private:
    Vec3 q_;
    bool repaired_;
};

/// A validated tangent vector at a base point, with the same repair policy.
class TangentVector {
public:
    TangentVector(const Manifold& man, const Vec3& base, const Vec3& w);

    const Vec3& value() const { return v_; }
    bool repaired() const { return repaired_; }

private:
    Vec3 v_;
    bool repaired_;
};

}  // namespace geotrack
