#pragma once

#include "geotrack/manifold.hpp"
#include "geotrack/numerics.hpp"

namespace geotrack {

/// Value and derivative stack of a configuration error map at a pair
/// (q1, q2), plus the pair's margin to the excluded singular set.
///
/// Naming: d1 and d2 are the differentials of the map in its first and
/// second slot, as ambient 3x3 matrices. dAdB is the derivative of dB with
/// respect to slot A. Every tensor follows the contraction convention of
/// Tensor3: slot i takes the differentiation direction, slot j the vector
/// the differentiated matrix acts on, so along a curve (q1(t), q2(t)),
///   d/dt [ d1 w ] = d1d1(q1', w) + d2d1(q2', w)
///   d/dt [ d2 w ] = d1d2(q1', w) + d2d2(q2', w).
struct ErrorJet {
    Vec3 e = Vec3::Zero();
    Mat3 d1 = Mat3::Zero();
    Mat3 d2 = Mat3::Zero();
    Tensor3 d1d1{3}, d2d1{3}, d1d2{3}, d2d2{3};
    double singularity_margin = 0.0;

    bool derivatives_finite() const;
};

/// A compatible configuration error map E : M x M -> M with exact first and
/// second derivatives of a scale-invariant ambient extension.
///
/// error() is total: it returns the map value at any pair, including pairs
/// on the singular set. jet() requires a strictly positive singularity
/// margin and finite derivatives and throws SingularPair otherwise.
class ConfigurationErrorMap {
public:
    virtual ~ConfigurationErrorMap() = default;

    virtual const Manifold& manifold() const = 0;

    /// Map value E(q1, q2).
    virtual Vec3 error(const Vec3& q1, const Vec3& q2) const = 0;

    /// Positive away from the singular set and -> 0 approaching it.
    virtual double singularity_margin(const Vec3& q1, const Vec3& q2) const = 0;

    /// Value plus all first and second derivatives at (q1, q2).
    virtual ErrorJet jet(const Vec3& q1, const Vec3& q2) const = 0;

    /// The common value E(q, q) taken on the diagonal.
    virtual Vec3 diagonal_point() const = 0;

    // Convenience accessors over jet() for callers that need one piece.
    Mat3 d1(const Vec3& q1, const Vec3& q2) const { return jet(q1, q2).d1; }
    Mat3 d2(const Vec3& q1, const Vec3& q2) const { return jet(q1, q2).d2; }
    Tensor3 d1d1(const Vec3& q1, const Vec3& q2) const { return jet(q1, q2).d1d1; }
    Tensor3 d2d1(const Vec3& q1, const Vec3& q2) const { return jet(q1, q2).d2d1; }
    Tensor3 d1d2(const Vec3& q1, const Vec3& q2) const { return jet(q1, q2).d1d2; }
    Tensor3 d2d2(const Vec3& q1, const Vec3& q2) const { return jet(q1, q2).d2d2; }
};

/// Error map on the unit sphere:
///   E(q1, q2) = (||w1 x w2||, 0, -<w1, w2>),  wi = qi / ||qi||.
/// Singular exactly at antipodal pairs. The diagonal value is (0, 0, -1).
class SphereErrorMap final : public ConfigurationErrorMap {
public:
    explicit SphereErrorMap(const Sphere& sphere) : sphere_(&sphere) {}

    const Manifold& manifold() const override { return *sphere_; }
    Vec3 error(const Vec3& q1, const Vec3& q2) const override;
    double singularity_margin(const Vec3& q1, const Vec3& q2) const override;
    ErrorJet jet(const Vec3& q1, const Vec3& q2) const override;
    Vec3 diagonal_point() const override { return {0.0, 0.0, -1.0}; }

private:
    const Sphere* sphere_;
};

/// Error map on the Lissajous curve, built from the normalized alignment
/// c = <q1, q2>/(||q1|| ||q2||) and b = ||q1 x q2||/(||q1|| ||q2||):
///   E(q1, q2) = (-c, -2 b c, b (4 c^2 - 1)).
/// The value always satisfies the curve's constraint equations and is
/// defined for every pair. The derivative stack degenerates where the
/// normalized arguments are (anti)parallel, so jet() requires b > 0.
/// The diagonal value is (-1, 0, 0).
class LissajousErrorMap final : public ConfigurationErrorMap {
public:
    explicit LissajousErrorMap(const LissajousCurve& curve) : curve_(&curve) {}

    const Manifold& manifold() const override { return *curve_; }
    Vec3 error(const Vec3& q1, const Vec3& q2) const override;
    double singularity_margin(const Vec3& q1, const Vec3& q2) const override;
    ErrorJet jet(const Vec3& q1, const Vec3& q2) const override;
    Vec3 diagonal_point() const override { return {-1.0, 0.0, 0.0}; }

private:
    const LissajousCurve* curve_;
};

}  // namespace geotrack
