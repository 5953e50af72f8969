#pragma once

#include "geotrack/numerics.hpp"

namespace geotrack {

/// Skew-symmetric matrix of w: hat(w) x = w cross x.
Mat3 hat(const Vec3& w);

/// Inverse of hat on the skew-symmetric part: vee(S)_k from the
/// antisymmetric entries of S, so vee(hat(w)) = w exactly.
Vec3 vee(const Mat3& s);

/// Rodrigues exponential of the rotation vector w.
Mat3 exp_so3(const Vec3& w);

/// Nearest rotation to a (near-orthogonal) matrix by SVD polar factor,
/// with the determinant sign corrected into the proper rotation group.
Mat3 polar_rotation(const Mat3& a);

/// Frobenius distance of R^T R from the identity.
double rotation_integrity(const Mat3& r);

/// Attitude-tracking gains: a positive diagonal weight matrix for the
/// rotation error function and a non-positive diagonal damping matrix.
struct So3Gains {
    So3Gains(const Vec3& weight_diag, const Vec3& damping_diag);

    Mat3 weight;   // positive diagonal, distinct entries give isolated critical points
    Mat3 damping;  // non-positive diagonal
};

/// Rotation error function psi(E) = tr(P (I - E)) >= 0, zero iff E = I.
double rotation_psi(const Mat3& weight, const Mat3& e);

/// Gradient vector of psi in the convention
///   d/ds psi(E exp(s hat(w)))|_0 = <rotation_psi_gradient(P, E), w>.
Vec3 rotation_psi_gradient(const Mat3& weight, const Mat3& e);

/// Bi-invariant-metric connection term of the rigid body in body frame.
Vec3 body_connection(const Vec3& eta, const Vec3& nu, const Mat3& inertia);

/// Error-dynamics tracking law on the rotation group. The returned u is the
/// angular acceleration input of the plant Omega' = I^-1 (I Omega x Omega) + u.
/// E = R_ref R^T, eta = R (Omega_ref - Omega).
Vec3 agat_control_so3(const Mat3& inertia, const So3Gains& gains, const Mat3& r,
                      const Vec3& omega, const Mat3& r_ref, const Vec3& omega_ref,
                      const Vec3& domega_ref);

/// Transport-based PD-plus-feedforward comparison law on the rotation group,
/// same plant convention and gain semantics as agat_control_so3.
Vec3 pdff_control_so3(const Mat3& inertia, const So3Gains& gains, const Mat3& r,
                      const Vec3& omega, const Mat3& r_ref, const Vec3& omega_ref,
                      const Vec3& domega_ref);

}  // namespace geotrack
