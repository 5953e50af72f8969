#include "geotrack/so3.hpp"

#include <cmath>

namespace geotrack {

Mat3 hat(const Vec3& w) {
    Mat3 s;
    s << 0.0, -w[2], w[1],
         w[2], 0.0, -w[0],
         -w[1], w[0], 0.0;
    return s;
}

Vec3 vee(const Mat3& s) {
    return 0.5 * Vec3(s(2, 1) - s(1, 2), s(0, 2) - s(2, 0), s(1, 0) - s(0, 1));
}

Mat3 exp_so3(const Vec3& w) {
    const double theta = w.norm();
    if (theta < 1e-12) return Mat3::Identity() + hat(w);
    const Mat3 k = hat(w / theta);
    return Mat3::Identity() + std::sin(theta) * k + (1.0 - std::cos(theta)) * (k * k);
}

Mat3 polar_rotation(const Mat3& a) {
    Eigen::JacobiSVD<Mat3> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 r = svd.matrixU() * svd.matrixV().transpose();
    if (r.determinant() < 0.0)
        r = svd.matrixU() * Vec3(1.0, 1.0, -1.0).asDiagonal() * svd.matrixV().transpose();
    return r;
}

double rotation_integrity(const Mat3& r) {
    return (r.transpose() * r - Mat3::Identity()).norm();
}

So3Gains::So3Gains(const Vec3& weight_diag, const Vec3& damping_diag) {
    for (int i = 0; i < 3; ++i) {
        if (!std::isfinite(weight_diag[i]) || !(weight_diag[i] > 0.0))
            throw Error("rotation error weights must be finite and positive");
        if (!std::isfinite(damping_diag[i]) || !(damping_diag[i] <= 0.0))
            throw Error("rotation damping must be finite and non-positive");
    }
    weight = weight_diag.asDiagonal();
    damping = damping_diag.asDiagonal();
}

double rotation_psi(const Mat3& weight, const Mat3& e) {
    return (weight * (Mat3::Identity() - e)).trace();
}

Vec3 rotation_psi_gradient(const Mat3& weight, const Mat3& e) {
    return vee(weight * e - e.transpose() * weight);
}

Vec3 body_connection(const Vec3& eta, const Vec3& nu, const Mat3& inertia) {
    return 0.5 * eta.cross(nu) -
           0.5 * inertia.partialPivLu().solve((inertia * nu).cross(eta) +
                                              (inertia * eta).cross(nu));
}

Vec3 agat_control_so3(const Mat3& inertia, const So3Gains& gains, const Mat3& r,
                      const Vec3& omega, const Mat3& r_ref, const Vec3& omega_ref,
                      const Vec3& domega_ref) {
    const Mat3 e = r_ref * r.transpose();
    const Vec3 eta = r * (omega_ref - omega);
    const auto lu = inertia.partialPivLu();
    const Vec3 error_accel = lu.solve((inertia * eta).cross(eta) -
                                      rotation_psi_gradient(gains.weight, e) +
                                      gains.damping * eta);
    return omega.cross(omega_ref) + domega_ref - lu.solve((inertia * omega).cross(omega)) -
           r.transpose() * error_accel;
}

Vec3 pdff_control_so3(const Mat3& inertia, const So3Gains& gains, const Mat3& r,
                      const Vec3& omega, const Mat3& r_ref, const Vec3& omega_ref,
                      const Vec3& domega_ref) {
    const Mat3 e = r_ref * r.transpose();
    const Mat3 a = r.transpose() * r_ref;
    const Vec3 w = a * omega_ref;
    return inertia.partialPivLu().solve(r.transpose() *
                                            rotation_psi_gradient(gains.weight, e) +
                                        gains.damping * (omega - w)) +
           body_connection(omega, w, inertia) + w.cross(omega) + a * domega_ref;
}

}  // namespace geotrack
