#include "geotrack/errormap.hpp"

#include <cmath>

namespace geotrack {

namespace {

/// T_kij = F_k a_i b_j + G_k M_ij  (rank-one part plus a shared matrix part).
Tensor3 jet_tensor(const Vec3& f, const Vec3& a, const Vec3& b, const Vec3& g, const Mat3& m) {
    Tensor3 out(3);
    const Mat3 rank_one = a * b.transpose();
    for (int k = 0; k < 3; ++k) out.slice(k) = f[k] * rank_one + g[k] * m;
    return out;
}

}  // namespace

bool ErrorJet::derivatives_finite() const {
    return e.allFinite() && d1.allFinite() && d2.allFinite() && d1d1.all_finite() &&
           d2d1.all_finite() && d1d2.all_finite() && d2d2.all_finite();
}

// --------------------------------------------------------- SphereErrorMap

Vec3 SphereErrorMap::error(const Vec3& q1, const Vec3& q2) const {
    const Vec3 w1 = q1 / q1.norm();
    const Vec3 w2 = q2 / q2.norm();
    return {w1.cross(w2).norm(), 0.0, -w1.dot(w2)};
}

double SphereErrorMap::singularity_margin(const Vec3& q1, const Vec3& q2) const {
    const Vec3 w1 = q1 / q1.norm();
    const Vec3 w2 = q2 / q2.norm();
    const double c = w1.dot(w2);
    const double s2 = w1.cross(w2).squaredNorm();
    return s2 / (1.0 + std::abs(c));
}

ErrorJet SphereErrorMap::jet(const Vec3& q1, const Vec3& q2) const {
    const double margin = singularity_margin(q1, q2);
    if (!(margin > 0.0))
        throw SingularPair("sphere error map evaluated on its singular set");
    const double r1 = q1.norm(), r2 = q2.norm();
    const Vec3 w1 = q1 / r1, w2 = q2 / r2;
    const double c = w1.dot(w2);
    const double s = w1.cross(w2).norm();

    ErrorJet out;
    out.singularity_margin = margin;
    out.e = Vec3(s, 0.0, -c);
    const Vec3 fp(-c / s, 0.0, -1.0);
    const Vec3 fpp(-1.0 / (s * s * s), 0.0, 0.0);
    const Vec3 g1 = (w2 - c * w1) / r1;
    const Vec3 g2 = (w1 - c * w2) / r2;
    out.d1 = fp * g1.transpose();
    out.d2 = fp * g2.transpose();

    const Mat3 eye = Mat3::Identity();
    const Mat3 p1 = eye - w1 * w1.transpose();
    const Mat3 p2 = eye - w2 * w2.transpose();
    // dgA_j / dqB_i for each slot pairing.
    const Mat3 m11 = -w1 * w2.transpose() / (r1 * r1) - g1 * w1.transpose() / r1 -
                     (c / (r1 * r1)) * eye + 2.0 * c * w1 * w1.transpose() / (r1 * r1);
    const Mat3 m12 = p2 / (r1 * r2) - g2 * w1.transpose() / r1;  // d g1_j / d q2_i
    const Mat3 m21 = p1 / (r1 * r2) - g1 * w2.transpose() / r2;  // d g2_j / d q1_i
    const Mat3 m22 = -w2 * w1.transpose() / (r2 * r2) - g2 * w2.transpose() / r2 -
                     (c / (r2 * r2)) * eye + 2.0 * c * w2 * w2.transpose() / (r2 * r2);

    out.d1d1 = jet_tensor(fpp, g1, g1, fp, m11);
    out.d2d1 = jet_tensor(fpp, g2, g1, fp, m12);
    out.d1d2 = jet_tensor(fpp, g1, g2, fp, m21);
    out.d2d2 = jet_tensor(fpp, g2, g2, fp, m22);
    if (!out.derivatives_finite())
        throw SingularPair("sphere error map derivatives are non-finite at this pair");
    return out;
}

// ------------------------------------------------------ LissajousErrorMap

Vec3 LissajousErrorMap::error(const Vec3& q1, const Vec3& q2) const {
    const double r1 = q1.norm(), r2 = q2.norm();
    const double c = q1.dot(q2) / (r1 * r2);
    const double b = q1.cross(q2).norm() / (r1 * r2);
    return {-c, -2.0 * b * c, b * (4.0 * c * c - 1.0)};
}

double LissajousErrorMap::singularity_margin(const Vec3& q1, const Vec3& q2) const {
    return q1.cross(q2).norm() / (q1.norm() * q2.norm());
}

ErrorJet LissajousErrorMap::jet(const Vec3& q1, const Vec3& q2) const {
    const double margin = singularity_margin(q1, q2);
    if (!(margin > 0.0))
        throw SingularPair("curve error map evaluated on its singular set");
    const double r1 = q1.norm(), r2 = q2.norm();
    const Vec3 u1 = q1 / r1, u2 = q2 / r2;
    const double c = u1.dot(u2);
    const double b = std::sqrt(std::max(0.0, 1.0 - c * c));

    ErrorJet out;
    out.singularity_margin = margin;
    out.e = error(q1, q2);
    const Vec3 fp(-1.0, -2.0 * (1.0 - 2.0 * c * c) / b, 3.0 * c * (3.0 - 4.0 * c * c) / b);
    const double b3 = b * b * b;
    const Vec3 fpp(0.0, 2.0 * c * (3.0 - 2.0 * c * c) / b3,
                   3.0 * (3.0 - 12.0 * c * c + 8.0 * c * c * c * c) / b3);
    const Vec3 g1 = (u2 - c * u1) / r1;
    const Vec3 g2 = (u1 - c * u2) / r2;
    out.d1 = fp * g1.transpose();
    out.d2 = fp * g2.transpose();

    const Mat3 eye = Mat3::Identity();
    const Mat3 p1 = eye - u1 * u1.transpose();
    const Mat3 p2 = eye - u2 * u2.transpose();
    const Mat3 h11 = -(u1 * g1.transpose() + g1 * u1.transpose()) / r1 - c * p1 / (r1 * r1);
    const Mat3 h22 = -(u2 * g2.transpose() + g2 * u2.transpose()) / r2 - c * p2 / (r2 * r2);
    // m12_ij = d g1_j / d q2_i; the mixed partials of c make m21 = m12^T.
    const Mat3 m12 = (p2 / (r1 * r2) - u1 * g2.transpose() / r1).transpose();
    const Mat3 m21 = m12.transpose();

    out.d1d1 = jet_tensor(fpp, g1, g1, fp, h11);
    out.d2d1 = jet_tensor(fpp, g2, g1, fp, m12);
    out.d1d2 = jet_tensor(fpp, g1, g2, fp, m21);
    out.d2d2 = jet_tensor(fpp, g2, g2, fp, h22);
    if (!out.derivatives_finite())
        throw SingularPair("curve error map derivatives are non-finite at this pair");
    return out;
}

}  // namespace geotrack
