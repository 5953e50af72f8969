#include "geotrack/manifold.hpp"

#include <cmath>

namespace geotrack {

// ---------------------------------------------------------------- Sphere

double Sphere::constraint_residual(const Vec3& q) const {
    return std::abs(q.norm() - 1.0);
}

Vec3 Sphere::retract(const Vec3& x) const {
    const double n = x.norm();
    if (!(n > 0.0) || !std::isfinite(n))
        throw RetractionFailed("sphere retraction undefined at the origin");
    return x / n;
}

Vec3 Sphere::project_tangent(const Vec3& q, const Vec3& w) const {
    return w - q.dot(w) * q;
}

Vec3 Sphere::connection_correction(const Vec3& q, const Vec3& v) const {
    return v.dot(v) * q;
}

Mat Sphere::tangent_basis(const Vec3& q) const {
    const Vec3 a = std::abs(q[0]) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
    Vec3 b1 = a - q.dot(a) * q;
    b1.normalize();
    const Vec3 b2 = q.cross(b1);
    Mat basis(3, 2);
    basis.col(0) = b1;
    basis.col(1) = b2;
    return basis;
}

Vec3 Sphere::sample_point(int k, int n) const {
    // Fibonacci lattice: deterministic, near-uniform coverage.
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    const double z = 1.0 - 2.0 * (k + 0.5) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * k;
    return {r * std::cos(phi), r * std::sin(phi), z};
}

// -------------------------------------------------------- LissajousCurve

Vec2 LissajousCurve::h(const Vec3& q) {
    const double x = q[0], y = q[1], z = q[2];
    return {x * x + y * y + z * z - 2.0 * x * y * z - 1.0,
            4.0 * x * x * y - 2.0 * x * z - y};
}

Eigen::Matrix<double, 2, 3> LissajousCurve::h_jacobian(const Vec3& q) {
    const double x = q[0], y = q[1], z = q[2];
    Eigen::Matrix<double, 2, 3> jac;
    jac << 2.0 * x - 2.0 * y * z, 2.0 * y - 2.0 * x * z, 2.0 * z - 2.0 * x * y,
           8.0 * x * y - 2.0 * z, 4.0 * x * x - 1.0,     -2.0 * x;
    return jac;
}

Mat3 LissajousCurve::h1_hessian(const Vec3& q) {
    const double x = q[0], y = q[1], z = q[2];
    Mat3 hess;
    hess << 2.0,      -2.0 * z, -2.0 * y,
            -2.0 * z, 2.0,      -2.0 * x,
            -2.0 * y, -2.0 * x, 2.0;
    return hess;
}

Mat3 LissajousCurve::h2_hessian(const Vec3& q) {
    const double x = q[0], y = q[1];
    Mat3 hess;
    hess << 8.0 * y, 8.0 * x, -2.0,
            8.0 * x, 0.0,     0.0,
            -2.0,    0.0,     0.0;
    return hess;
}

Vec3 LissajousCurve::curve_point(double t) {
    return {std::cos(t), std::sin(2.0 * t), std::sin(3.0 * t)};
}

Vec3 LissajousCurve::curve_velocity(double t) {
    return {-std::sin(t), 2.0 * std::cos(2.0 * t), 3.0 * std::cos(3.0 * t)};
}

Vec3 LissajousCurve::curve_acceleration(double t) {
    return {-std::cos(t), -4.0 * std::sin(2.0 * t), -9.0 * std::sin(3.0 * t)};
}

double LissajousCurve::constraint_residual(const Vec3& q) const {
    return h(q).cwiseAbs().maxCoeff();
}

Vec3 LissajousCurve::retract(const Vec3& x) const {
    Vec3 q = x;
    for (int it = 0; it < 50; ++it) {
        const Vec2 r = h(q);
        if (r.cwiseAbs().maxCoeff() < 1e-12) break;
        const Eigen::Matrix<double, 2, 3> jac = h_jacobian(q);
        const Eigen::Matrix2d gram = jac * jac.transpose();
        const Vec2 lambda = gram.partialPivLu().solve(-r);
        const Vec3 step = jac.transpose() * lambda;
        if (!step.allFinite())
            throw RetractionFailed("curve retraction: constraint normals degenerate");
        double t = 1.0;
        const double before = r.squaredNorm();
        while (t > 1e-6 && h(q + t * step).squaredNorm() >= before) t *= 0.5;
        q += t * step;
    }
    if (!(h(q).cwiseAbs().maxCoeff() < 1e-9))
        throw RetractionFailed("curve retraction did not converge");
    return q;
}

Eigen::Matrix<double, 3, 2> LissajousCurve::normal_basis(const Vec3& q) const {
    const Eigen::Matrix<double, 2, 3> jac = h_jacobian(q);
    Vec3 n1 = jac.row(0);
    const double n1n = n1.norm();
    if (!(n1n > 1e-12)) throw RankDeficientConstraint("first constraint normal vanishes");
    n1 /= n1n;
    Vec3 n2 = jac.row(1).transpose() - n1.dot(jac.row(1)) * n1;
    const double n2n = n2.norm();
    if (!(n2n > 1e-12)) throw RankDeficientConstraint("constraint normals colinear");
    n2 /= n2n;
    Eigen::Matrix<double, 3, 2> basis;
    basis.col(0) = n1;
    basis.col(1) = n2;
    return basis;
}

Vec3 LissajousCurve::project_tangent(const Vec3& q, const Vec3& w) const {
    const Eigen::Matrix<double, 3, 2> normals = normal_basis(q);
    return w - normals * (normals.transpose() * w);
}

Vec2 LissajousCurve::geodesic_multipliers(const Vec3& q, const Vec3& v) const {
    const Eigen::Matrix<double, 2, 3> jac = h_jacobian(q);
    const Eigen::Matrix2d gram = jac * jac.transpose();
    // Condition estimate of the symmetric positive 2x2 Gram matrix.
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(gram);
    const double lo = eig.eigenvalues()(0), hi = eig.eigenvalues()(1);
    if (!(lo > 0.0) || hi / lo > 1e10)
        throw RankDeficientConstraint("constraint Gram matrix near rank-deficient");
    const Vec2 rhs(-v.dot(h1_hessian(q) * v), -v.dot(h2_hessian(q) * v));
    return gram.ldlt().solve(rhs);
}

Vec3 LissajousCurve::connection_correction(const Vec3& q, const Vec3& v) const {
    const Vec2 lambda = geodesic_multipliers(q, v);
    const Eigen::Matrix<double, 2, 3> jac = h_jacobian(q);
    return -(lambda[0] * jac.row(0).transpose() + lambda[1] * jac.row(1).transpose());
}

Mat LissajousCurve::tangent_basis(const Vec3& q) const {
    const Eigen::Matrix<double, 3, 2> normals = normal_basis(q);
    Vec3 t = normals.col(0).cross(normals.col(1));
    t.normalize();
    Mat basis(3, 1);
    basis.col(0) = t;
    return basis;
}

Vec3 LissajousCurve::sample_point(int k, int n) const {
    return curve_point(2.0 * M_PI * k / n);
}

// ------------------------------------------------- validated state types

ManifoldPoint::ManifoldPoint(const Manifold& man, const Vec3& q) : q_(q), repaired_(false) {
    const double r = man.constraint_residual(q);
    if (r <= kPointTol) return;
    if (r < kRepairLimit) {
        q_ = man.retract(q);
        repaired_ = true;
        return;
    }
    throw OffManifold("point violates the manifold constraint beyond the repair band");
}

TangentVector::TangentVector(const Manifold& man, const Vec3& base, const Vec3& w)
    : v_(w), repaired_(false) {
    const double r = man.tangency_residual(base, w);
    if (r <= kTangentTol) return;
    if (r < kRepairLimit) {
        v_ = man.project_tangent(base, w);
        repaired_ = true;
        return;
    }
    throw NotTangent("vector violates tangency beyond the repair band");
}

}  // namespace geotrack
