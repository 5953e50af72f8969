#include <catch2/catch_amalgamated.hpp>

#include "geotrack/manifold.hpp"

using namespace geotrack;
using Catch::Approx;

namespace {
const Sphere sphere;
const LissajousCurve curve;
}  // namespace

TEST_CASE("sphere retract normalizes and rejects degenerate input") {
    const Vec3 q = sphere.retract(Vec3(3.0, 0.0, -4.0));
    REQUIRE((q - Vec3(0.6, 0.0, -0.8)).norm() < 1e-15);
    REQUIRE_THROWS_AS(sphere.retract(Vec3::Zero()), RetractionFailed);
}

TEST_CASE("sphere tangent projection is orthogonal, idempotent, symmetric") {
    for (int k = 0; k < 100; ++k) {
        const Vec3 q = sphere.sample_point(k, 100);
        const Vec3 w(std::sin(3.0 * k), std::cos(5.0 * k), std::sin(7.0 * k + 1.0));
        const Vec3 p = sphere.project_tangent(q, w);
        REQUIRE(std::abs(p.dot(q)) < 1e-12);
        REQUIRE((sphere.project_tangent(q, p) - p).norm() < 1e-12);
        REQUIRE(std::abs(p.dot(w - p)) < 1e-12);
    }
}

TEST_CASE("sphere connection correction is the centripetal term") {
    const Vec3 q(0.0, 0.0, 1.0);
    const Vec3 v(2.0, -1.0, 0.0);
    REQUIRE((sphere.connection_correction(q, v) - v.squaredNorm() * q).norm() < 1e-14);
}

TEST_CASE("sphere tangent basis is orthonormal and tangent") {
    for (int k = 0; k < 50; ++k) {
        const Vec3 q = sphere.sample_point(k, 50);
        const Mat B = sphere.tangent_basis(q);
        REQUIRE(B.rows() == 3);
        REQUIRE(B.cols() == 2);
        REQUIRE((B.transpose() * B - Mat::Identity(2, 2)).norm() < 1e-12);
        REQUIRE((B.transpose() * q).norm() < 1e-12);
    }
}

TEST_CASE("sphere sample points are deterministic and well spread") {
    for (int k = 0; k < 200; ++k) {
        const Vec3 a = sphere.sample_point(k, 200);
        REQUIRE(sphere.constraint_residual(a) < 1e-12);
        REQUIRE((a - sphere.sample_point(k, 200)).norm() == 0.0);
    }
    REQUIRE((sphere.sample_point(0, 10) - sphere.sample_point(9, 10)).norm() > 1.0);
}

TEST_CASE("lissajous constraints vanish along the defining curve") {
    for (int i = 0; i < 1000; ++i) {
        const double t = -M_PI + 2.0 * M_PI * (i + 0.5) / 1000.0;
        const Vec2 h = LissajousCurve::h(LissajousCurve::curve_point(t));
        REQUIRE(h.cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("lissajous constraint jacobian at (1,0,0)") {
    const auto Dh = LissajousCurve::h_jacobian(Vec3(1.0, 0.0, 0.0));
    Eigen::Matrix<double, 2, 3> expected;
    expected << 2, 0, 0, 0, 3, -2;
    REQUIRE((Dh - expected).norm() < 1e-14);
}

TEST_CASE("lissajous curve derivatives are consistent") {
    for (double t : {0.3, 1.1, 2.7, -0.9}) {
        const double h = 1e-6;
        const Vec3 v_fd =
            (LissajousCurve::curve_point(t + h) - LissajousCurve::curve_point(t - h)) /
            (2.0 * h);
        const Vec3 a_fd =
            (LissajousCurve::curve_velocity(t + h) - LissajousCurve::curve_velocity(t - h)) /
            (2.0 * h);
        REQUIRE((v_fd - LissajousCurve::curve_velocity(t)).norm() < 1e-7);
        REQUIRE((a_fd - LissajousCurve::curve_acceleration(t)).norm() < 1e-7);
    }
}

TEST_CASE("lissajous hessians match finite differences of the jacobian") {
    const Vec3 q = LissajousCurve::curve_point(0.8);
    const double h = 1e-6;
    for (int i = 0; i < 3; ++i) {
        Vec3 dq = Vec3::Zero();
        dq[i] = h;
        const auto dJ =
            (LissajousCurve::h_jacobian(q + dq) - LissajousCurve::h_jacobian(q - dq)) /
            (2.0 * h);
        for (int j = 0; j < 3; ++j) {
            REQUIRE(dJ(0, j) == Approx(LissajousCurve::h1_hessian(q)(i, j)).margin(1e-6));
            REQUIRE(dJ(1, j) == Approx(LissajousCurve::h2_hessian(q)(i, j)).margin(1e-6));
        }
    }
}

TEST_CASE("lissajous retraction pulls nearby points onto the curve") {
    for (int k = 0; k < 40; ++k) {
        const double t = 2.0 * M_PI * k / 40.0;
        const Vec3 q = LissajousCurve::curve_point(t);
        const Vec3 off = q + 1e-4 * Vec3(std::sin(9.0 * t), std::cos(4.0 * t), 0.7);
        const Vec3 back = curve.retract(off);
        REQUIRE(curve.constraint_residual(back) < 1e-9);
        REQUIRE((back - q).norm() < 1e-3);
    }
}

TEST_CASE("lissajous tangent projection and basis at (1,0,0)") {
    const Vec3 q(1.0, 0.0, 0.0);
    const Vec3 p = curve.project_tangent(q, Vec3(0.0, 1.0, 0.0));
    REQUIRE((p - Vec3(0.0, 4.0 / 13.0, 6.0 / 13.0)).norm() < 1e-13);
    const Mat B = curve.tangent_basis(q);
    REQUIRE(B.rows() == 3);
    REQUIRE(B.cols() == 1);
    const Vec3 dir = Vec3(0.0, 2.0, 3.0) / std::sqrt(13.0);
    REQUIRE(std::min((B.col(0) - dir).norm(), (B.col(0) + dir).norm()) < 1e-12);
}

TEST_CASE("lissajous connection correction at (1,0,0)") {
    const Vec3 q(1.0, 0.0, 0.0);
    const Vec3 v = Vec3(0.0, 2.0, 3.0) / std::sqrt(13.0);
    const Vec3 corr = curve.connection_correction(q, v);
    REQUIRE((corr - Vec3(1.0 / 13.0, 0.0, 0.0)).norm() < 1e-12);
}

TEST_CASE("lissajous tangent basis is a unit tangent along the curve") {
    for (int k = 0; k < 60; ++k) {
        const Vec3 q = curve.sample_point(k, 60);
        const Mat B = curve.tangent_basis(q);
        REQUIRE(B.col(0).norm() == Approx(1.0).epsilon(1e-12));
        REQUIRE((LissajousCurve::h_jacobian(q) * B.col(0)).norm() < 1e-9);
    }
}

TEST_CASE("validated points accept, repair, or reject by defect size") {
    const Vec3 good(0.0, 0.0, 1.0);
    REQUIRE_FALSE(ManifoldPoint(sphere, good).repaired());

    const Vec3 small_defect = good * (1.0 + 1e-6);
    const ManifoldPoint repaired(sphere, small_defect);
    REQUIRE(repaired.repaired());
    REQUIRE(sphere.constraint_residual(repaired.value()) < 1e-12);

    REQUIRE_THROWS_AS(ManifoldPoint(sphere, good * 1.5), OffManifold);
}

TEST_CASE("validated tangent vectors follow the same repair policy") {
    const Vec3 q(1.0, 0.0, 0.0);
    const Vec3 tangent(0.0, 2.0, 0.0);
    REQUIRE_FALSE(TangentVector(sphere, q, tangent).repaired());

    const TangentVector repaired(sphere, q, tangent + 1e-6 * q);
    REQUIRE(repaired.repaired());
    REQUIRE(sphere.tangency_residual(q, repaired.value()) < 1e-12);

    REQUIRE_THROWS_AS(TangentVector(sphere, q, tangent + 0.5 * q), NotTangent);
}
