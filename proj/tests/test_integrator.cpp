#include <catch2/catch_amalgamated.hpp>

#include <cstring>

#include "geotrack/integrator.hpp"

using namespace geotrack;
using Catch::Approx;

namespace {
const Sphere sphere;
const LissajousCurve curve;
const SphereErrorMap sphere_map(sphere);
const CoordinateNavigation height(2);
}  // namespace

TEST_CASE("rk4 step reproduces the exponential to fifth order") {
    const auto f = [](double, const Vec& y) { return y; };
    Vec y(1);
    y << 1.0;
    const Vec next = rk4_step(f, 0.0, y, 0.1);
    REQUIRE(std::abs(next[0] - std::exp(0.1)) < 9e-8);
}

TEST_CASE("rk4 step leaves the state unchanged under zero dynamics") {
    const auto f = [](double, const Vec& y) { return Vec(Vec::Zero(y.size())); };
    Vec y(3);
    y << 1.0, -2.0, 3.0;
    const Vec next = rk4_step(f, 0.0, y, 0.5);
    REQUIRE((next - y).norm() == 0.0);
}

TEST_CASE("rk4 global error shrinks sixteen-fold under step halving") {
    const auto f = [](double, const Vec& y) { return Vec(-y); };
    const auto run = [&](double dt) {
        Vec y(1);
        y << 1.0;
        const int n = static_cast<int>(std::lround(1.0 / dt));
        for (int k = 0; k < n; ++k) y = rk4_step(f, k * dt, y, dt);
        return std::abs(y[0] - std::exp(-1.0));
    };
    const double ratio = run(0.02) / run(0.01);
    REQUIRE(ratio > 12.0);
    REQUIRE(ratio < 20.0);
}

TEST_CASE("rk4 rejects non-finite stage derivatives") {
    const auto f = [](double, const Vec& y) {
        Vec out = y;
        out[0] = std::numeric_limits<double>::quiet_NaN();
        return out;
    };
    Vec y(1);
    y << 1.0;
    REQUIRE_THROWS_AS(rk4_step(f, 0.0, y, 0.1), NonFiniteDerivative);
}

TEST_CASE("free motion on the sphere follows the great circle") {
    const ControlCallback no_control = [](double, const Vec3&, const Vec3&) {
        return Vec3(Vec3::Zero());
    };
    MechState state{Vec3(0.0, 0.0, 1.0), Vec3(1.0, 0.0, 0.0), 0.0};
    const int n = 1000;
    const double dt = M_PI / 2.0 / n;
    for (int k = 0; k < n; ++k)
        state = step_and_project(sphere, no_control, state, dt).first;
    REQUIRE((state.q - Vec3(1.0, 0.0, 0.0)).norm() < 1e-5);
    REQUIRE((state.v - Vec3(0.0, 0.0, -1.0)).norm() < 1e-5);
}

TEST_CASE("free motion on the curve conserves speed and the constraints") {
    const ControlCallback no_control = [](double, const Vec3&, const Vec3&) {
        return Vec3(Vec3::Zero());
    };
    const Vec3 q0 = LissajousCurve::curve_point(0.7);
    MechState state{q0, Vec3(curve.tangent_basis(q0).col(0)), 0.0};
    double max_speed_drift = 0.0, max_residual = 0.0;
    for (int k = 0; k < 10000; ++k) {
        auto [next, monitors] = step_and_project(curve, no_control, state, 1e-3);
        state = next;
        max_speed_drift = std::max(max_speed_drift, std::abs(state.v.norm() - 1.0));
        max_residual = std::max(max_residual, monitors.constraint_residual);
    }
    REQUIRE(max_speed_drift < 1e-6);
    REQUIRE(max_residual < 1e-8);
}

TEST_CASE("step monitors report effort, energy, and closed-loop energy") {
    const Gains gains(3.7, -4.0);
    const Vec3 q_ref(0.0, 1.0, 0.0);
    const ControlCallback control = [&](double, const Vec3& q, const Vec3& v) {
        return agat_control(sphere, sphere_map, height, gains, q, v, q_ref, Vec3::Zero(),
                            Vec3::Zero());
    };
    ErrorContext context{&sphere_map, &height, &gains, q_ref, Vec3::Zero()};
    MechState state{Vec3(1.0, 0.0, 0.0), Vec3(0.0, 0.0, 0.4), 0.0};
    const auto [next, monitors] = step_and_project(sphere, control, state, 1e-3, &context);
    REQUIRE(monitors.effort ==
            Approx(control(0.0, state.q, state.v).norm()).epsilon(1e-12));
    REQUIRE(monitors.energy == Approx(0.5 * next.v.squaredNorm()).epsilon(1e-12));
    const ErrorJet jet = sphere_map.jet(next.q, q_ref);
    REQUIRE(monitors.e_cl ==
            Approx(closed_loop_energy(height, gains, jet, next.v, Vec3::Zero()))
                .epsilon(1e-12));

    const auto [next2, bare] = step_and_project(sphere, control, state, 1e-3);
    REQUIRE(std::isnan(bare.e_cl));
    REQUIRE((next2.q - next.q).norm() == 0.0);
}

TEST_CASE("simulation grid covers the duration exactly") {
    const Gains gains(3.7, -4.0);
    const DummySystemReference ref{Vec3(0.0, 1.0, 0.0), Vec3::Zero(), Vec3::Zero()};
    const Vec3 q0(1.0, 0.0, 0.0);

    const TrajectoryLog zero =
        simulate(sphere, sphere_map, height, gains, q0, Vec3::Zero(), ref, 0.0, 1e-3);
    REQUIRE(zero.rows.size() == 1);
    REQUIRE(zero.rows[0].t == 0.0);

    const TrajectoryLog exact =
        simulate(sphere, sphere_map, height, gains, q0, Vec3::Zero(), ref, 0.5, 1e-3);
    REQUIRE(exact.rows.size() == 501);
    REQUIRE(exact.rows[137].t == 137 * 1e-3);
    REQUIRE(exact.rows.back().t == 500 * 1e-3);

    const TrajectoryLog partial =
        simulate(sphere, sphere_map, height, gains, q0, Vec3::Zero(), ref, 0.0505, 1e-2);
    REQUIRE(partial.rows.size() == 7);
    REQUIRE(partial.rows[5].t == 5 * 1e-2);
    REQUIRE(partial.rows.back().t == 0.0505);
}

TEST_CASE("an immediately singular pair aborts before any row is logged") {
    const Gains gains(3.7, -4.0);
    const Vec3 q_ref(0.0, 0.0, 1.0);
    const DummySystemReference ref{q_ref, Vec3::Zero(), Vec3::Zero()};
    const TrajectoryLog log = simulate(sphere, sphere_map, height, gains, Vec3(-q_ref),
                                       Vec3::Zero(), ref, 1.0, 1e-3);
    REQUIRE(log.rows.empty());
    REQUIRE(log.abort.has_value());
    REQUIRE(log.abort->kind == "SingularPair");
    REQUIRE(log.abort->t == 0.0);
}

TEST_CASE("simulations are bitwise deterministic") {
    const Gains gains(4.0, -5.7);
    const DummySystemReference ref{Vec3(0.0, 1.0, 0.0), Vec3(0.3, 0.0, 0.2),
                                   Vec3(1.0, 2.0, 1.0)};
    const Vec3 q0(1.0, 0.0, 0.0);
    const Vec3 v0(0.0, 0.5, -0.1);
    const TrajectoryLog a =
        simulate(sphere, sphere_map, height, gains, q0, v0, ref, 2.0, 1e-3);
    const TrajectoryLog b =
        simulate(sphere, sphere_map, height, gains, q0, v0, ref, 2.0, 1e-3);
    REQUIRE(a.rows.size() == b.rows.size());
    for (size_t k = 0; k < a.rows.size(); ++k) {
        REQUIRE(std::memcmp(a.rows[k].q.data(), b.rows[k].q.data(), 3 * sizeof(double)) == 0);
        REQUIRE(std::memcmp(a.rows[k].v.data(), b.rows[k].v.data(), 3 * sizeof(double)) == 0);
        REQUIRE(std::memcmp(a.rows[k].u.data(), b.rows[k].u.data(), 3 * sizeof(double)) == 0);
        REQUIRE(a.rows[k].e_cl == b.rows[k].e_cl);
    }
}

TEST_CASE("analytic references drive the loop and are logged at row times") {
    const Gains gains(3.7, -4.0);
    AnalyticReference moving;
    moving.sample = [](double t) {
        ReferenceSample s;
        const double angle = 0.5 * t * t;
        s.q = Vec3(std::cos(angle), std::sin(angle), 0.0);
        s.v = Vec3(-std::sin(angle), std::cos(angle), 0.0) * t;
        s.a = Vec3(-std::sin(angle), std::cos(angle), 0.0) +
              Vec3(-std::cos(angle), -std::sin(angle), 0.0) * t * t;
        return s;
    };
    const TrajectoryLog log = simulate(sphere, sphere_map, height, gains,
                                       Vec3(0.0, 0.0, 1.0), Vec3(0.1, 0.0, 0.0),
                                       Reference(moving), 1.0, 1e-3);
    REQUIRE_FALSE(log.abort.has_value());
    REQUIRE((Vec3(log.rows.back().q_ref) - Vec3(std::cos(0.5), std::sin(0.5), 0.0)).norm() <
            1e-12);
    REQUIRE(log.max_reference_speed == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("rigid-body simulation keeps both rotations orthogonal") {
    Mat3 inertia;
    inertia << 4.0, 1.0, 1.0, 1.0, 5.2, 2.0, 1.0, 2.0, 6.3;
    const So3Gains gains(Vec3(4.0, 4.5, 4.2), Vec3(-3.5, -3.5, -3.7));
    So3DummySystem ref;
    ref.inertia = Vec3(1.0, 1.2, 2.0).asDiagonal();
    ref.r0 = Mat3::Identity();
    ref.omega0 = Vec3(-0.8, -0.25, -0.25);
    const TrajectoryLog log = simulate_so3(inertia, gains, exp_so3(Vec3(0.5, -0.6, 1.0)),
                                           Vec3(0.1, 0.4, -0.2), ref, So3Law::agat, 2.0, 1e-3);
    REQUIRE(log.rows.size() == 2001);
    REQUIRE_FALSE(log.abort.has_value());
    REQUIRE(log.max_constraint_residual < 1e-8);
    REQUIRE(log.max_reference_drift < 1e-6);
    REQUIRE(log.rows.back().psi_e < log.rows.front().psi_e);
    // e block carries the rotation error; two seconds of damped tracking move
    // its trace well up from the initial ~1.6 toward the aligned value 3.
    const Vec& e0 = log.rows.front().e;
    const Vec& e = log.rows.back().e;
    REQUIRE(e.size() == 9);
    REQUIRE(e[0] + e[4] + e[8] > e0[0] + e0[4] + e0[8] + 0.5);
    REQUIRE(e[0] + e[4] + e[8] > 2.5);
}
