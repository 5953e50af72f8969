#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "geotrack/controller.hpp"
#include "geotrack/errormap.hpp"
#include "geotrack/manifold.hpp"
#include "geotrack/navigation.hpp"
#include "geotrack/numerics.hpp"
#include "geotrack/so3.hpp"

namespace geotrack {

/// One classical fourth-order Runge-Kutta step of y' = f(t, y).
/// Throws NonFiniteDerivative when a stage derivative is non-finite.
Vec rk4_step(const std::function<Vec(double, const Vec&)>& f, double t, const Vec& y,
             double dt);

/// Mechanical state on an embedded manifold.
struct MechState {
    Vec3 q = Vec3::Zero();
    Vec3 v = Vec3::Zero();
    double t = 0.0;
};

/// Per-step health measurements of a simulated mechanical system.
struct Monitors {
    /// Closed-loop energy; NaN when no error context was supplied.
    double e_cl = std::numeric_limits<double>::quiet_NaN();
    double constraint_residual = 0.0;
    double energy = 0.0;  // kinetic energy after the step
    double effort = 0.0;  // control magnitude applied at the step's start
};

/// Control force as a function of (t, q, v); must be tangent at q.
using ControlCallback = std::function<Vec3(double, const Vec3&, const Vec3&)>;

/// Everything needed to evaluate the closed-loop energy after a step.
struct ErrorContext {
    const ConfigurationErrorMap* emap = nullptr;
    const NavigationFunction* nav = nullptr;
    const Gains* gains = nullptr;
    Vec3 q_ref = Vec3::Zero();  // reference sample at the post-step time
    Vec3 v_ref = Vec3::Zero();
};

/// Advance the forced geodesic equation q'' = u - connection(q, q') by one
/// RK4 step, then retract the position and re-project the velocity. The
/// control is re-evaluated at every internal stage.
std::pair<MechState, Monitors> step_and_project(const Manifold& man,
                                                const ControlCallback& control,
                                                const MechState& state, double dt,
                                                const ErrorContext* context = nullptr);

/// One logged sample of a closed-loop run. Configuration blocks hold 3
/// entries for point-mass systems and 9 (row-major rotation matrices) for
/// the rigid body; velocity and control blocks always hold 3.
struct LogRow {
    double t = 0.0;
    Vec q, q_ref, v, v_ref, e;
    double psi_e = 0.0;
    double e_cl = 0.0;
    Vec u;
    double u_norm = 0.0;
    double residual = 0.0;
};

/// Why and when a run stopped early.
struct AbortInfo {
    std::string kind;
    double t = 0.0;
};

struct TrajectoryLog {
    std::vector<LogRow> rows;
    std::optional<AbortInfo> abort;
    int lyapunov_violations = 0;
    double max_energy_increase = 0.0;
    double max_constraint_residual = 0.0;
    double max_control_norm = 0.0;
    double min_singularity_margin = std::numeric_limits<double>::infinity();
    double max_reference_speed = 0.0;
    /// Relative drift of the free reference body's conserved quantities
    /// (rigid-body runs only; 0 otherwise).
    double max_reference_drift = 0.0;
};

struct ReferenceSample {
    Vec3 q = Vec3::Zero();
    Vec3 v = Vec3::Zero();
    Vec3 a = Vec3::Zero();
};

/// Reference generated by a closed-form curve with exact derivatives.
struct AnalyticReference {
    std::function<ReferenceSample(double)> sample;
};

/// Reference generated by co-integrating a second mechanical system on the
/// same manifold, driven by a constant ambient force applied tangentially.
struct DummySystemReference {
    Vec3 q0 = Vec3::Zero();
    Vec3 v0 = Vec3::Zero();
    Vec3 force = Vec3::Zero();
};

using Reference = std::variant<AnalyticReference, DummySystemReference>;

/// Run the tracking closed loop from (q0, v0) for the given duration,
/// logging one row per grid time starting at t = 0. A trailing partial step
/// covers durations that are not a multiple of dt; zero duration logs the
/// initial row only. When the controller or the step repair fails, the log
/// is returned with the rows collected so far and abort set; no row is
/// logged at the failure time itself.
TrajectoryLog simulate(const Manifold& man, const ConfigurationErrorMap& emap,
                       const NavigationFunction& nav, const Gains& gains, const Vec3& q0,
                       const Vec3& v0, const Reference& ref, double duration, double dt);

/// Free rigid body acting as the reference of a rotation-tracking run.
struct So3DummySystem {
    Mat3 inertia = Mat3::Identity();
    Mat3 r0 = Mat3::Identity();
    Vec3 omega0 = Vec3::Zero();
};

enum class So3Law { agat, pdff };

/// Rotation-group analogue of simulate: co-integrates the plant and the
/// free reference body, re-orthonormalizing both rotations after every step
/// by the polar factor. Logs the same row schema with 9-entry row-major
/// rotation blocks.
TrajectoryLog simulate_so3(const Mat3& inertia, const So3Gains& gains, const Mat3& r0,
                           const Vec3& omega0, const So3DummySystem& ref, So3Law law,
                           double duration, double dt);

}  // namespace geotrack
