#pragma once

#include <string>
#include <vector>

#include "geotrack/integrator.hpp"
#include "geotrack/manifold.hpp"
#include "geotrack/numerics.hpp"

namespace geotrack {

enum class SystemKind { sphere, lissajous, rigid_body };
enum class ReferenceKind { dummy_system, analytic_curve };
enum class IcRepair { strict, project };
/// Parameterization of the analytic reference curve: uniform arc parameter
/// or the sine-warped parameter that sweeps back and forth.
enum class CurveKind { uniform, warped };

/// Complete description of a tracking experiment. Point-mass systems use
/// 3-entry q blocks; the rigid body uses 9-entry row-major rotations in q0
/// and ref_q0 and fills the inertia/weight/damping fields instead of the
/// scalar gains.
struct ScenarioConfig {
    SystemKind system = SystemKind::sphere;
    ReferenceKind reference = ReferenceKind::dummy_system;
    CurveKind curve = CurveKind::uniform;
    Vec q0, v0;
    Vec ref_q0, ref_v0;
    Vec3 ref_force = Vec3::Zero();
    double k_p = 1.0;
    double k_d = 0.0;
    Vec3 weight = Vec3::Ones();    // rigid body: diagonal of the error weight
    Vec3 damping = Vec3::Zero();   // rigid body: diagonal of the damping matrix
    Mat3 inertia = Mat3::Identity();
    Mat3 ref_inertia = Mat3::Identity();
    double duration = 0.0;
    double dt = 1e-3;
    IcRepair ic_repair = IcRepair::project;
};

/// Named built-in experiments: "sphere1", "sphere2", "lissajous1",
/// "lissajous2", "so3_compare". Throws UnknownPreset otherwise.
ScenarioConfig preset(const std::string& name);

/// Names of all built-in presets, in registry order.
std::vector<std::string> preset_names();

/// The second initial rotation of the attitude comparison (intentionally
/// written with truncated entries, so it exercises the polar repair path).
Mat3 so3_alternate_initial_rotation();

/// Initial data after validation/repair, plus the assembled reference.
struct PreparedScenario {
    Vec q0, v0;
    std::vector<std::string> repairs_applied;
    Reference reference;                 // point-mass systems
    So3DummySystem so3_reference;        // rigid body
};

/// Validate the configured initial data and build the reference signal.
/// In strict mode any residual beyond 1e-9 throws InfeasibleInitialData; in
/// project mode the data is repaired (retraction, tangential projection,
/// polar factor) and each repair is recorded.
PreparedScenario prepare(const ScenarioConfig& config);

/// Pre-repair health of a scenario's initial data and reference.
struct FeasibilityReport {
    double q0_residual = 0.0;
    double v0_tangency = 0.0;
    double ref_q0_residual = 0.0;
    double ref_v0_tangency = 0.0;
    /// Analytic references: worst constraint residual of the curve over
    /// 1000 uniform samples of [0, duration].
    double max_curve_residual = 0.0;
    /// Largest reference speed seen over those samples (or the dummy's
    /// initial speed).
    double max_reference_speed = 0.0;
    bool strict_feasible = false;
    std::vector<std::string> repairs_needed;
};

FeasibilityReport verify_feasibility(const ScenarioConfig& config);

/// Plain-text key=value scenario files ('#' comments and blank lines are
/// ignored; vector values are space-separated, full precision).
ScenarioConfig load_scenario_file(const std::string& path);
void save_scenario_file(const ScenarioConfig& config, const std::string& path);

}  // namespace geotrack
