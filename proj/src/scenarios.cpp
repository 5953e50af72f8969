#include "geotrack/scenarios.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace geotrack {

namespace {

const Manifold& manifold_for(SystemKind kind) {
    static const Sphere sphere;
    static const LissajousCurve curve;
    if (kind == SystemKind::sphere) return sphere;
    if (kind == SystemKind::lissajous) return curve;
    throw Error("the rigid body has no point-mass manifold");
}

std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string format_residual(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3e", x);
    return buf;
}

Vec vec3_to_vec(const Vec3& v) {
    Vec out(3);
    out << v[0], v[1], v[2];
    return out;
}

Mat3 mat_from_flat(const Vec& y) {
    Mat3 m;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = y[3 * r + c];
    return m;
}

Vec mat_to_flat(const Mat3& m) {
    Vec out(9);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out[3 * r + c] = m(r, c);
    return out;
}

AnalyticReference make_curve_reference(CurveKind kind) {
    if (kind == CurveKind::uniform) {
        return {[](double t) {
            ReferenceSample s;
            s.q = LissajousCurve::curve_point(t);
            s.v = LissajousCurve::curve_velocity(t);
            s.a = LissajousCurve::curve_acceleration(t);
            return s;
        }};
    }
    return {[](double t) {
        const double st = std::sin(t);
        const double ct = std::cos(t);
        ReferenceSample s;
        s.q = LissajousCurve::curve_point(st);
        s.v = LissajousCurve::curve_velocity(st) * ct;
        s.a = LissajousCurve::curve_acceleration(st) * (ct * ct) -
              LissajousCurve::curve_velocity(st) * st;
        return s;
    }};
}

}  // namespace

ScenarioConfig preset(const std::string& name) {
    ScenarioConfig c;
    c.dt = 1e-3;
    if (name == "sphere1") {
        c.system = SystemKind::sphere;
        c.reference = ReferenceKind::dummy_system;
        c.q0 = vec3_to_vec({-1.0, 0.0, 0.0});
        c.v0 = vec3_to_vec({0.0, 1.0, 0.0});
        c.ref_q0 = vec3_to_vec(Vec3(1.0, 0.0, 1.0) / std::sqrt(2.0));
        c.ref_v0 = vec3_to_vec({3.0, 0.0, -3.0});
        c.ref_force = {1.0, 2.0, -1.0};
        c.k_p = 3.7;
        c.k_d = -4.0;
        c.duration = 15.0;
        return c;
    }
    if (name == "sphere2") {
        c.system = SystemKind::sphere;
        c.reference = ReferenceKind::dummy_system;
        c.q0 = vec3_to_vec({0.0, -1.0, 0.0});
        c.v0 = vec3_to_vec({1.0, 2.0, 2.0});
        c.ref_q0 = vec3_to_vec(Vec3(1.0, 1.0, 1.0) / std::sqrt(3.0));
        c.ref_v0 = vec3_to_vec({3.0, 0.0, -3.0});
        c.ref_force = {1.0, 2.0, 1.0};
        c.k_p = 4.0;
        c.k_d = -5.7;
        c.duration = 15.0;
        return c;
    }
    if (name == "lissajous1") {
        c.system = SystemKind::lissajous;
        c.reference = ReferenceKind::analytic_curve;
        c.curve = CurveKind::warped;
        c.q0 = vec3_to_vec({-0.82, 0.9386, 0.9672});
        c.v0 = vec3_to_vec({-1.197, 1.1346, 2.0798});
        c.k_p = 5.4;
        c.k_d = -1.2;
        c.duration = 20.0;
        return c;
    }
    if (name == "lissajous2") {
        c.system = SystemKind::lissajous;
        c.reference = ReferenceKind::analytic_curve;
        c.curve = CurveKind::uniform;
        c.q0 = vec3_to_vec({0.54, 0.9093, 0.1411});
        c.v0 = vec3_to_vec({-0.8415, -0.8323, -2.97});
        c.k_p = 5.3;
        c.k_d = -1.6;
        c.duration = 20.0;
        return c;
    }
    if (name == "so3_compare") {
        c.system = SystemKind::rigid_body;
        c.reference = ReferenceKind::dummy_system;
        Mat3 r0;
        r0 << 0.36, 0.48, -0.8,
              -0.8, 0.6, 0.0,
              0.48, 0.64, 0.60;
        c.q0 = mat_to_flat(r0);
        c.inertia << 4.0, 1.0, 1.0,
                     1.0, 5.2, 2.0,
                     1.0, 2.0, 6.3;
        c.v0 = vec3_to_vec(c.inertia.partialPivLu().solve(Vec3(1.0, 2.2, 5.1)));
        c.ref_inertia = Vec3(1.0, 1.2, 2.0).asDiagonal();
        c.ref_q0 = mat_to_flat(Mat3::Identity());
        c.ref_v0 = vec3_to_vec(c.ref_inertia.partialPivLu().solve(Vec3(-0.8, -0.3, -0.5)));
        c.weight = {4.0, 4.5, 4.2};
        c.damping = {-3.5, -3.5, -3.7};
        c.duration = 20.0;
        return c;
    }
    throw UnknownPreset("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() {
    return {"sphere1", "sphere2", "lissajous1", "lissajous2", "so3_compare"};
}

Mat3 so3_alternate_initial_rotation() {
    Mat3 r;
    r << 0.7071, 0.7071, 0.0,
         -0.7071, 0.7071, 0.0,
         0.0, 0.0, 1.0;
    return r;
}

namespace {

void expect_size(const Vec& v, int n, const char* label) {
    if (v.size() != n)
        throw Error(std::string(label) + " must have " + std::to_string(n) + " entries");
}

/// Shared point-mass position/velocity treatment for initial and reference
/// data: strict rejects anything beyond tolerance, project repairs it.
void settle_point_state(const Manifold& man, IcRepair mode, const char* label, Vec3& q,
                        Vec3& v, std::vector<std::string>& repairs) {
    const double rq = man.constraint_residual(q);
    if (rq > kPointTol) {
        if (mode == IcRepair::strict)
            throw InfeasibleInitialData(std::string(label) +
                                        " position violates the manifold constraint "
                                        "(residual " +
                                        format_residual(rq) + ")");
        q = man.retract(q);
        repairs.push_back(std::string(label) + " position retracted onto the manifold (residual " +
                          format_residual(rq) + ")");
    }
    const double tv = man.tangency_residual(q, v);
    if (tv > kTangentTol) {
        if (mode == IcRepair::strict)
            throw InfeasibleInitialData(std::string(label) +
                                        " velocity violates tangency (residual " +
                                        format_residual(tv) + ")");
        v = man.project_tangent(q, v);
        repairs.push_back(std::string(label) + " velocity projected onto the tangent space "
                          "(residual " +
                          format_residual(tv) + ")");
    }
}

void settle_rotation(IcRepair mode, const char* label, Mat3& r,
                     std::vector<std::string>& repairs) {
    const double defect = rotation_integrity(r);
    if (defect > kPointTol) {
        if (mode == IcRepair::strict)
            throw InfeasibleInitialData(std::string(label) +
                                        " rotation is not orthogonal (defect " +
                                        format_residual(defect) + ")");
        r = polar_rotation(r);
        repairs.push_back(std::string(label) + " rotation replaced by its polar factor (defect " +
                          format_residual(defect) + ")");
    }
}

}  // namespace

PreparedScenario prepare(const ScenarioConfig& config) {
    PreparedScenario out;
    if (config.system == SystemKind::rigid_body) {
        expect_size(config.q0, 9, "q0");
        expect_size(config.v0, 3, "v0");
        expect_size(config.ref_q0, 9, "ref_q0");
        expect_size(config.ref_v0, 3, "ref_v0");
        Mat3 r0 = mat_from_flat(config.q0);
        settle_rotation(config.ic_repair, "initial", r0, out.repairs_applied);
        Mat3 rd0 = mat_from_flat(config.ref_q0);
        settle_rotation(config.ic_repair, "reference", rd0, out.repairs_applied);
        out.q0 = mat_to_flat(r0);
        out.v0 = config.v0;
        out.so3_reference = So3DummySystem{config.ref_inertia, rd0,
                                           Vec3(config.ref_v0[0], config.ref_v0[1],
                                                config.ref_v0[2])};
        return out;
    }

    const Manifold& man = manifold_for(config.system);
    expect_size(config.q0, 3, "q0");
    expect_size(config.v0, 3, "v0");
    Vec3 q0 = Vec3(config.q0[0], config.q0[1], config.q0[2]);
    Vec3 v0 = Vec3(config.v0[0], config.v0[1], config.v0[2]);
    settle_point_state(man, config.ic_repair, "initial", q0, v0, out.repairs_applied);
    out.q0 = vec3_to_vec(q0);
    out.v0 = vec3_to_vec(v0);

    if (config.reference == ReferenceKind::analytic_curve) {
        out.reference = make_curve_reference(config.curve);
        return out;
    }
    expect_size(config.ref_q0, 3, "ref_q0");
    expect_size(config.ref_v0, 3, "ref_v0");
    Vec3 qr0 = Vec3(config.ref_q0[0], config.ref_q0[1], config.ref_q0[2]);
    Vec3 vr0 = Vec3(config.ref_v0[0], config.ref_v0[1], config.ref_v0[2]);
    settle_point_state(man, config.ic_repair, "reference", qr0, vr0, out.repairs_applied);
    out.reference = DummySystemReference{qr0, vr0, config.ref_force};
    return out;
}

FeasibilityReport verify_feasibility(const ScenarioConfig& config) {
    FeasibilityReport report;
    if (config.system == SystemKind::rigid_body) {
        expect_size(config.q0, 9, "q0");
        expect_size(config.ref_q0, 9, "ref_q0");
        report.q0_residual = rotation_integrity(mat_from_flat(config.q0));
        report.ref_q0_residual = rotation_integrity(mat_from_flat(config.ref_q0));
        report.max_reference_speed = config.ref_v0.norm();
    } else {
        const Manifold& man = manifold_for(config.system);
        expect_size(config.q0, 3, "q0");
        expect_size(config.v0, 3, "v0");
        const Vec3 q0raw(config.q0[0], config.q0[1], config.q0[2]);
        const Vec3 v0raw(config.v0[0], config.v0[1], config.v0[2]);
        report.q0_residual = man.constraint_residual(q0raw);
        const Vec3 q0fix = report.q0_residual > kPointTol ? man.retract(q0raw) : q0raw;
        report.v0_tangency = man.tangency_residual(q0fix, v0raw);
        if (config.reference == ReferenceKind::dummy_system) {
            const Vec3 qr0(config.ref_q0[0], config.ref_q0[1], config.ref_q0[2]);
            const Vec3 vr0(config.ref_v0[0], config.ref_v0[1], config.ref_v0[2]);
            report.ref_q0_residual = man.constraint_residual(qr0);
            const Vec3 qr0fix = report.ref_q0_residual > kPointTol ? man.retract(qr0) : qr0;
            report.ref_v0_tangency = man.tangency_residual(qr0fix, vr0);
            report.max_reference_speed = vr0.norm();
        } else {
            const AnalyticReference curve_ref = make_curve_reference(config.curve);
            for (int i = 0; i < 1000; ++i) {
                const double t = config.duration * static_cast<double>(i) / 999.0;
                const ReferenceSample s = curve_ref.sample(t);
                report.max_curve_residual =
                    std::max(report.max_curve_residual, man.constraint_residual(s.q));
                report.max_reference_speed =
                    std::max(report.max_reference_speed, s.v.norm());
            }
        }
    }
    report.strict_feasible =
        report.q0_residual <= kPointTol && report.v0_tangency <= kTangentTol &&
        report.ref_q0_residual <= kPointTol && report.ref_v0_tangency <= kTangentTol;

    ScenarioConfig projected = config;
    projected.ic_repair = IcRepair::project;
    report.repairs_needed = prepare(projected).repairs_applied;
    return report;
}

namespace {

std::string system_name(SystemKind k) {
    switch (k) {
        case SystemKind::sphere: return "sphere";
        case SystemKind::lissajous: return "lissajous";
        default: return "rigid_body";
    }
}

std::string reference_name(ReferenceKind k) {
    return k == ReferenceKind::dummy_system ? "dummy_system" : "analytic_curve";
}

std::string vec_text(const Vec& v) {
    std::string out;
    for (int i = 0; i < v.size(); ++i) {
        if (i > 0) out += ' ';
        out += format_number(v[i]);
    }
    return out;
}

Vec parse_vec(const std::string& text, const std::string& key) {
    std::istringstream in(text);
    std::vector<double> values;
    double x = 0.0;
    while (in >> x) values.push_back(x);
    if (!in.eof())
        throw Error("scenario key '" + key + "' holds a malformed number");
    if (values.empty()) throw Error("scenario key '" + key + "' holds no numbers");
    Vec out(static_cast<int>(values.size()));
    for (size_t i = 0; i < values.size(); ++i) out[static_cast<int>(i)] = values[i];
    return out;
}

double parse_scalar(const std::string& text, const std::string& key) {
    const Vec v = parse_vec(text, key);
    if (v.size() != 1) throw Error("scenario key '" + key + "' must hold one number");
    return v[0];
}

}  // namespace

void save_scenario_file(const ScenarioConfig& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open scenario file for writing: " + path);
    out << "system=" << system_name(config.system) << "\n";
    out << "reference=" << reference_name(config.reference) << "\n";
    if (config.reference == ReferenceKind::analytic_curve)
        out << "curve=" << (config.curve == CurveKind::uniform ? "uniform" : "warped") << "\n";
    out << "q0=" << vec_text(config.q0) << "\n";
    out << "v0=" << vec_text(config.v0) << "\n";
    if (config.system == SystemKind::rigid_body) {
        out << "ref_q0=" << vec_text(config.ref_q0) << "\n";
        out << "ref_v0=" << vec_text(config.ref_v0) << "\n";
        out << "inertia=" << vec_text(mat_to_flat(config.inertia)) << "\n";
        out << "ref_inertia=" << vec_text(mat_to_flat(config.ref_inertia)) << "\n";
        out << "weight=" << vec_text(vec3_to_vec(config.weight)) << "\n";
        out << "damping=" << vec_text(vec3_to_vec(config.damping)) << "\n";
    } else {
        if (config.reference == ReferenceKind::dummy_system) {
            out << "ref_q0=" << vec_text(config.ref_q0) << "\n";
            out << "ref_v0=" << vec_text(config.ref_v0) << "\n";
            out << "ref_force=" << vec_text(vec3_to_vec(config.ref_force)) << "\n";
        }
        out << "k_p=" << format_number(config.k_p) << "\n";
        out << "k_d=" << format_number(config.k_d) << "\n";
    }
    out << "duration=" << format_number(config.duration) << "\n";
    out << "dt=" << format_number(config.dt) << "\n";
    out << "ic_repair=" << (config.ic_repair == IcRepair::strict ? "strict" : "project")
        << "\n";
    if (!out) throw Error("failed writing scenario file: " + path);
}

ScenarioConfig load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open scenario file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        if (line[first] == '#') continue;
        const size_t eq = line.find('=', first);
        if (eq == std::string::npos)
            throw Error("scenario file line " + std::to_string(lineno) +
                        " is not a key=value pair");
        const std::string key = line.substr(first, eq - first);
        const std::string value = line.substr(eq + 1);
        if (kv.count(key))
            throw Error("scenario file repeats key '" + key + "'");
        kv[key] = value;
    }

    const auto take = [&](const std::string& key) {
        const auto it = kv.find(key);
        if (it == kv.end()) throw Error("scenario file is missing key '" + key + "'");
        const std::string value = it->second;
        kv.erase(it);
        return value;
    };
    const auto take_optional = [&](const std::string& key,
                                   const std::string& fallback) {
        const auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        const std::string value = it->second;
        kv.erase(it);
        return value;
    };

    ScenarioConfig c;
    const std::string system = take("system");
    if (system == "sphere")
        c.system = SystemKind::sphere;
    else if (system == "lissajous")
        c.system = SystemKind::lissajous;
    else if (system == "rigid_body")
        c.system = SystemKind::rigid_body;
    else
        throw Error("unknown system '" + system + "'");

    const std::string reference = take("reference");
    if (reference == "dummy_system")
        c.reference = ReferenceKind::dummy_system;
    else if (reference == "analytic_curve")
        c.reference = ReferenceKind::analytic_curve;
    else
        throw Error("unknown reference '" + reference + "'");
    if (c.reference == ReferenceKind::analytic_curve) {
        if (c.system != SystemKind::lissajous)
            throw Error("analytic_curve references require the lissajous system");
        const std::string curve = take("curve");
        if (curve == "uniform")
            c.curve = CurveKind::uniform;
        else if (curve == "warped")
            c.curve = CurveKind::warped;
        else
            throw Error("unknown curve '" + curve + "'");
    }

    c.q0 = parse_vec(take("q0"), "q0");
    c.v0 = parse_vec(take("v0"), "v0");
    if (c.system == SystemKind::rigid_body) {
        c.ref_q0 = parse_vec(take("ref_q0"), "ref_q0");
        c.ref_v0 = parse_vec(take("ref_v0"), "ref_v0");
        const Vec inertia = parse_vec(take("inertia"), "inertia");
        expect_size(inertia, 9, "inertia");
        c.inertia = mat_from_flat(inertia);
        const Vec ref_inertia = parse_vec(take("ref_inertia"), "ref_inertia");
        expect_size(ref_inertia, 9, "ref_inertia");
        c.ref_inertia = mat_from_flat(ref_inertia);
        const Vec weight = parse_vec(take("weight"), "weight");
        expect_size(weight, 3, "weight");
        c.weight = Vec3(weight[0], weight[1], weight[2]);
        const Vec damping = parse_vec(take("damping"), "damping");
        expect_size(damping, 3, "damping");
        c.damping = Vec3(damping[0], damping[1], damping[2]);
        expect_size(c.q0, 9, "q0");
        expect_size(c.v0, 3, "v0");
        expect_size(c.ref_q0, 9, "ref_q0");
        expect_size(c.ref_v0, 3, "ref_v0");
    } else {
        if (c.reference == ReferenceKind::dummy_system) {
            c.ref_q0 = parse_vec(take("ref_q0"), "ref_q0");
            c.ref_v0 = parse_vec(take("ref_v0"), "ref_v0");
            const Vec force = parse_vec(take("ref_force"), "ref_force");
            expect_size(force, 3, "ref_force");
            c.ref_force = Vec3(force[0], force[1], force[2]);
            expect_size(c.ref_q0, 3, "ref_q0");
            expect_size(c.ref_v0, 3, "ref_v0");
        }
        c.k_p = parse_scalar(take("k_p"), "k_p");
        c.k_d = parse_scalar(take("k_d"), "k_d");
        expect_size(c.q0, 3, "q0");
        expect_size(c.v0, 3, "v0");
    }
    c.duration = parse_scalar(take("duration"), "duration");
    c.dt = parse_scalar(take("dt"), "dt");
    const std::string repair = take_optional("ic_repair", "project");
    if (repair == "strict")
        c.ic_repair = IcRepair::strict;
    else if (repair == "project")
        c.ic_repair = IcRepair::project;
    else
        throw Error("unknown ic_repair '" + repair + "'");

    if (!kv.empty()) throw Error("scenario file has unknown key '" + kv.begin()->first + "'");
    return c;
}

}  // namespace geotrack
