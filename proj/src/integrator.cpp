#include "geotrack/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace geotrack {

namespace {

std::string abort_kind(const Error& e) {
    if (dynamic_cast<const SingularPair*>(&e)) return "SingularPair";
    if (dynamic_cast<const NearSingularTransport*>(&e)) return "NearSingularTransport";
    if (dynamic_cast<const NonFiniteDerivative*>(&e)) return "NonFiniteDerivative";
    if (dynamic_cast<const RetractionFailed*>(&e)) return "RetractionFailed";
    if (dynamic_cast<const RankDeficientConstraint*>(&e)) return "RankDeficientConstraint";
    if (dynamic_cast<const NearSingular*>(&e)) return "NearSingular";
    return "Error";
}

/// Uniform row grid at multiples of dt plus one trailing partial step when
/// the duration is not a multiple. Row times are k * dt exactly (never
/// accumulated), so long runs do not drift.
struct TimeGrid {
    int full_steps = 0;
    double remainder = 0.0;
    double duration = 0.0;

    TimeGrid(double total, double dt) : duration(total) {
        if (total > 0.0) full_steps = static_cast<int>(std::floor(total / dt + 1e-9));
        remainder = total - full_steps * dt;
        if (remainder <= 1e-12 * std::max(1.0, total)) remainder = 0.0;
    }

    int steps() const { return full_steps + (remainder > 0.0 ? 1 : 0); }
    double row_time(int i, double dt) const { return i <= full_steps ? i * dt : duration; }
    double step_size(int i, double dt) const { return i < full_steps ? dt : remainder; }
};

Vec flatten_rowmajor(const Mat3& m) {
    Vec out(9);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out[3 * r + c] = m(r, c);
    return out;
}

Mat3 unflatten_rowmajor(const Vec& y, int offset) {
    Mat3 m;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = y[offset + 3 * r + c];
    return m;
}

}  // namespace

Vec rk4_step(const std::function<Vec(double, const Vec&)>& f, double t, const Vec& y,
             double dt) {
    const auto stage = [&](double ts, const Vec& ys) {
        Vec k = f(ts, ys);
        if (!k.allFinite())
            throw NonFiniteDerivative("integration stage produced non-finite derivatives");
        return k;
    };
    const Vec k1 = stage(t, y);
    const Vec k2 = stage(t + 0.5 * dt, y + (0.5 * dt) * k1);
    const Vec k3 = stage(t + 0.5 * dt, y + (0.5 * dt) * k2);
    const Vec k4 = stage(t + dt, y + dt * k3);
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

std::pair<MechState, Monitors> step_and_project(const Manifold& man,
                                                const ControlCallback& control,
                                                const MechState& state, double dt,
                                                const ErrorContext* context) {
    const auto field = [&](double t, const Vec& y) -> Vec {
        const Vec3 q = y.head<3>();
        const Vec3 v = y.segment<3>(3);
        const Vec3 u = control(t, q, v);
        Vec dy(6);
        dy.head<3>() = v;
        dy.segment<3>(3) = u - man.connection_correction(q, v);
        return dy;
    };

    Monitors mon;
    mon.effort = control(state.t, state.q, state.v).norm();
    Vec y(6);
    y.head<3>() = state.q;
    y.segment<3>(3) = state.v;
    y = rk4_step(field, state.t, y, dt);

    MechState next;
    next.q = man.retract(y.head<3>());
    next.v = man.project_tangent(next.q, y.segment<3>(3));
    next.t = state.t + dt;
    mon.constraint_residual = man.constraint_residual(next.q);
    mon.energy = 0.5 * next.v.squaredNorm();
    if (context != nullptr && context->emap != nullptr && context->nav != nullptr &&
        context->gains != nullptr) {
        const ErrorJet jet = context->emap->jet(next.q, context->q_ref);
        mon.e_cl =
            closed_loop_energy(*context->nav, *context->gains, jet, next.v, context->v_ref);
    }
    return {next, mon};
}

TrajectoryLog simulate(const Manifold& man, const ConfigurationErrorMap& emap,
                       const NavigationFunction& nav, const Gains& gains, const Vec3& q0,
                       const Vec3& v0, const Reference& ref, double duration, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("time step must be finite and positive");
    if (duration < 0.0 || !std::isfinite(duration))
        throw Error("duration must be finite and non-negative");

    TrajectoryLog log;
    const auto* dummy = std::get_if<DummySystemReference>(&ref);
    const auto* analytic = std::get_if<AnalyticReference>(&ref);

    Vec y(dummy != nullptr ? 12 : 6);
    y.head<3>() = q0;
    y.segment<3>(3) = v0;
    if (dummy != nullptr) {
        y.segment<3>(6) = dummy->q0;
        y.segment<3>(9) = dummy->v0;
    }

    const auto ref_at = [&](double t, const Vec& state) -> ReferenceSample {
        if (analytic != nullptr) return analytic->sample(t);
        ReferenceSample s;
        s.q = state.segment<3>(6);
        s.v = state.segment<3>(9);
        s.a = man.project_tangent(s.q, dummy->force) - man.connection_correction(s.q, s.v);
        return s;
    };

    const auto field = [&](double t, const Vec& state) -> Vec {
        const Vec3 q = state.head<3>();
        const Vec3 v = state.segment<3>(3);
        const ReferenceSample rs = ref_at(t, state);
        const Vec3 u = agat_control(man, emap, nav, gains, q, v, rs.q, rs.v, rs.a);
        Vec dy(state.size());
        dy.head<3>() = v;
        dy.segment<3>(3) = u - man.connection_correction(q, v);
        if (dummy != nullptr) {
            dy.segment<3>(6) = rs.v;
            dy.segment<3>(9) = rs.a;
        }
        return dy;
    };

    const TimeGrid grid(duration, dt);
    double ecl_prev = 0.0;
    bool have_prev = false;
    for (int i = 0;; ++i) {
        const double t = grid.row_time(i, dt);
        const Vec3 q = y.head<3>();
        const Vec3 v = y.segment<3>(3);
        try {
            const ReferenceSample rs = ref_at(t, y);
            const Vec3 u = agat_control(man, emap, nav, gains, q, v, rs.q, rs.v, rs.a);
            const ErrorJet jet = emap.jet(q, rs.q);
            LogRow row;
            row.t = t;
            row.q = q;
            row.q_ref = rs.q;
            row.v = v;
            row.v_ref = rs.v;
            row.e = jet.e;
            row.psi_e = nav.value(jet.e);
            row.e_cl = closed_loop_energy(nav, gains, jet, v, rs.v);
            row.u = u;
            row.u_norm = u.norm();
            row.residual = man.constraint_residual(q);

            log.max_constraint_residual = std::max(log.max_constraint_residual, row.residual);
            log.max_control_norm = std::max(log.max_control_norm, row.u_norm);
            log.min_singularity_margin =
                std::min(log.min_singularity_margin, jet.singularity_margin);
            log.max_reference_speed = std::max(log.max_reference_speed, rs.v.norm());
            if (have_prev && row.e_cl - ecl_prev > 1e-6 * dt) {
                ++log.lyapunov_violations;
                log.max_energy_increase =
                    std::max(log.max_energy_increase, row.e_cl - ecl_prev);
            }
            ecl_prev = row.e_cl;
            have_prev = true;
            log.rows.push_back(std::move(row));
        } catch (const Error& ex) {
            log.abort = AbortInfo{abort_kind(ex), t};
            break;
        }
        if (i == grid.steps()) break;
        try {
            y = rk4_step(field, t, y, grid.step_size(i, dt));
            const Vec3 qn = man.retract(y.head<3>());
            y.head<3>() = qn;
            y.segment<3>(3) = man.project_tangent(qn, y.segment<3>(3));
            if (dummy != nullptr) {
                const Vec3 qrn = man.retract(y.segment<3>(6));
                y.segment<3>(6) = qrn;
                y.segment<3>(9) = man.project_tangent(qrn, y.segment<3>(9));
            }
        } catch (const Error& ex) {
            log.abort = AbortInfo{abort_kind(ex), t};
            break;
        }
    }
    return log;
}

TrajectoryLog simulate_so3(const Mat3& inertia, const So3Gains& gains, const Mat3& r0,
                           const Vec3& omega0, const So3DummySystem& ref, So3Law law,
                           double duration, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("time step must be finite and positive");
    if (duration < 0.0 || !std::isfinite(duration))
        throw Error("duration must be finite and non-negative");

    TrajectoryLog log;
    const auto law_u = [&](const Mat3& r, const Vec3& om, const Mat3& rd, const Vec3& omd,
                           const Vec3& domd) {
        return law == So3Law::agat
                   ? agat_control_so3(inertia, gains, r, om, rd, omd, domd)
                   : pdff_control_so3(inertia, gains, r, om, rd, omd, domd);
    };
    const auto free_accel = [&](const Vec3& omd) {
        return ref.inertia.partialPivLu().solve((ref.inertia * omd).cross(omd)).eval();
    };

    Vec y(24);
    y.segment<9>(0) = flatten_rowmajor(r0);
    y.segment<3>(9) = omega0;
    y.segment<9>(12) = flatten_rowmajor(ref.r0);
    y.segment<3>(21) = ref.omega0;

    const double energy0 = 0.5 * ref.omega0.dot(ref.inertia * ref.omega0);
    const double momentum0 = (ref.inertia * ref.omega0).norm();

    const auto field = [&](double, const Vec& state) -> Vec {
        const Mat3 r = unflatten_rowmajor(state, 0);
        const Vec3 om = state.segment<3>(9);
        const Mat3 rd = unflatten_rowmajor(state, 12);
        const Vec3 omd = state.segment<3>(21);
        const Vec3 domd = free_accel(omd);
        const Vec3 u = law_u(r, om, rd, omd, domd);
        Vec dy(24);
        dy.segment<9>(0) = flatten_rowmajor(r * hat(om));
        dy.segment<3>(9) = inertia.partialPivLu().solve((inertia * om).cross(om)) + u;
        dy.segment<9>(12) = flatten_rowmajor(rd * hat(omd));
        dy.segment<3>(21) = domd;
        return dy;
    };

    const TimeGrid grid(duration, dt);
    double ecl_prev = 0.0;
    bool have_prev = false;
    for (int i = 0;; ++i) {
        const double t = grid.row_time(i, dt);
        const Mat3 r = unflatten_rowmajor(y, 0);
        const Vec3 om = y.segment<3>(9);
        const Mat3 rd = unflatten_rowmajor(y, 12);
        const Vec3 omd = y.segment<3>(21);
        try {
            const Mat3 e = rd * r.transpose();
            const Vec3 eta = r * (omd - om);
            const Vec3 u = law_u(r, om, rd, omd, free_accel(omd));
            LogRow row;
            row.t = t;
            row.q = flatten_rowmajor(r);
            row.q_ref = flatten_rowmajor(rd);
            row.v = om;
            row.v_ref = omd;
            row.e = flatten_rowmajor(e);
            row.psi_e = rotation_psi(gains.weight, e);
            row.e_cl = row.psi_e + 0.5 * eta.dot(inertia * eta);
            row.u = u;
            row.u_norm = u.norm();
            row.residual = rotation_integrity(r);

            log.max_constraint_residual = std::max(log.max_constraint_residual, row.residual);
            log.max_control_norm = std::max(log.max_control_norm, row.u_norm);
            log.max_reference_speed = std::max(log.max_reference_speed, omd.norm());
            const double energy = 0.5 * omd.dot(ref.inertia * omd);
            const double momentum = (ref.inertia * omd).norm();
            log.max_reference_drift =
                std::max({log.max_reference_drift, std::abs(energy - energy0) / energy0,
                          std::abs(momentum - momentum0) / momentum0});
            if (have_prev && row.e_cl - ecl_prev > 1e-6 * dt) {
                ++log.lyapunov_violations;
                log.max_energy_increase =
                    std::max(log.max_energy_increase, row.e_cl - ecl_prev);
            }
            ecl_prev = row.e_cl;
            have_prev = true;
            log.rows.push_back(std::move(row));
        } catch (const Error& ex) {
            log.abort = AbortInfo{abort_kind(ex), t};
            break;
        }
        if (i == grid.steps()) break;
        try {
            y = rk4_step(field, t, y, grid.step_size(i, dt));
            y.segment<9>(0) = flatten_rowmajor(polar_rotation(unflatten_rowmajor(y, 0)));
            y.segment<9>(12) = flatten_rowmajor(polar_rotation(unflatten_rowmajor(y, 12)));
        } catch (const Error& ex) {
            log.abort = AbortInfo{abort_kind(ex), t};
            break;
        }
    }
    return log;
}

}  // namespace geotrack
