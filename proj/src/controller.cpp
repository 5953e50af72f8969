#include "geotrack/controller.hpp"

#include <cmath>

namespace geotrack {

Gains::Gains(double kp, double kd) : k_p(kp), k_d(kd) {
    if (!std::isfinite(kp) || !(kp > 0.0))
        throw Error("proportional gain must be finite and positive");
    if (!std::isfinite(kd) || !(kd <= 0.0))
        throw Error("derivative gain must be finite and non-positive");
}

bool check_dissipative(const Gains& gains) { return gains.k_d < 0.0; }

Vec3 error_velocity(const ErrorJet& jet, const Vec3& v, const Vec3& v_ref) {
    return jet.d1 * v + jet.d2 * v_ref;
}

Vec3 error_rhs(const Manifold& man, const NavigationFunction& nav, const ErrorJet& jet,
               const Vec3& v, const Vec3& v_ref, const Gains& gains) {
    const Vec3 edot = error_velocity(jet, v, v_ref);
    const Vec3 ambient = -gains.k_p * nav.ambient_differential(jet.e) + gains.k_d * edot;
    return man.project_tangent(jet.e, ambient);
}

Vec3 feedforward_terms(const ErrorJet& jet, const Vec3& v, const Vec3& v_ref,
                       const Vec3& a_ref) {
    return -(jet.d1d1.contract(v, v) + jet.d2d1.contract(v_ref, v) +
             jet.d1d2.contract(v, v_ref) + jet.d2d2.contract(v_ref, v_ref) + jet.d2 * a_ref);
}

Vec3 agat_control(const Manifold& man, const ConfigurationErrorMap& emap,
                  const NavigationFunction& nav, const Gains& gains, const Vec3& q,
                  const Vec3& v, const Vec3& q_ref, const Vec3& v_ref, const Vec3& a_ref) {
    const ErrorJet jet = emap.jet(q, q_ref);
    const Vec3 rhs = error_rhs(man, nav, jet, v, v_ref, gains);
    const Vec3 ff = feedforward_terms(jet, v, v_ref, a_ref);
    const Vec3 demand = rhs + ff + jet.d1 * man.connection_correction(q, v);

    const Mat basis_e = man.tangent_basis(jet.e);
    const Mat basis_q = man.tangent_basis(q);
    const Mat restricted = basis_e.transpose() * jet.d1 * basis_q;
    const Vec target = basis_e.transpose() * demand;
    if (!restricted.allFinite() || !target.allFinite())
        throw NonFiniteDerivative("restricted transport system is non-finite");

    const Vec coeffs = min_norm_solve(restricted, target);
    if ((restricted * coeffs - target).norm() > 1e-8 * (1.0 + target.norm()))
        throw NearSingularTransport("restricted transport solve cannot meet the demand");
    if (coeffs.norm() > 1e8)
        throw NearSingularTransport("demanded control force exceeds the magnitude bound");
    return basis_q * coeffs;
}

double closed_loop_energy(const NavigationFunction& nav, const Gains& gains,
                          const ErrorJet& jet, const Vec3& v, const Vec3& v_ref) {
    const Vec3 edot = error_velocity(jet, v, v_ref);
    return gains.k_p * nav.value(jet.e) + 0.5 * edot.squaredNorm();
}

}  // namespace geotrack
