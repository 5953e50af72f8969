#pragma once

#include "geotrack/errormap.hpp"
#include "geotrack/manifold.hpp"
#include "geotrack/navigation.hpp"
#include "geotrack/numerics.hpp"

namespace geotrack {

/// Proportional/derivative gains of the tracking law. k_p scales the
/// navigation gradient and must be positive; k_d scales the error velocity
/// and must be non-positive for the closed-loop energy to dissipate.
struct Gains {
    Gains(double kp, double kd);

    double k_p;
    double k_d;
};

/// True when the gains make the closed loop strictly dissipative (k_d < 0).
bool check_dissipative(const Gains& gains);

/// Velocity of the error state along (q(t), q_ref(t)).
Vec3 error_velocity(const ErrorJet& jet, const Vec3& v, const Vec3& v_ref);

/// Demanded error acceleration from the feedback terms alone, projected
/// onto the tangent space at the error state.
Vec3 error_rhs(const Manifold& man, const NavigationFunction& nav, const ErrorJet& jet,
               const Vec3& v, const Vec3& v_ref, const Gains& gains);

/// Curvature and reference-acceleration terms that the transport maps
/// introduce into the error dynamics; the control must cancel them.
Vec3 feedforward_terms(const ErrorJet& jet, const Vec3& v, const Vec3& v_ref,
                       const Vec3& a_ref);

/// The tracking control force (ambient vector, tangent at q).
///
/// Throws, in evaluation order:
///  - SingularPair            when (q, q_ref) sits on the error map's
///                            singular set or its jets are non-finite,
///  - NonFiniteDerivative     when the restricted transport system contains
///                            non-finite entries,
///  - NearSingularTransport   when the restricted solve cannot meet the
///                            demand (inconsistent residual) or the demanded
///                            force exceeds the 1e8 magnitude bound.
Vec3 agat_control(const Manifold& man, const ConfigurationErrorMap& emap,
                  const NavigationFunction& nav, const Gains& gains, const Vec3& q,
                  const Vec3& v, const Vec3& q_ref, const Vec3& v_ref, const Vec3& a_ref);

/// Closed-loop energy k_p psi(E) + 1/2 ||Edot||^2. Along healthy closed-loop
/// trajectories this is non-increasing up to integration error.
double closed_loop_energy(const NavigationFunction& nav, const Gains& gains,
                          const ErrorJet& jet, const Vec3& v, const Vec3& v_ref);

}  // namespace geotrack
