#pragma once

#include <stdexcept>
#include <string>

namespace geotrack {

/// Root of the library's exception hierarchy. Every failure mode that a
/// caller can meaningfully react to derives from this type.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A square linear system is too ill-conditioned for a trustworthy solve.
class NearSingular : public Error {
public:
    using Error::Error;
};

/// A point failed the manifold constraint beyond the repairable band.
class OffManifold : public Error {
public:
    using Error::Error;
};

/// A vector failed the tangency requirement beyond the repairable band.
class NotTangent : public Error {
public:
    using Error::Error;
};

/// The retraction iteration did not reach the constraint tolerance.
class RetractionFailed : public Error {
public:
    using Error::Error;
};

/// The constraint Jacobian lost rank where multipliers were required.
class RankDeficientConstraint : public Error {
public:
    using Error::Error;
};

/// The configuration pair sits on the excluded singular set of the error map.
class SingularPair : public Error {
public:
    using Error::Error;
};

/// The transport system cannot deliver the demanded error acceleration:
/// the restricted solve is inconsistent or the demand is unbounded.
class NearSingularTransport : public Error {
public:
    using Error::Error;
};

/// A derivative evaluation produced non-finite values.
class NonFiniteDerivative : public Error {
public:
    using Error::Error;
};

/// A critical point's intrinsic Hessian is numerically degenerate.
class DegenerateCritical : public Error {
public:
    using Error::Error;
};

/// A preset name is not in the registry.
class UnknownPreset : public Error {
public:
    using Error::Error;
};

/// Initial data violates constraints and strict mode forbids repair.
class InfeasibleInitialData : public Error {
public:
    using Error::Error;
};

}  // namespace geotrack
