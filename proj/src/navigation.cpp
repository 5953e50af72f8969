#include "geotrack/navigation.hpp"

#include <cmath>

namespace geotrack {

CoordinateNavigation::CoordinateNavigation(int axis) : axis_(axis) {
    if (axis < 0 || axis > 2) throw Error("coordinate navigation axis must be 0, 1, or 2");
}

Vec3 CoordinateNavigation::ambient_differential(const Vec3&) const {
    Vec3 g = Vec3::Zero();
    g[axis_] = 1.0;
    return g;
}

Vec3 riemannian_gradient(const Manifold& man, const NavigationFunction& nav, const Vec3& q) {
    return man.project_tangent(q, nav.ambient_differential(q));
}

namespace {

constexpr double kStationaryTol = 1e-8;
constexpr double kDedupTol = 1e-6;
constexpr double kHessianStep = 1e-4;
constexpr double kDegenerateDet = 1e-6;

/// Follow +/- gradient with retraction steps and a backtracking line search
/// until the intrinsic gradient norm drops below kStationaryTol.
Vec3 refine(const Manifold& man, const NavigationFunction& nav, Vec3 q, double direction) {
    double alpha = 1.0;
    for (int it = 0; it < 5000; ++it) {
        const Vec3 grad = riemannian_gradient(man, nav, q);
        if (grad.norm() < kStationaryTol) return q;
        const double f0 = direction * nav.value(q);
        Vec3 candidate = q;
        double step = alpha;
        for (int back = 0; back < 40; ++back) {
            bool ok = true;
            try {
                candidate = man.retract(q - step * direction * grad);
            } catch (const RetractionFailed&) {
                ok = false;  // trial left the retraction's basin; shrink and retry
            }
            if (ok && direction * nav.value(candidate) < f0) break;
            candidate = q;
            step *= 0.5;
        }
        q = candidate;
        alpha = std::min(1.0, step * 1.5);
    }
    return q;
}

/// Intrinsic Hessian by central differences in the tangent chart.
Mat intrinsic_hessian(const Manifold& man, const NavigationFunction& nav, const Vec3& q) {
    const Mat basis = man.tangent_basis(q);
    const int d = static_cast<int>(basis.cols());
    const auto chart = [&](const Vec& s) { return nav.value(man.retract(q + basis * s)); };
    Mat hess(d, d);
    const double h = kHessianStep;
    const double f0 = chart(Vec::Zero(d));
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            Vec sp = Vec::Zero(d), sm = Vec::Zero(d);
            if (i == j) {
                sp[i] = h;
                sm[i] = -h;
                hess(i, i) = (chart(sp) - 2.0 * f0 + chart(sm)) / (h * h);
            } else {
                Vec spp = Vec::Zero(d), spm = Vec::Zero(d), smp = Vec::Zero(d),
                    smm = Vec::Zero(d);
                spp[i] = h;
                spp[j] = h;
                spm[i] = h;
                spm[j] = -h;
                smp[i] = -h;
                smp[j] = h;
                smm[i] = -h;
                smm[j] = -h;
                hess(i, j) = hess(j, i) =
                    (chart(spp) - chart(spm) - chart(smp) + chart(smm)) / (4.0 * h * h);
            }
        }
    }
    return hess;
}

}  // namespace

NavigationReport verify_navigation(const NavigationFunction& nav, const Manifold& man,
                                   int n_samples) {
    NavigationReport report;
    std::vector<Vec3> found;
    for (int k = 0; k < n_samples; ++k) {
        const Vec3 seed = man.sample_point(k, n_samples);
        report.max_gradient_tangency =
            std::max(report.max_gradient_tangency,
                     man.tangency_residual(seed, riemannian_gradient(man, nav, seed)));
        for (const double direction : {1.0, -1.0}) {
            const Vec3 critical = refine(man, nav, seed, direction);
            if (riemannian_gradient(man, nav, critical).norm() >= kStationaryTol)
                continue;  // not stationary within budget; another seed will land here
            bool duplicate = false;
            for (const Vec3& seen : found)
                if ((seen - critical).norm() < kDedupTol) {
                    duplicate = true;
                    break;
                }
            if (!duplicate) found.push_back(critical);
        }
    }

    const int d = man.dim();
    for (const Vec3& q : found) {
        const Mat hess = intrinsic_hessian(man, nav, q);
        if (std::abs(hess.determinant()) < kDegenerateDet)
            throw DegenerateCritical("critical point has a numerically degenerate Hessian");
        Eigen::SelfAdjointEigenSolver<Mat> eig(hess);
        int negative = 0;
        for (int i = 0; i < d; ++i)
            if (eig.eigenvalues()[i] < 0.0) ++negative;
        report.critical_points.push_back({q, nav.value(q), negative});
        if (negative == 0)
            ++report.minima;
        else if (negative == d)
            ++report.maxima;
        else
            ++report.saddles;
    }
    return report;
}

}  // namespace geotrack
