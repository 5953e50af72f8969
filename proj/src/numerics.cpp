#include "geotrack/numerics.hpp"

#include <cassert>

namespace geotrack {

Vec solve_linear(const Mat& A, const Vec& b) {
    assert(A.rows() == A.cols());
    assert(A.rows() == b.size());
    assert(A.rows() <= 6);

    Eigen::JacobiSVD<Mat> svd(A);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    if (!(smin > 0.0) || smax / smin > 1e12)
        throw NearSingular("solve_linear: condition number exceeds 1e12");

    Eigen::PartialPivLU<Mat> lu(A);
    Vec x = lu.solve(b);
    if (!x.allFinite() || (A * x - b).norm() > 1e-10 * (1.0 + b.norm()))
        throw NearSingular("solve_linear: residual check failed");
    return x;
}

Vec pseudo_solve(const Mat& A, const Vec& b) {
    const Mat gram = A.transpose() * A + 1e-12 * Mat::Identity(A.cols(), A.cols());
    return gram.ldlt().solve(A.transpose() * b);
}

Vec min_norm_solve(const Mat& A, const Vec& b, double rcond) {
    Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(rcond);
    return svd.solve(b);
}

Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double h) {
    const int n = static_cast<int>(x.size());
    Vec xp = x, xm = x;
    Mat jac;
    for (int i = 0; i < n; ++i) {
        xp[i] = x[i] + h;
        xm[i] = x[i] - h;
        const Vec col = (f(xp) - f(xm)) / (2.0 * h);
        if (jac.size() == 0) jac.resize(col.size(), n);
        jac.col(i) = col;
        xp[i] = x[i];
        xm[i] = x[i];
    }
    return jac;
}

}  // namespace geotrack
