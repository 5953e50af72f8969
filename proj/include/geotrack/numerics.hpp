#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "geotrack/errors.hpp"

namespace geotrack {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Rank-3 tensor T_kij with the contraction convention
///   contract(a, b)_k = sum_ij T_kij a_i b_j.
/// When a slice stack holds the derivative of a matrix field (one slice per
/// output row k, entry (i,j) = d A_kj / d x_i), slot i pairs with the
/// differentiation direction and slot j with the vector the matrix acts on.
class Tensor3 {
public:
    explicit Tensor3(int m = 0) : m_(m), slices_(static_cast<size_t>(m), Mat::Zero(m, m)) {}

    int dim() const { return m_; }

    double& operator()(int k, int i, int j) { return slices_[static_cast<size_t>(k)](i, j); }
    double operator()(int k, int i, int j) const { return slices_[static_cast<size_t>(k)](i, j); }

    /// Slice k as the matrix (i, j) -> T_kij.
    Mat& slice(int k) { return slices_[static_cast<size_t>(k)]; }
    const Mat& slice(int k) const { return slices_[static_cast<size_t>(k)]; }

    Vec contract(const Vec& a, const Vec& b) const {
        Vec out(m_);
        for (int k = 0; k < m_; ++k) out[k] = a.dot(slices_[static_cast<size_t>(k)] * b);
        return out;
    }

    bool all_finite() const {
        for (const Mat& s : slices_)
            if (!s.allFinite()) return false;
        return true;
    }

private:
    int m_;
    std::vector<Mat> slices_;
};

/// Solve a small (n <= 6) square system by partially pivoted LU.
/// Throws NearSingular when the condition number exceeds 1e12 or the
/// residual check ||Ax - b|| <= 1e-10 (1 + ||b||) fails.
Vec solve_linear(const Mat& A, const Vec& b);

/// Least-squares solve through the normal equations with a fixed Tikhonov
/// floor of 1e-12 on the Gram matrix diagonal.
Vec pseudo_solve(const Mat& A, const Vec& b);

/// Minimum-norm least-squares solve by SVD. Singular values at or below
/// rcond times the largest are treated as exact zeros, so rank-deficient
/// but consistent systems solve cleanly.
Vec min_norm_solve(const Mat& A, const Vec& b, double rcond = 1e-10);

/// Central-difference Jacobian of f at x with step h (column i holds
/// df/dx_i). Accuracy is O(h^2) on smooth maps.
Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double h = 1e-5);

}  // namespace geotrack
