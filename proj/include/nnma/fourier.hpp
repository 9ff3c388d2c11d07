#pragma once

#include <Eigen/Dense>

namespace nnma {

/// Real truncated Fourier series c0 + sum_k a_k cos(k*theta) + b_k sin(k*theta),
/// stored as [c0, a_1..a_H, b_1..b_H] (length 2H+1).
class Series {
  public:
    Series() = default;
    explicit Series(int harmonics) : coef_(Eigen::VectorXd::Zero(2 * harmonics + 1)) {}
    explicit Series(Eigen::VectorXd coef) : coef_(std::move(coef)) {}

    static Series constant(double value, int harmonics = 0);
    static Series harmonic_cos(int k, double amplitude, int harmonics);
    static Series harmonic_sin(int k, double amplitude, int harmonics);

    int harmonics() const { return static_cast<int>((coef_.size() - 1) / 2); }
    int size() const { return static_cast<int>(coef_.size()); }

    double dc() const { return coef_[0]; }
    double cos_coef(int k) const { return coef_[k]; }
    double sin_coef(int k) const { return coef_[harmonics() + k]; }
    double& dc() { return coef_[0]; }
    double& cos_coef(int k) { return coef_[k]; }
    double& sin_coef(int k) { return coef_[harmonics() + k]; }

    const Eigen::VectorXd& coef() const { return coef_; }
    Eigen::VectorXd& coef() { return coef_; }

    /// Value at phase theta = Omega*t.
    double eval(double theta) const;

    /// Series of the derivative with respect to theta (d/dt = Omega * d/dtheta).
    Series derivative_theta() const;

    /// Copy padded or truncated to the given harmonic count.
    Series resized(int harmonics) const;

  private:
    Eigen::VectorXd coef_;
};

/// Exact Fourier coefficients of the pointwise product (order Ha + Hb).
Series multiply(const Series& a, const Series& b);

/// Product truncated to (at most) h_out harmonics.
Series multiply_truncated(const Series& a, const Series& b, int h_out);

/// Matrix T such that coefficients(g*f) = T * coefficients(f) for any series f
/// with h_in harmonics, rows truncated at h_out. Exact provided g carries all
/// harmonics of the underlying function (no hidden truncation of g itself).
Eigen::MatrixXd multiply_operator(const Series& g, int h_out, int h_in);

/// Fourier coefficients of uniformly sampled values over one period
/// (trapezoid/DFT projection; exact for trig polynomials of order < n/2).
Series project_samples(const Eigen::VectorXd& samples, int harmonics);

}  // namespace nnma
