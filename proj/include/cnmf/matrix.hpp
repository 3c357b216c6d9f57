#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <span>

namespace cnmf {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Added to every multiplicative-update denominator.
inline constexpr double kUpdateEps = 1e-12;

/// Ridge used by the latent projection when the caller does not pick one.
inline constexpr double kDefaultRidge = 1e-10;

/// Dense real matrix with finite entries. Immutable once built.
class RealMatrix {
public:
    RealMatrix() = default;
    explicit RealMatrix(Mat values);
    RealMatrix(std::size_t rows, std::size_t cols, std::span<const double> row_major);
    RealMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static RealMatrix zeros(std::size_t rows, std::size_t cols);
    static RealMatrix identity(std::size_t n);

    std::size_t rows() const { return static_cast<std::size_t>(m_.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(m_.cols()); }
    double operator()(std::size_t r, std::size_t c) const { return m_(r, c); }

    const Mat& mat() const { return m_; }

private:
    Mat m_;
};

/// Dense matrix whose entries are finite and non-negative, with at least one row and column.
class NonNegMatrix {
public:
    NonNegMatrix() = default;
    explicit NonNegMatrix(Mat values);
    NonNegMatrix(std::size_t rows, std::size_t cols, std::span<const double> row_major);
    NonNegMatrix(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return static_cast<std::size_t>(m_.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(m_.cols()); }
    double operator()(std::size_t r, std::size_t c) const { return m_(r, c); }

    const Mat& mat() const { return m_; }
    RealMatrix as_real() const { return RealMatrix(m_); }

private:
    Mat m_;
};

RealMatrix matmul(const RealMatrix& a, const RealMatrix& b);

/// base ⊙ numer / (denom + eps), elementwise.
NonNegMatrix hadamard_update(const NonNegMatrix& base, const NonNegMatrix& numer,
                             const NonNegMatrix& denom, double eps = kUpdateEps);

double frobenius_sq(const RealMatrix& a);

/// Solves (a + ridge·I)·Y = b for symmetric positive semi-definite a.
RealMatrix solve_spd(const RealMatrix& a, const RealMatrix& b, double ridge = 0.0);

namespace kernel {

// Unchecked in-place forms used inside the solver loops.
void hadamard_update(Mat& base, const Mat& numer, const Mat& denom, double eps);
Mat solve_spd(const Mat& a, const Mat& b, double ridge);
bool all_finite(const Mat& m);

}  // namespace kernel

}  // namespace cnmf
