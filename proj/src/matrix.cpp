#include "cnmf/matrix.hpp"

#include "cnmf/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace cnmf {

namespace {

std::string dims(const Mat& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

Mat from_row_major(std::size_t rows, std::size_t cols, std::span<const double> values) {
    if (values.size() != rows * cols) {
        throw ContractError("matrix: expected " + std::to_string(rows * cols) + " values, got " +
                            std::to_string(values.size()));
    }
    Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r * cols + c];
        }
    }
    return m;
}

Mat from_nested(std::initializer_list<std::initializer_list<double>> rows) {
    const auto n_rows = static_cast<Eigen::Index>(rows.size());
    const auto n_cols = n_rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(rows.begin()->size());
    Mat m(n_rows, n_cols);
    Eigen::Index r = 0;
    for (const auto& row : rows) {
        if (static_cast<Eigen::Index>(row.size()) != n_cols) {
            throw ContractError("matrix: ragged initializer");
        }
        Eigen::Index c = 0;
        for (double v : row) m(r, c++) = v;
        ++r;
    }
    return m;
}

void require_finite(const Mat& m, const char* what) {
    if (!kernel::all_finite(m)) {
        throw ContractError(std::string(what) + ": NaN or infinite entry");
    }
}

void require_nonneg(const Mat& m) {
    if (m.rows() < 1 || m.cols() < 1) {
        throw ContractError("NonNegMatrix: needs at least one row and one column, got " + dims(m));
    }
    require_finite(m, "NonNegMatrix");
    if (m.minCoeff() < 0.0) {
        throw ContractError("NonNegMatrix: negative entry");
    }
}

}  // namespace

RealMatrix::RealMatrix(Mat values) : m_(std::move(values)) { require_finite(m_, "RealMatrix"); }

RealMatrix::RealMatrix(std::size_t rows, std::size_t cols, std::span<const double> row_major)
    : RealMatrix(from_row_major(rows, cols, row_major)) {}

RealMatrix::RealMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : RealMatrix(from_nested(rows)) {}

RealMatrix RealMatrix::zeros(std::size_t rows, std::size_t cols) {
    return RealMatrix(Mat::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)));
}

RealMatrix RealMatrix::identity(std::size_t n) {
    return RealMatrix(Mat::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
}

NonNegMatrix::NonNegMatrix(Mat values) : m_(std::move(values)) { require_nonneg(m_); }

NonNegMatrix::NonNegMatrix(std::size_t rows, std::size_t cols, std::span<const double> row_major)
    : NonNegMatrix(from_row_major(rows, cols, row_major)) {}

NonNegMatrix::NonNegMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : NonNegMatrix(from_nested(rows)) {}

RealMatrix matmul(const RealMatrix& a, const RealMatrix& b) {
    if (a.cols() != b.rows()) {
        throw ContractError("matmul: " + dims(a.mat()) + " times " + dims(b.mat()));
    }
    return RealMatrix(Mat(a.mat() * b.mat()));
}

NonNegMatrix hadamard_update(const NonNegMatrix& base, const NonNegMatrix& numer,
                             const NonNegMatrix& denom, double eps) {
    if (base.rows() != numer.rows() || base.cols() != numer.cols() ||
        base.rows() != denom.rows() || base.cols() != denom.cols()) {
        throw ContractError("hadamard_update: shapes " + dims(base.mat()) + ", " + dims(numer.mat()) +
                            ", " + dims(denom.mat()) + " differ");
    }
    if (eps < 0.0) throw ContractError("hadamard_update: eps must be non-negative");
    Mat out = base.mat();
    kernel::hadamard_update(out, numer.mat(), denom.mat(), eps);
    return NonNegMatrix(std::move(out));
}

double frobenius_sq(const RealMatrix& a) { return a.mat().squaredNorm(); }

RealMatrix solve_spd(const RealMatrix& a, const RealMatrix& b, double ridge) {
    if (a.rows() != a.cols()) throw ContractError("solve_spd: matrix is " + dims(a.mat()) + ", not square");
    if (a.rows() != b.rows()) {
        throw ContractError("solve_spd: " + dims(a.mat()) + " system with " + dims(b.mat()) + " right-hand side");
    }
    if (ridge < 0.0) throw ContractError("solve_spd: ridge must be non-negative");
    return RealMatrix(kernel::solve_spd(a.mat(), b.mat(), ridge));
}

namespace kernel {

void hadamard_update(Mat& base, const Mat& numer, const Mat& denom, double eps) {
    base.array() *= numer.array() / (denom.array() + eps);
}

Mat solve_spd(const Mat& a, const Mat& b, double ridge) {
    Mat lhs = a;
    lhs.diagonal().array() += ridge;
    Eigen::LLT<Mat> llt(lhs);
    if (llt.info() != Eigen::Success) {
        throw SingularError("solve_spd: system is not positive definite (ridge " + std::to_string(ridge) + ")");
    }
    const Vec pivots = Mat(llt.matrixL()).diagonal().cwiseAbs2();
    const double cutoff = static_cast<double>(lhs.rows()) * std::numeric_limits<double>::epsilon();
    if (pivots.minCoeff() <= cutoff * pivots.maxCoeff()) {
        throw SingularError("solve_spd: system is numerically singular (ridge " + std::to_string(ridge) + ")");
    }
    Mat y = llt.solve(b);
    if (!all_finite(y)) throw SingularError("solve_spd: non-finite solution");
    return y;
}

bool all_finite(const Mat& m) { return m.array().isFinite().all(); }

}  // namespace kernel

}  // namespace cnmf
