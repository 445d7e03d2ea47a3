#include "spdemc/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "spdemc/error.hpp"

namespace spdemc {

namespace {

void require_mesh(double h, double k) {
    require(h > 0.0 && std::isfinite(h), ErrorKind::invalid_argument, "h must be positive");
    require(k > 0.0 && std::isfinite(k), ErrorKind::invalid_argument, "k must be positive");
}

}  // namespace

FourierSymbol fourier_symbols(double theta, const ModelParams& params, double h, double k) {
    require_mesh(h, k);
    require(std::isfinite(theta), ErrorKind::invalid_argument, "theta must be finite");
    const double lambda = k / (h * h);
    const double s = std::sin(0.5 * theta);
    const double s2 = s * s;
    const double sine = std::sin(theta);
    const double rho = params.rho;
    return FourierSymbol{
        {1.0 - 2.0 * (1.0 - rho) * lambda * s2, -params.mu * k / h * sine},
        {0.0, -std::sqrt(rho * k) / h * sine},
        {-2.0 * rho * lambda * s2, 0.0},
    };
}

double ms_amplification(double theta, const ModelParams& params, double h, double k) {
    require_mesh(h, k);
    const double lambda = k / (h * h);
    const double rho = params.rho;
    const double drift2 = params.mu * params.mu * k;  // (mu k / h)^2 = drift2 * lambda
    const double s = std::sin(0.5 * theta);
    const double u = s * s;
    const double bracket = lambda * (1.0 - rho - drift2) +
                           u * lambda * (rho + drift2 - (1.0 + 2.0 * rho * rho) * lambda);
    return 1.0 - 4.0 * u * bracket;
}

StabilityCheck check_stability(const ModelParams& params, double h, double k) {
    require_mesh(h, k);
    const double rho = params.rho;
    const double drift_lhs = params.mu * params.mu * k;
    const double drift_rhs = 1.0 - rho;
    StabilityCheck out;
    if (drift_rhs > 0.0)
        out.margin_drift = drift_lhs / drift_rhs;
    else
        out.margin_drift = drift_lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    out.margin_mesh = k / (h * h) * (1.0 + 2.0 * rho * rho);
    out.stable = drift_lhs <= drift_rhs && out.margin_mesh <= 1.0;
    return out;
}

AmplificationScan scan_amplification(const ModelParams& params, double h, double k,
                                     std::size_t points) {
    require(points >= 2, ErrorKind::invalid_argument, "scan needs at least two points");
    AmplificationScan scan;
    scan.theta.reserve(points + 1);
    for (std::size_t i = 0; i < points; ++i)
        scan.theta.push_back(std::numbers::pi * static_cast<double>(i) / static_cast<double>(points - 1));

    // S is quadratic in u = sin^2(theta/2); its interior stationary point is
    // the only candidate a uniform scan can miss.
    const double lambda = k / (h * h);
    const double drift2 = params.mu * params.mu * k;
    const double rho = params.rho;
    const double lin = lambda * (1.0 - rho - drift2);
    const double quad = lambda * (rho + drift2 - (1.0 + 2.0 * rho * rho) * lambda);
    if (quad != 0.0) {
        const double u_star = -lin / (2.0 * quad);
        if (u_star > 0.0 && u_star < 1.0) scan.theta.push_back(2.0 * std::asin(std::sqrt(u_star)));
    }

    scan.amplification.reserve(scan.theta.size());
    scan.max_amplification = -std::numeric_limits<double>::infinity();
    for (double theta : scan.theta) {
        const double s = ms_amplification(theta, params, h, k);
        scan.amplification.push_back(s);
        if (s > scan.max_amplification) {
            scan.max_amplification = s;
            scan.argmax = theta;
        }
    }
    return scan;
}

Matrix::Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

std::vector<double> Matrix::apply(const std::vector<double>& x) const {
    require(x.size() == cols_, ErrorKind::invalid_argument, "matrix/vector size mismatch");
    std::vector<double> y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) acc += (*this)(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

Matrix operator+(Matrix lhs, const Matrix& rhs) {
    require(lhs.rows_ == rhs.rows_ && lhs.cols_ == rhs.cols_, ErrorKind::invalid_argument,
            "matrix size mismatch");
    for (std::size_t i = 0; i < lhs.data_.size(); ++i) lhs.data_[i] += rhs.data_[i];
    return lhs;
}

Matrix operator-(Matrix lhs, const Matrix& rhs) { return std::move(lhs) + (-1.0) * rhs; }

Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
    require(lhs.cols_ == rhs.rows_, ErrorKind::invalid_argument, "matrix size mismatch");
    Matrix out(lhs.rows_, rhs.cols_);
    for (std::size_t i = 0; i < lhs.rows_; ++i)
        for (std::size_t m = 0; m < lhs.cols_; ++m) {
            const double a = lhs(i, m);
            if (a == 0.0) continue;
            for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(m, j);
        }
    return out;
}

Matrix operator*(double s, Matrix m) {
    for (double& x : m.data_) x *= s;
    return m;
}

double Matrix::max_abs() const noexcept {
    double out = 0.0;
    for (double x : data_) out = std::max(out, std::abs(x));
    return out;
}

StabilityMatrices build_stability_matrices(int J, const ModelParams& params, double h, double k) {
    require(J >= 3, ErrorKind::invalid_argument, "matrix analysis needs J >= 3");
    require_mesh(h, k);
    const auto n = static_cast<std::size_t>(J - 1);
    StabilityMatrices out{Matrix(n, n), Matrix(n, n), Matrix(n, n), Matrix(n, n), Matrix(n, n), {}, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        out.D2(i, i) = -2.0;
        out.D3(i, i) = -2.0;
        if (i + 1 < n) {
            out.D1(i, i + 1) = 1.0;
            out.D1(i + 1, i) = -1.0;
            out.D2(i, i + 1) = 1.0;
            out.D2(i + 1, i) = 1.0;
        }
        if (i + 2 < n) {
            out.D3(i, i + 2) = 1.0;
            out.D3(i + 2, i) = 1.0;
        }
    }
    // V_{-1} = -V_1 and V_{J+1} = -V_{J-1}
    out.D3(0, 0) = -3.0;
    out.D3(n - 1, n - 1) = -3.0;
    out.E1(0, 0) = 2.0;
    out.E2(n - 1, n - 1) = 2.0;

    const double lambda = k / (h * h);
    const double rho = params.rho;
    const double mu = params.mu;
    const double drift_sq = mu * mu * k * k / (h * h);
    const Matrix D2sq = out.D2 * out.D2;
    out.M = Matrix::identity(n) + lambda * out.D2 +
            ((1.0 + 2.0 * rho * rho) * lambda * lambda / 4.0) * D2sq -
            (rho * lambda / 4.0 + drift_sq / 4.0) * out.D3;
    out.e1 = rho * lambda / 2.0 + drift_sq / 2.0;
    out.e2 = mu * k * k / (2.0 * h * h * h);
    return out;
}

Matrix mean_square_operator(int J, const ModelParams& params, double h, double k) {
    const StabilityMatrices m = build_stability_matrices(J, params, h, k);
    const auto n = static_cast<std::size_t>(J - 1);
    const double rho = params.rho;
    const Matrix I = Matrix::identity(n);
    const Matrix A = I - (params.mu * k / (2.0 * h)) * m.D1 + ((1.0 - rho) * k / (2.0 * h * h)) * m.D2;
    const Matrix B = (-std::sqrt(rho * k) / (2.0 * h)) * m.D1;
    const Matrix C = (rho * k / (2.0 * h * h)) * m.D2;
    const Matrix AC = A + C;
    return AC.transpose() * AC + B.transpose() * B + 2.0 * (C.transpose() * C);
}

double verify_matrix_eigenstructure(int J, const ModelParams& params, double h, double k) {
    const StabilityMatrices m = build_stability_matrices(J, params, h, k);
    const auto n = static_cast<std::size_t>(J - 1);
    double worst = 0.0;
    for (int mode = 1; mode < J; ++mode) {
        const double theta = mode * std::numbers::pi / J;
        std::vector<double> w(n);
        double w_norm = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            w[j] = std::sin(static_cast<double>(j + 1) * theta);
            w_norm = std::max(w_norm, std::abs(w[j]));
        }
        const double eigenvalue = ms_amplification(theta, params, h, k);
        const std::vector<double> Mw = m.M.apply(w);
        double residual = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            residual = std::max(residual, std::abs(Mw[j] - eigenvalue * w[j]));
        worst = std::max(worst, residual / w_norm);
    }
    return worst;
}

}  // namespace spdemc
