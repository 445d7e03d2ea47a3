#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "spdemc/grid.hpp"

namespace spdemc {

/// One step maps the Fourier mode exp(i j theta) to (a + b Z + c Z^2) times itself.
struct FourierSymbol {
    std::complex<double> a;
    std::complex<double> b;
    std::complex<double> c;

    std::complex<double> factor(double z) const noexcept { return a + b * z + c * z * z; }
};

FourierSymbol fourier_symbols(double theta, const ModelParams& params, double h, double k);

/// Mean-square amplification S(theta) = |a+c|^2 + |b|^2 + 2|c|^2, evaluated in
/// the factored form 1 - 4 sin^2(theta/2) {...} so that S <= 1 is exact in
/// floating point whenever the bracket is non-negative.
double ms_amplification(double theta, const ModelParams& params, double h, double k);

struct StabilityCheck {
    bool stable = false;
    double margin_drift = 0.0;  // mu^2 k / (1 - rho)
    double margin_mesh = 0.0;   // (k / h^2) (1 + 2 rho^2)
};

StabilityCheck check_stability(const ModelParams& params, double h, double k);

struct AmplificationScan {
    std::vector<double> theta;
    std::vector<double> amplification;
    double max_amplification = 0.0;
    double argmax = 0.0;
};

/// Uniform scan of [0, pi] plus the analytic extremum candidates.
AmplificationScan scan_amplification(const ModelParams& params, double h, double k,
                                     std::size_t points);

/// Small dense row-major matrix for the interior-node operators.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);
    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    Matrix transpose() const;
    std::vector<double> apply(const std::vector<double>& x) const;

    friend Matrix operator+(Matrix lhs, const Matrix& rhs);
    friend Matrix operator-(Matrix lhs, const Matrix& rhs);
    friend Matrix operator*(const Matrix& lhs, const Matrix& rhs);
    friend Matrix operator*(double s, Matrix m);

    double max_abs() const noexcept;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Difference matrices on the J-1 interior nodes and the mean-square matrix
/// M with its two corner corrections:
///   V'[(A+C)'(A+C) + B'B + 2C'C]V = V'MV - (e1 - e2) v_1^2 - (e1 + e2) v_{J-1}^2.
struct StabilityMatrices {
    Matrix D1;  // central first difference (anti-symmetric)
    Matrix D2;  // central second difference
    Matrix D3;  // doubled-span second difference, odd reflection at the ends
    Matrix E1;  // 2 in the top-left corner
    Matrix E2;  // 2 in the bottom-right corner
    Matrix M;
    double e1 = 0.0;
    double e2 = 0.0;
};

StabilityMatrices build_stability_matrices(int J, const ModelParams& params, double h, double k);

/// (A+C)'(A+C) + B'B + 2C'C for the step V_{n+1} = (A + B Z + C Z^2) V_n.
Matrix mean_square_operator(int J, const ModelParams& params, double h, double k);

/// max over m of ||M w_m - S(theta_m) w_m||_inf / ||w_m||_inf with
/// w_m = (sin(j theta_m))_j and theta_m = m pi / J.
double verify_matrix_eigenstructure(int J, const ModelParams& params, double h, double k);

}  // namespace spdemc
