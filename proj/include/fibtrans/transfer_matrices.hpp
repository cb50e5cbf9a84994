#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace fibtrans {

using Complex = std::complex<double>;
using TransferMatrix = Eigen::Matrix2cd;

/// Characteristic function of [1 - alpha, 1) at (n alpha + omega) mod 1, alpha = 1/phi.
bool potential_site(double omega, long n);

/// Fibonacci potential lambda * chi_{[1-alpha,1)}(n alpha + omega mod 1).
inline double potential(double omega, long n, double lambda) {
    return potential_site(omega, n) ? lambda : 0.0;
}

/// One-site factor [[z - V(l), -1], [1, 0]].
TransferMatrix transfer_step(double lambda, double omega, Complex z, long site);

/// M(n) = T(n)...T(1) for n >= 1 and T(n)^{-1}...T(-1)^{-1} for n <= -1. Throws for n == 0.
TransferMatrix transfer_product(double lambda, double omega, Complex z, long n);

/// Largest singular value of a 2x2 matrix, in closed form.
double operator_norm(const TransferMatrix& m);

/// |tr M(F_k; 0, z) / 2 - x_k(z)|, divided by max(1, |x_k(z)|) so the check stays meaningful
/// where both sides are large.
double half_trace_check(double lambda, Complex z, int k);

/// Largest real root of x^3 - (2 + lambda) x - 1.
double golden_cubic_root(double lambda);

/// Exponent threshold 2 log[(5 + 2 lambda)^{1/2} (3 + lambda) a_lambda] / log phi.
double xi_threshold(double lambda);

struct PowerLawSample {
    long n = 0;
    double log_norm = 0.0;
};

struct PowerLawFit {
    double lambda = 0.0;
    double omega = 0.0;
    Complex z{};
    long n_max = 0;
    std::vector<PowerLawSample> samples;
    double xi_hat = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // RMS of the log-log fit
    double xi_bound = 0.0;
};

struct LevelMembership {
    int k = 0;
    double delta = 0.0;
};

/// Least-squares slope of log||M(n)|| against log n over n in [n_max/10, n_max].
/// When `level` is given, z must lie in {|x_k(z)| <= 1 + delta}; throws ConfigError otherwise.
PowerLawFit empirical_xi(double lambda, double omega, Complex z, long n_max,
                         std::optional<LevelMembership> level = std::nullopt);

/// max over 1 <= n <= n_max of ||M(n; omega, z)|| / n^xi.
double max_normalized_norm(double lambda, double omega, Complex z, long n_max, double xi);

}  // namespace fibtrans
