#pragma once

#include <vector>

#include "fibtrans/quantum_dynamics.hpp"

namespace fibtrans {

struct WindowSlope {
    std::size_t first = 0;  // index of the first T in the window
    double t_lo = 0.0;
    double t_hi = 0.0;
    double slope = 0.0;
};

struct TransportFit {
    double p = 0.0;
    double beta_minus_hat = 0.0;
    double beta_plus_hat = 0.0;
    double global_slope = 0.0;  // one fit over the whole grid
    int window = 5;
    std::vector<WindowSlope> windows;
};

inline constexpr double transport_fit_slack = 0.05;

/// Slopes of log<<|X|^p>>(T) / p against log T over sliding windows; the smallest and largest
/// stand in for the liminf and limsup. Needs >= 8 points spanning >= 1.5 decades.
TransportFit fit_beta(const DynamicsResult& result, double p, int window = 5);

struct BoundReport {
    double lambda = 0.0;
    double d_lambda = 0.0;
    double xi_used = 0.0;
    double alpha_lower = 0.0;
    std::vector<double> p_values;
    std::vector<double> beta_lower;
};

/// alpha_lower = log(phi) / d(lambda) and beta_lower(p) = alpha_lower - (2/p)(1 + xi alpha_lower)
/// with xi the explicit power-law threshold.
BoundReport theoretical_bounds(double lambda, const std::vector<double>& p_values);
double alpha_lower(double lambda);
double beta_lower(double lambda, double p);

struct PowerFit {
    double exponent = 0.0;
    double coefficient = 0.0;
    double exponent_stderr = 0.0;
    std::vector<double> lambdas;
    std::vector<double> gaps;
};

/// Fits 1 - alpha_lower(lambda) = c lambda^e over `count` log-spaced couplings in [lo, hi].
PowerFit alpha_gap_fit(double lambda_lo, double lambda_hi, int count);

struct CorollaryReport {
    double lambda = 0.0;
    double alpha_lower = 0.0;
    double dim_estimate = 0.0;
    double gap = 0.0;  // alpha_lower - dim_estimate
    bool strict = false;
};

CorollaryReport corollary_check(double lambda, double dim_estimate);

}  // namespace fibtrans
