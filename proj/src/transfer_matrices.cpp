#include "fibtrans/transfer_matrices.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fibtrans/errors.hpp"
#include "fibtrans/trace_polynomials.hpp"

namespace fibtrans {

namespace {

// Long double keeps frac(n alpha + omega) accurate well past the n ~ 1e5 used here.
constexpr long double alpha_ld = 0.618033988749894848204586834365638118L;

void fit_line(const std::vector<double>& xs, const std::vector<double>& ys, double& slope, double& intercept,
              double& rms) {
    const auto n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    slope = sxy / sxx;
    intercept = my - slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (intercept + slope * xs[i]);
        ss += r * r;
    }
    rms = std::sqrt(ss / n);
}

}  // namespace

bool potential_site(double omega, long n) {
    const long double t = static_cast<long double>(n) * alpha_ld + static_cast<long double>(omega);
    const long double frac = t - std::floor(t);
    return frac >= 1.0L - alpha_ld && frac < 1.0L;
}

TransferMatrix transfer_step(double lambda, double omega, Complex z, long site) {
    TransferMatrix t;
    t << z - potential(omega, site, lambda), -1.0, 1.0, 0.0;
    return t;
}

TransferMatrix transfer_product(double lambda, double omega, Complex z, long n) {
    if (n == 0) throw ConfigError("transfer_product: n must be nonzero");
    TransferMatrix m = TransferMatrix::Identity();
    if (n > 0) {
        for (long l = 1; l <= n; ++l) m = transfer_step(lambda, omega, z, l) * m;
        return m;
    }
    for (long l = -1; l >= n; --l) {
        // Inverse of [[a, -1], [1, 0]] is [[0, 1], [-1, a]].
        TransferMatrix inv;
        inv << 0.0, 1.0, -1.0, z - potential(omega, l, lambda);
        m = inv * m;
    }
    return m;
}

double operator_norm(const TransferMatrix& m) {
    const double fro2 = m.squaredNorm();
    const double det = std::abs(m.determinant());
    const double disc = std::max(0.0, fro2 * fro2 - 4.0 * det * det);
    return std::sqrt(0.5 * (fro2 + std::sqrt(disc)));
}

double half_trace_check(double lambda, Complex z, int k) {
    if (k < 1) throw ConfigError("half_trace_check: k must be >= 1");
    const long n = static_cast<long>(fibonacci(k));
    const Complex half_trace = 0.5 * transfer_product(lambda, 0.0, z, n).trace();
    const Complex xk = evaluate_trace(lambda, z, k).value;
    return std::abs(half_trace - xk) / std::max(1.0, std::abs(xk));
}

double golden_cubic_root(double lambda) {
    // Depressed cubic x^3 + p x + q with p = -(2 + lambda), q = -1.
    const double p = -(2.0 + lambda);
    const double q = -1.0;
    const double disc = 4.0 * p * p * p + 27.0 * q * q;
    if (disc < 0.0) {
        const double m = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
        return m * std::cos(std::acos(arg) / 3.0);
    }
    // One real root (only for lambda < -0.11, kept for completeness).
    const double s = std::sqrt(disc / 108.0);
    return std::cbrt(-q / 2.0 + s) + std::cbrt(-q / 2.0 - s);
}

double xi_threshold(double lambda) {
    const double a = golden_cubic_root(lambda);
    return 2.0 * std::log(std::sqrt(5.0 + 2.0 * lambda) * (3.0 + lambda) * a) / std::log(std::numbers::phi);
}

PowerLawFit empirical_xi(double lambda, double omega, Complex z, long n_max, std::optional<LevelMembership> level) {
    if (n_max < 10) throw ConfigError("empirical_xi: n_max must be >= 10");
    if (level) {
        const double mod = std::abs(evaluate_trace(lambda, z, level->k).value);
        if (!(mod <= 1.0 + level->delta)) {
            throw ConfigError("empirical_xi: z is not in the level set |x_k| <= 1 + delta");
        }
    }
    PowerLawFit fit;
    fit.lambda = lambda;
    fit.omega = omega;
    fit.z = z;
    fit.n_max = n_max;
    fit.samples.reserve(static_cast<std::size_t>(n_max));
    TransferMatrix m = TransferMatrix::Identity();
    for (long n = 1; n <= n_max; ++n) {
        m = transfer_step(lambda, omega, z, n) * m;
        fit.samples.push_back({n, std::log(operator_norm(m))});
    }
    std::vector<double> xs, ys;
    const long start = std::max<long>(1, n_max / 10);
    for (const auto& s : fit.samples) {
        if (s.n < start) continue;
        xs.push_back(std::log(static_cast<double>(s.n)));
        ys.push_back(s.log_norm);
    }
    fit_line(xs, ys, fit.xi_hat, fit.intercept, fit.residual);
    fit.xi_bound = xi_threshold(lambda);
    return fit;
}

double max_normalized_norm(double lambda, double omega, Complex z, long n_max, double xi) {
    TransferMatrix m = TransferMatrix::Identity();
    double worst = 0.0;
    for (long n = 1; n <= n_max; ++n) {
        m = transfer_step(lambda, omega, z, n) * m;
        worst = std::max(worst, operator_norm(m) / std::pow(static_cast<double>(n), xi));
    }
    return worst;
}

}  // namespace fibtrans
