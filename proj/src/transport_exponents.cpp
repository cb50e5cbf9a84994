#include "fibtrans/transport_exponents.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fibtrans/errors.hpp"
#include "fibtrans/trace_map.hpp"
#include "fibtrans/transfer_matrices.hpp"

namespace fibtrans {

namespace {

struct Line {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};

Line least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
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
    Line l;
    l.slope = sxy / sxx;
    l.intercept = my - l.slope * mx;
    if (xs.size() > 2) {
        double ss = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double r = ys[i] - l.intercept - l.slope * xs[i];
            ss += r * r;
        }
        l.slope_stderr = std::sqrt(ss / (n - 2) / sxx);
    }
    return l;
}

}  // namespace

TransportFit fit_beta(const DynamicsResult& result, double p, int window) {
    const auto it = result.moments.find(p);
    if (it == result.moments.end()) {
        std::ostringstream msg;
        msg << "fit_beta: no moments recorded for p = " << p;
        throw ConfigError(msg.str());
    }
    const auto& ts = result.T_grid;
    if (ts.size() < 8) throw ConfigError("fit_beta: need at least 8 T values");
    if (std::log10(ts.back() / ts.front()) < 1.5) throw ConfigError("fit_beta: T grid must span at least 1.5 decades");
    if (window < 2 || static_cast<std::size_t>(window) > ts.size()) throw ConfigError("fit_beta: bad window size");

    std::vector<double> xs(ts.size()), ys(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (!(it->second[i] > 0.0)) throw NumericalFailure("fit_beta: non-positive moment");
        xs[i] = std::log(ts[i]);
        ys[i] = std::log(it->second[i]) / p;
    }
    TransportFit fit;
    fit.p = p;
    fit.window = window;
    fit.global_slope = least_squares(xs, ys).slope;
    for (std::size_t i = 0; i + window <= ts.size(); ++i) {
        const std::vector<double> wx(xs.begin() + i, xs.begin() + i + window);
        const std::vector<double> wy(ys.begin() + i, ys.begin() + i + window);
        fit.windows.push_back({i, ts[i], ts[i + window - 1], least_squares(wx, wy).slope});
    }
    const auto [lo, hi] = std::minmax_element(fit.windows.begin(), fit.windows.end(),
                                              [](const auto& a, const auto& b) { return a.slope < b.slope; });
    fit.beta_minus_hat = lo->slope;
    fit.beta_plus_hat = hi->slope;
    return fit;
}

double alpha_lower(double lambda) { return log_golden_ratio / growth_rate(lambda); }

double beta_lower(double lambda, double p) {
    if (!(p > 0.0)) throw ConfigError("beta_lower: p must be > 0");
    const double a = alpha_lower(lambda);
    return a - (2.0 / p) * (1.0 + xi_threshold(lambda) * a);
}

BoundReport theoretical_bounds(double lambda, const std::vector<double>& p_values) {
    if (!(lambda > 0.0)) throw ConfigError("theoretical_bounds: lambda must be > 0");
    BoundReport r;
    r.lambda = lambda;
    r.d_lambda = growth_rate(lambda);
    r.xi_used = xi_threshold(lambda);
    r.alpha_lower = alpha_lower(lambda);
    r.p_values = p_values;
    for (double p : p_values) r.beta_lower.push_back(beta_lower(lambda, p));
    return r;
}

PowerFit alpha_gap_fit(double lambda_lo, double lambda_hi, int count) {
    if (!(lambda_lo > 0.0) || !(lambda_hi > lambda_lo) || count < 3) {
        throw ConfigError("alpha_gap_fit: need 0 < lo < hi and count >= 3");
    }
    PowerFit fit;
    std::vector<double> xs, ys;
    for (int i = 0; i < count; ++i) {
        const double lambda = lambda_lo * std::pow(lambda_hi / lambda_lo, static_cast<double>(i) / (count - 1));
        const double gap = 1.0 - alpha_lower(lambda);
        fit.lambdas.push_back(lambda);
        fit.gaps.push_back(gap);
        xs.push_back(std::log(lambda));
        ys.push_back(std::log(gap));
    }
    const Line l = least_squares(xs, ys);
    fit.exponent = l.slope;
    fit.coefficient = std::exp(l.intercept);
    fit.exponent_stderr = l.slope_stderr;
    return fit;
}

CorollaryReport corollary_check(double lambda, double dim_estimate) {
    if (lambda < 0.0) throw ConfigError("corollary_check: lambda must be >= 0");
    CorollaryReport r;
    r.lambda = lambda;
    r.alpha_lower = alpha_lower(lambda);
    r.dim_estimate = dim_estimate;
    r.gap = r.alpha_lower - dim_estimate;
    // Rounding puts alpha_lower(0) a few ulps off 1.
    r.strict = r.gap > 1e-12;
    return r;
}

}  // namespace fibtrans
