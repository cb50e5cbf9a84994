#include "fibtrans/trace_map.hpp"

#include <algorithm>
#include <string>

namespace fibtrans {

namespace {

double wrap_unit(double t) {
    double r = t - std::floor(t);
    return r >= 1.0 ? 0.0 : r;
}

}  // namespace

MultiplierReport multiplier_report(double lambda) {
    const Coupling c(lambda);
    const Eigen::Matrix3d d6 = six_step_jacobian(c.cycle_height());

    // The third coordinate decouples; anything else means the orbit drifted off the cycle.
    const double leak = std::max({std::abs(d6(0, 2)), std::abs(d6(1, 2)), std::abs(d6(2, 0)),
                                  std::abs(d6(2, 1)), std::abs(d6(2, 2) - 1.0)});
    if (leak > 1e-9 * d6.norm()) {
        throw NumericalFailure("six-step Jacobian does not decouple at lambda=" + std::to_string(lambda));
    }

    // Symmetric 2x2 block [[p, q], [q, r]] with determinant 1.
    const double p = d6(0, 0), q = d6(0, 1), r = d6(1, 1);
    const double mean = 0.5 * (p + r);
    const double radius = std::hypot(0.5 * (p - r), q);
    const double large = mean + radius;
    // Product form of the small root avoids cancellation.
    const double small = (p * r - q * d6(1, 0)) / large;
    if (!(large > 1.0) || !std::isfinite(large)) {
        throw NumericalFailure("six-step Jacobian eigenvalues not hyperbolic at lambda=" + std::to_string(lambda));
    }

    MultiplierReport rep;
    rep.lambda = lambda;
    rep.dt6_eigenvalues = {small, d6(2, 2), large};
    std::sort(rep.dt6_eigenvalues.begin(), rep.dt6_eigenvalues.end());
    rep.numerical_log_mu = std::log(large) / 6.0;
    rep.d_lambda = growth_rate(lambda);
    rep.closed_form_log_mu = rep.d_lambda;
    return rep;
}

TracePoint torus_semiconjugacy(double theta, double phi) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double t = wrap_unit(theta);
    const double f = wrap_unit(phi);
    return {std::cos(two_pi * wrap_unit(t + f)), std::cos(two_pi * t), std::cos(two_pi * f)};
}

std::array<double, 2> torus_automorphism(double theta, double phi) {
    return {wrap_unit(theta + phi), wrap_unit(theta)};
}

}  // namespace fibtrans
