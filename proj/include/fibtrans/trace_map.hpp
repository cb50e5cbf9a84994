#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "fibtrans/errors.hpp"

namespace fibtrans {

inline constexpr double golden_ratio = std::numbers::phi;
inline constexpr double inverse_golden_ratio = std::numbers::phi - 1.0;
inline const double log_golden_ratio = std::log(std::numbers::phi);

// A point of R^3 in trace coordinates.
template <typename Scalar>
struct TracePointT {
    Scalar x{};
    Scalar y{};
    Scalar z{};

    Eigen::Matrix<Scalar, 3, 1> vector() const { return {x, y, z}; }
    bool operator==(const TracePointT&) const = default;
};

using TracePoint = TracePointT<double>;

class Coupling {
public:
    explicit Coupling(double lambda) : lambda_(lambda) {
        if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
            throw ConfigError("coupling must be finite and non-negative");
        }
    }

    double lambda() const { return lambda_; }
    // Level 1 + lambda^2/4 of x^2+y^2+z^2-2xyz on the invariant surface.
    double surface_level() const { return 1.0 + 0.25 * lambda_ * lambda_; }
    // Height a of the six-cycle through (0, 0, a).
    double cycle_height() const { return std::sqrt(surface_level()); }

private:
    double lambda_;
};

template <typename Scalar>
TracePointT<Scalar> step(const TracePointT<Scalar>& p) {
    return {Scalar(2) * p.x * p.y - p.z, p.x, p.y};
}

template <typename Scalar>
TracePointT<Scalar> inverse_step(const TracePointT<Scalar>& p) {
    return {p.y, p.z, Scalar(2) * p.y * p.z - p.x};
}

/// Fricke-Vogt invariant G = x^2 + y^2 + z^2 - 2xyz - 1.
template <typename Scalar>
Scalar invariant(const TracePointT<Scalar>& p) {
    return p.x * p.x + p.y * p.y + p.z * p.z - Scalar(2) * p.x * p.y * p.z - Scalar(1);
}

template <typename Scalar>
bool on_surface(const TracePointT<Scalar>& p, const Coupling& c, double tol = 1e-9) {
    using std::abs;
    return abs(invariant(p) - Scalar(0.25 * c.lambda() * c.lambda())) <= Scalar(tol);
}

template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> jacobian(const TracePointT<Scalar>& p) {
    Eigen::Matrix<Scalar, 3, 3> d;
    d << Scalar(2) * p.y, Scalar(2) * p.x, Scalar(-1),
         Scalar(1), Scalar(0), Scalar(0),
         Scalar(0), Scalar(1), Scalar(0);
    return d;
}

// Point of the line E -> ((E - lambda)/2, E/2, 1) lying on the surface of level lambda^2/4.
template <typename Scalar>
TracePointT<Scalar> line_point(double lambda, const Scalar& energy) {
    return {(energy - Scalar(lambda)) / Scalar(2), energy / Scalar(2), Scalar(1)};
}

/// Orbit of (0, 0, a) under the trace map; closes after six steps.
inline std::array<TracePoint, 6> six_cycle(const Coupling& c) {
    std::array<TracePoint, 6> pts;
    pts[0] = {0.0, 0.0, c.cycle_height()};
    for (std::size_t i = 1; i < pts.size(); ++i) pts[i] = step(pts[i - 1]);
    return pts;
}

/// Differential of T^6 at (0, 0, a), composed one step at a time along the orbit.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> six_step_jacobian(const Scalar& a) {
    TracePointT<Scalar> p{Scalar(0), Scalar(0), a};
    Eigen::Matrix<Scalar, 3, 3> acc = Eigen::Matrix<Scalar, 3, 3>::Identity();
    for (int i = 0; i < 6; ++i) {
        acc = jacobian(p) * acc;
        p = step(p);
    }
    return acc;
}

/// Growth rate d(lambda) = (1/6) log of the unstable multiplier of the six-cycle,
/// (1/6) log(lambda^4/2 + 4 lambda^2 + 9 + (4 + lambda^2) sqrt(lambda^4/4 + 2 lambda^2 + 5)).
template <typename Scalar = double>
Scalar growth_rate(const Scalar& lambda) {
    using std::log;
    using std::sqrt;
    const Scalar l2 = lambda * lambda;
    const Scalar l4 = l2 * l2;
    const Scalar lead = l4 / Scalar(2) + Scalar(4) * l2 + Scalar(9);
    return log(lead + (Scalar(4) + l2) * sqrt(l4 / Scalar(4) + Scalar(2) * l2 + Scalar(5))) / Scalar(6);
}

struct MultiplierReport {
    double lambda = 0.0;
    double closed_form_log_mu = 0.0;
    double numerical_log_mu = 0.0;
    // Ascending.
    std::array<double, 3> dt6_eigenvalues{};
    double d_lambda = 0.0;
};

MultiplierReport multiplier_report(double lambda);

/// Semiconjugacy (theta, phi) -> (cos 2pi(theta+phi), cos 2pi theta, cos 2pi phi) from the torus.
TracePoint torus_semiconjugacy(double theta, double phi);

/// Hyperbolic toral automorphism (theta, phi) -> (theta + phi, theta) mod 1.
std::array<double, 2> torus_automorphism(double theta, double phi);

}  // namespace fibtrans
