#pragma once

#include <complex>
#include <vector>

namespace fibtrans {

struct ComponentContour {
    int k = 0;
    double lambda = 0.0;
    double delta = 0.0;
    std::complex<double> center{};
    // Closed polyline (first vertex not repeated), counter-clockwise.
    std::vector<std::complex<double>> polyline;
    double inscribed_radius = 0.0;
    double circumscribed_radius = 0.0;
    // Half-width of the box the final grid was laid on.
    double box_half_width = 0.0;
    int retries = 0;

    /// Even-odd point-in-polygon test.
    bool contains(std::complex<double> z) const;
};

struct ContourOptions {
    int grid = 256;
    double contour_tol = 1e-10;
    int max_retries = 5;
};

/// Boundary of the connected component of {z : |x_k(z)| <= 1 + delta} that contains `center`
/// (a real zero of x_k). Throws NumericalFailure if the component keeps touching the search box
/// or the traced loop does not wind once around the center.
ComponentContour trace_component(double lambda, int k, double delta, double center,
                                 const ContourOptions& opts = {});

/// Winding number of a closed polyline around a point.
int winding_number(const std::vector<std::complex<double>>& polyline, std::complex<double> point);

struct KoebeRadii {
    double r_inner = 0.0;
    double r_outer = 0.0;
};

/// Koebe distortion radii around a simple zero with |x_k'(E_k)| = |derivative|:
/// r_outer = (1+d)(1+2d)^2 / d^2 / |x'|,  r_inner = (1+d)(1+2d)^2 / (2+3d)^2 / |x'|.
KoebeRadii koebe_bounds(int k, double delta, double derivative);

/// The same radii with |x'| replaced by exp(k (d(lambda) +- eps)): the inner ball uses the upper
/// derivative estimate and the outer ball the lower one.
KoebeRadii distortion_radii(double lambda, int k, double delta, double eps);

}  // namespace fibtrans
