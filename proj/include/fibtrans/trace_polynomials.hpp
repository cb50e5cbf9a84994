#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "fibtrans/trace_map.hpp"

namespace fibtrans {

/// Fibonacci numbers with F_0 = F_1 = 1, so that deg x_k = F_k.
std::int64_t fibonacci(int k);

enum class Precision { Double, Extended };

template <typename Scalar>
struct TraceValue {
    Scalar value{};
    Scalar derivative{};
};

/// x_k and dx_k/dE by the recursion x_{k+1} = 2 x_k x_{k-1} - x_{k-2} from
/// x_{-1} = 1, x_0 = E/2, x_1 = (E - lambda)/2. Valid for k >= -1; works for real or complex E.
template <typename Scalar>
TraceValue<Scalar> evaluate_trace(double lambda, const Scalar& energy, int k) {
    Scalar xm{1}, x0 = energy / Scalar(2), x1 = (energy - Scalar(lambda)) / Scalar(2);
    Scalar dm{0}, d0{0.5}, d1{0.5};
    if (k == -1) return {xm, dm};
    if (k == 0) return {x0, d0};
    for (int j = 1; j < k; ++j) {
        const Scalar x2 = Scalar(2) * x1 * x0 - xm;
        const Scalar d2 = Scalar(2) * (d1 * x0 + x1 * d0) - dm;
        xm = x0;
        x0 = x1;
        x1 = x2;
        dm = d0;
        d0 = d1;
        d1 = d2;
    }
    return {x1, d1};
}

/// Sign of x_k(E) in {-1, 0, +1}. Past |x| > 1e100 the recursion continues on (sign, log|x|)
/// so the result is exact in sign even where x_k overflows a double.
template <typename Scalar>
int trace_sign(double lambda, const Scalar& energy, int k);

struct TraceEntry {
    int k = 0;
    double value = 0.0;
    double derivative = 0.0;
};

struct TraceSequence {
    double lambda = 0.0;
    double energy = 0.0;
    // Entries for k = -1, 0, 1, ... in order.
    std::vector<TraceEntry> values;
    std::optional<int> escaped_at;
    bool overflowed = false;

    const TraceEntry& at(int k) const { return values.at(static_cast<std::size_t>(k + 1)); }
    int last_index() const { return values.back().k; }
};

inline constexpr double default_escape_threshold = 1.0 + 1e-9;

/// Runs the recursion up to k_max. Escape fires at the first k with |x_{k-1}| > 1 and
/// |x_k| > escape_threshold; the overflow guard at 1e100 also ends the run as escaped.
TraceSequence iterate_traces(double lambda, double energy, int k_max,
                             double escape_threshold = default_escape_threshold,
                             Precision precision = Precision::Double);

/// True if the escape rule does not fire within `iterations` steps.
bool survives_escape_test(double lambda, double energy, int iterations,
                          double escape_threshold = default_escape_threshold);

struct ZeroOptions {
    double root_tol = 1e-12;
    Precision precision = Precision::Double;
};

/// Eigenvalues of the Dirichlet restriction of the zero-phase operator to sites 1..F_k - 1.
/// They interlace the zeros of x_k.
std::vector<double> dirichlet_eigenvalues(double lambda, int k);

/// All F_k zeros of x_k, ascending. Throws NumericalFailure if the count is off.
std::vector<double> zeros_of_xk(double lambda, int k, const ZeroOptions& opts = {});

struct KeyZero {
    int k = 0;
    double energy = 0.0;
    double derivative = 0.0;
    double rate = 0.0;
    int shadow_length = 0;
};

struct KeyZeroOptions {
    double eta = 0.05;
    int k_min = 8;
    double lambda_small = 0.5;
    ZeroOptions zeros{};
};

/// Number of consecutive final orbit points T^j(l(E)), j = k-1, k-2, ..., 0, within distance
/// eta of the six-cycle through (0, 0, sqrt(1 + lambda^2/4)).
int shadow_length(double lambda, double energy, int k, double eta);

/// Per-zero data (derivative, rate, shadow) for all zeros of x_k.
std::vector<KeyZero> zero_table(double lambda, int k, double eta, const ZeroOptions& opts = {});

/// The zero of x_k with the longest shadow; ties by |rate - d(lambda)|, then by energy.
KeyZero key_zero(double lambda, int k, const KeyZeroOptions& opts = {});

struct Band {
    int k = 0;
    double delta = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    int zeros_inside = 0;
    bool clipped = false;

    double length() const { return hi - lo; }
    bool contains(double e) const { return lo <= e && e <= hi; }
};

/// Maximal intervals of {E : |x_k(E)| <= 1 + delta}, ascending.
std::vector<Band> band_components(double lambda, int k, double delta, const ZeroOptions& opts = {});

/// Same, reusing zeros already computed by zeros_of_xk.
std::vector<Band> band_components(double lambda, int k, double delta, const std::vector<double>& zeros,
                                  const ZeroOptions& opts = {});

/// The band containing `energy`, if any.
std::optional<Band> band_containing(const std::vector<Band>& bands, double energy);

}  // namespace fibtrans
