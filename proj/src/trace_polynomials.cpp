#include "fibtrans/trace_polynomials.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "fibtrans/transfer_matrices.hpp"

namespace fibtrans {

namespace {

constexpr double overflow_guard = 1e100;
// Merge slack for touching bands (|x_k| equal to 1 + delta up to rounding at a critical point).
constexpr double edge_value_tol = 1e-9;

// s * exp(l); s == 0 encodes zero.
struct SignedLog {
    int sign = 0;
    double log_abs = -std::numeric_limits<double>::infinity();

    static SignedLog from(double v) {
        if (v == 0.0) return {};
        return {v > 0 ? 1 : -1, std::log(std::abs(v))};
    }
};

SignedLog signed_log_add(SignedLog a, SignedLog b) {
    if (a.sign == 0) return b;
    if (b.sign == 0) return a;
    if (b.log_abs > a.log_abs) std::swap(a, b);
    const double ratio = std::exp(b.log_abs - a.log_abs) * (a.sign == b.sign ? 1.0 : -1.0);
    if (ratio == -1.0) return {};
    return {a.sign, a.log_abs + std::log1p(ratio)};
}

// Value of x_k as (sign, log|x_k|), switching to log arithmetic past the overflow guard.
template <typename Scalar>
SignedLog trace_signed_log(double lambda, const Scalar& energy, int k) {
    Scalar xm{1}, x0 = energy / Scalar(2), x1 = (energy - Scalar(lambda)) / Scalar(2);
    if (k == -1) return SignedLog::from(static_cast<double>(xm));
    if (k == 0) return SignedLog::from(static_cast<double>(x0));
    int j = 1;
    for (; j < k; ++j) {
        using std::abs;
        if (abs(x1) > Scalar(overflow_guard) || abs(x0) > Scalar(overflow_guard)) break;
        const Scalar x2 = Scalar(2) * x1 * x0 - xm;
        xm = x0;
        x0 = x1;
        x1 = x2;
    }
    if (j >= k) return SignedLog::from(static_cast<double>(x1));

    SignedLog lm = SignedLog::from(static_cast<double>(xm));
    SignedLog l0 = SignedLog::from(static_cast<double>(x0));
    SignedLog l1 = SignedLog::from(static_cast<double>(x1));
    for (; j < k; ++j) {
        SignedLog prod{l1.sign * l0.sign, std::log(2.0) + l1.log_abs + l0.log_abs};
        if (prod.sign == 0) prod = {};
        const SignedLog l2 = signed_log_add(prod, {-lm.sign, lm.log_abs});
        lm = l0;
        l0 = l1;
        l1 = l2;
    }
    return l1;
}

// sign(|x_k(E)| - level), robust to overflow.
int excess_sign(double lambda, double energy, int k, double level) {
    const SignedLog v = trace_signed_log(lambda, energy, k);
    if (v.sign == 0) return -1;
    const double diff = v.log_abs - std::log(level);
    if (diff > 0) return 1;
    if (diff < 0) return -1;
    return 0;
}

template <typename Scalar>
double bisect_sign_change(double lambda, int k, double a, double b, int sign_a, double root_tol) {
    // Invariant: sign(x_k(a)) == sign_a, sign(x_k(b)) == -sign_a.
    while (b - a > root_tol) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        const int s = trace_sign<Scalar>(lambda, Scalar(mid), k);
        if (s == 0) return mid;
        if (s == sign_a) {
            a = mid;
        } else {
            b = mid;
        }
    }
    double root = 0.5 * (a + b);
    // Safeguarded Newton polish.
    const auto tv = evaluate_trace<Scalar>(lambda, Scalar(root), k);
    if (tv.derivative != Scalar(0)) {
        const double cand = root - static_cast<double>(tv.value / tv.derivative);
        if (std::isfinite(cand) && cand >= a && cand <= b) root = cand;
    }
    return root;
}

template <typename Scalar>
std::vector<double> zeros_impl(double lambda, int k, double root_tol) {
    const std::int64_t degree = fibonacci(k);
    std::vector<double> brackets;
    brackets.reserve(static_cast<std::size_t>(degree) + 1);
    brackets.push_back(-2.0 - lambda - 0.1);
    for (double mu : dirichlet_eigenvalues(lambda, k)) brackets.push_back(mu);
    brackets.push_back(2.0 + lambda + 0.1);

    std::vector<double> zeros;
    zeros.reserve(static_cast<std::size_t>(degree));
    int sign_left = trace_sign<Scalar>(lambda, Scalar(brackets.front()), k);
    for (std::size_t i = 0; i + 1 < brackets.size(); ++i) {
        const double a = brackets[i];
        const double b = brackets[i + 1];
        const int sign_right = trace_sign<Scalar>(lambda, Scalar(b), k);
        if (sign_left == 0 || sign_right == 0 || sign_left == sign_right || !(a < b)) {
            std::ostringstream msg;
            msg << "missed zero of x_k: no sign change on [" << a << ", " << b << "] for k=" << k
                << ", lambda=" << lambda;
            throw NumericalFailure(msg.str());
        }
        zeros.push_back(bisect_sign_change<Scalar>(lambda, k, a, b, sign_left, root_tol));
        sign_left = sign_right;
    }
    if (static_cast<std::int64_t>(zeros.size()) != degree) {
        std::ostringstream msg;
        msg << "found " << zeros.size() << " zeros of x_k, expected F_k=" << degree << " (k=" << k
            << ", lambda=" << lambda << ")";
        throw NumericalFailure(msg.str());
    }
    return zeros;
}

double point_distance(const TracePoint& a, const TracePoint& b) {
    return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
}

// Point where |x_k| exceeds `level` between two consecutive zeros, or nullopt if the
// critical value stays at or below it.
std::optional<double> split_point(double lambda, int k, double left, double right, double level) {
    const double probe = 0.5 * (left + right);
    if (excess_sign(lambda, probe, k, level + edge_value_tol) > 0) return probe;
    double a = left, b = right;
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        const auto tv = evaluate_trace(lambda, mid, k);
        if (!std::isfinite(tv.value) || !std::isfinite(tv.derivative) || std::abs(tv.value) > level + edge_value_tol) return mid;
        // |x_k| increases to the right iff x x' > 0; the critical point is where it peaks.
        if (tv.value * tv.derivative > 0) {
            a = mid;
        } else {
            b = mid;
        }
    }
    const double crit = 0.5 * (a + b);
    const auto tv = evaluate_trace(lambda, crit, k);
    if (std::abs(tv.value) > level + edge_value_tol) return crit;
    return std::nullopt;
}

// Solves |x_k| = level on [a, b] where excess(a) = sa and excess(b) = -sa.
double bisect_level(double lambda, int k, double a, double b, int sign_a, double level, double tol) {
    while (b - a > tol) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        const int s = excess_sign(lambda, mid, k, level);
        if (s == 0) return mid;
        if (s == sign_a) {
            a = mid;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

std::int64_t fibonacci(int k) {
    if (k < 0 || k > 90) throw ConfigError("fibonacci index out of range");
    std::int64_t a = 1, b = 1;
    for (int i = 0; i < k; ++i) {
        const std::int64_t c = a + b;
        a = b;
        b = c;
    }
    return a;
}

template <typename Scalar>
int trace_sign(double lambda, const Scalar& energy, int k) {
    return trace_signed_log(lambda, energy, k).sign;
}

template int trace_sign<double>(double, const double&, int);
template int trace_sign<long double>(double, const long double&, int);

namespace {

template <typename Scalar>
TraceSequence iterate_impl(double lambda, double energy, int k_max, double escape_threshold) {
    TraceSequence seq;
    seq.lambda = lambda;
    seq.energy = energy;
    seq.values.reserve(static_cast<std::size_t>(k_max) + 2);

    const Scalar e(energy);
    Scalar xm{1}, x0 = e / Scalar(2), x1 = (e - Scalar(lambda)) / Scalar(2);
    Scalar dm{0}, d0{0.5}, d1{0.5};
    auto push = [&](int k, const Scalar& x, const Scalar& d) {
        seq.values.push_back({k, static_cast<double>(x), static_cast<double>(d)});
    };
    push(-1, xm, dm);
    push(0, x0, d0);
    push(1, x1, d1);

    using std::abs;
    auto escaped = [&](const Scalar& prev, const Scalar& cur) {
        return abs(prev) > Scalar(1) && abs(cur) > Scalar(escape_threshold);
    };
    if (escaped(x0, x1)) {
        seq.escaped_at = 1;
        return seq;
    }
    for (int k = 2; k <= k_max; ++k) {
        const Scalar x2 = Scalar(2) * x1 * x0 - xm;
        const Scalar d2 = Scalar(2) * (d1 * x0 + x1 * d0) - dm;
        xm = x0;
        x0 = x1;
        x1 = x2;
        dm = d0;
        d0 = d1;
        d1 = d2;
        push(k, x1, d1);
        if (!(abs(x1) <= Scalar(overflow_guard)) || !(abs(d1) <= Scalar(overflow_guard))) {
            seq.escaped_at = k;
            seq.overflowed = true;
            return seq;
        }
        if (escaped(x0, x1)) {
            seq.escaped_at = k;
            return seq;
        }
    }
    return seq;
}

}  // namespace

TraceSequence iterate_traces(double lambda, double energy, int k_max, double escape_threshold,
                             Precision precision) {
    if (k_max < 1) throw ConfigError("iterate_traces: k_max must be >= 1");
    if (!(escape_threshold > 1.0)) throw ConfigError("iterate_traces: escape threshold must exceed 1");
    if (precision == Precision::Extended) {
        return iterate_impl<long double>(lambda, energy, k_max, escape_threshold);
    }
    return iterate_impl<double>(lambda, energy, k_max, escape_threshold);
}

bool survives_escape_test(double lambda, double energy, int iterations, double escape_threshold) {
    return !iterate_traces(lambda, energy, iterations, escape_threshold).escaped_at.has_value();
}

std::vector<double> dirichlet_eigenvalues(double lambda, int k) {
    const std::int64_t n = fibonacci(k) - 1;
    if (n <= 0) return {};
    Eigen::VectorXd diag(n);
    for (std::int64_t i = 0; i < n; ++i) diag(i) = potential(0.0, i + 1, lambda);
    if (n == 1) return {diag(0)};
    const Eigen::VectorXd sub = Eigen::VectorXd::Ones(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericalFailure("Dirichlet eigenvalue solve failed for k=" + std::to_string(k));
    }
    const Eigen::VectorXd& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

std::vector<double> zeros_of_xk(double lambda, int k, const ZeroOptions& opts) {
    if (k < 1) throw ConfigError("zeros_of_xk: k must be >= 1");
    if (opts.precision == Precision::Extended) return zeros_impl<long double>(lambda, k, opts.root_tol);
    return zeros_impl<double>(lambda, k, opts.root_tol);
}

int shadow_length(double lambda, double energy, int k, double eta) {
    const auto cycle = six_cycle(Coupling(lambda));
    // xs[i] holds x_{i-1}; orbit point j is (x_{j+1}, x_j, x_{j-1}).
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(k) + 2);
    xs.push_back(1.0);
    xs.push_back(0.5 * energy);
    xs.push_back(0.5 * (energy - lambda));
    for (int j = 2; j <= k; ++j) {
        const std::size_t n = xs.size();
        xs.push_back(2.0 * xs[n - 1] * xs[n - 2] - xs[n - 3]);
    }
    int count = 0;
    for (int j = k - 1; j >= 0; --j) {
        const auto idx = static_cast<std::size_t>(j);
        const TracePoint p{xs[idx + 2], xs[idx + 1], xs[idx]};
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : cycle) best = std::min(best, point_distance(p, c));
        if (!(best < eta)) break;
        ++count;
    }
    return count;
}

std::vector<KeyZero> zero_table(double lambda, int k, double eta, const ZeroOptions& opts) {
    const auto zeros = zeros_of_xk(lambda, k, opts);
    std::vector<KeyZero> table;
    table.reserve(zeros.size());
    for (double e : zeros) {
        KeyZero z;
        z.k = k;
        z.energy = e;
        z.derivative = evaluate_trace(lambda, e, k).derivative;
        z.rate = std::log(std::abs(z.derivative)) / k;
        z.shadow_length = shadow_length(lambda, e, k, eta);
        table.push_back(z);
    }
    return table;
}

KeyZero key_zero(double lambda, int k, const KeyZeroOptions& opts) {
    if (!(lambda > 0.0 && lambda < opts.lambda_small)) {
        throw ConfigError("key_zero: lambda must lie in (0, lambda_small)");
    }
    if (k < opts.k_min) throw ConfigError("key_zero: k below k_min");
    const double d = growth_rate(lambda);
    const auto table = zero_table(lambda, k, opts.eta, opts.zeros);
    const auto better = [d](const KeyZero& a, const KeyZero& b) {
        if (a.shadow_length != b.shadow_length) return a.shadow_length > b.shadow_length;
        const double ga = std::abs(a.rate - d), gb = std::abs(b.rate - d);
        if (ga != gb) return ga < gb;
        return a.energy < b.energy;
    };
    return *std::min_element(table.begin(), table.end(), better);
}

std::vector<Band> band_components(double lambda, int k, double delta, const ZeroOptions& opts) {
    return band_components(lambda, k, delta, zeros_of_xk(lambda, k, opts), opts);
}

std::vector<Band> band_components(double lambda, int k, double delta, const std::vector<double>& zeros,
                                  const ZeroOptions& opts) {
    if (!(delta >= 0.0)) throw ConfigError("band_components: delta must be >= 0");
    if (zeros.empty()) return {};
    const double level = 1.0 + delta;
    const double tol = std::max(opts.root_tol, 1e-15);

    // Outer edges: |x_k| is monotone outside the extreme zeros.
    auto outer_edge = [&](double zero, double dir, bool& clipped) {
        double width = 2.0 + lambda + 0.1;
        double probe = zero + dir * width;
        while (excess_sign(lambda, probe, k, level) <= 0) {
            width *= 2.0;
            if (width > 1e6) {
                clipped = true;
                return probe;
            }
            probe = zero + dir * width;
        }
        return dir < 0 ? bisect_level(lambda, k, probe, zero, 1, level, tol)
                       : bisect_level(lambda, k, zero, probe, -1, level, tol);
    };

    std::vector<Band> bands;
    Band current;
    current.k = k;
    current.delta = delta;
    current.lo = outer_edge(zeros.front(), -1.0, current.clipped);
    current.zeros_inside = 1;
    for (std::size_t i = 1; i < zeros.size(); ++i) {
        const auto split = split_point(lambda, k, zeros[i - 1], zeros[i], level);
        if (!split) {
            ++current.zeros_inside;
            continue;
        }
        current.hi = bisect_level(lambda, k, zeros[i - 1], *split, -1, level, tol);
        bands.push_back(current);
        current = Band{};
        current.k = k;
        current.delta = delta;
        current.lo = bisect_level(lambda, k, *split, zeros[i], 1, level, tol);
        current.zeros_inside = 1;
    }
    current.hi = outer_edge(zeros.back(), 1.0, current.clipped);
    bands.push_back(current);
    return bands;
}

std::optional<Band> band_containing(const std::vector<Band>& bands, double energy) {
    for (const auto& b : bands) {
        if (b.contains(energy)) return b;
    }
    return std::nullopt;
}

}  // namespace fibtrans
