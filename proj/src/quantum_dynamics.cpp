#include "fibtrans/quantum_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fibtrans/errors.hpp"
#include "fibtrans/transfer_matrices.hpp"

namespace fibtrans {

struct Hamiltonian::Cache {
    std::once_flag once;
    Eigensystem system;
};

Hamiltonian::Hamiltonian(Eigen::VectorXd diagonal, long origin, double lambda, double omega)
    : diagonal_(std::move(diagonal)), origin_(origin), lambda_(lambda), omega_(omega),
      cache_(std::make_shared<Cache>()) {
    if (diagonal_.size() == 0) throw ConfigError("Hamiltonian: empty diagonal");
    if (origin_ < 0 || origin_ >= size()) throw ConfigError("Hamiltonian: origin outside the window");
}

Hamiltonian Hamiltonian::fibonacci(double lambda, double omega, long L) {
    if (L < 1) throw ConfigError("Hamiltonian::fibonacci: L must be >= 1");
    Eigen::VectorXd diag(2 * L + 1);
    for (long n = -L; n <= L; ++n) diag(n + L) = potential(omega, n, lambda);
    return Hamiltonian(std::move(diag), L, lambda, omega);
}

const Eigensystem& Hamiltonian::eigensystem() const {
    std::call_once(cache_->once, [this] {
        const Eigen::VectorXd sub = Eigen::VectorXd::Ones(size() - 1);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(diagonal_, sub, Eigen::ComputeEigenvectors);
        if (es.info() != Eigen::Success) throw NumericalFailure("Hamiltonian: tridiagonal eigensolver did not converge");
        cache_->system.values = es.eigenvalues();
        cache_->system.vectors = es.eigenvectors();
        cache_->system.origin_weights = cache_->system.vectors.row(origin_).transpose();
    });
    return cache_->system;
}

namespace {

void check_window(const Hamiltonian& h, double T, double window_fraction) {
    if (!(T > 0.0)) throw ConfigError("time scale T must be > 0");
    const double t_max = window_fraction * static_cast<double>(h.reach());
    if (T > t_max) {
        std::ostringstream msg;
        msg << "T = " << T << " exceeds the reliable window T_max = " << t_max << " for L = " << h.reach()
            << "; use L >= " << static_cast<long>(std::ceil(T / window_fraction));
        throw ConfigError(msg.str());
    }
}

double abs_power(long n, double p) {
    return n == 0 ? 0.0 : std::pow(static_cast<double>(std::labs(n)), p);
}

// Adaptive Gauss-Kronrod over [a, b] on panels no wider than `panel`, plus exp-sinh tails.
template <typename F>
double integrate_line(F f, double a, double b, double panel) {
    using boost::math::quadrature::exp_sinh;
    using boost::math::quadrature::gauss_kronrod;
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / panel)));
    const double w = (b - a) / panels;
    double total = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double lo = a + i * w;
        total += gauss_kronrod<double, 31>::integrate(f, lo, lo + w, 20, 1e-12);
    }
    exp_sinh<double> tail;
    total += tail.integrate([&](double u) { return f(b + u); }, 1e-12);
    total += tail.integrate([&](double u) { return f(a - u); }, 1e-12);
    return total;
}

}  // namespace

Eigen::VectorXcd amplitudes(const Hamiltonian& h, double t) {
    const auto& es = h.eigensystem();
    Eigen::VectorXcd phase(es.values.size());
    for (Eigen::Index j = 0; j < es.values.size(); ++j) {
        phase(j) = std::polar(es.origin_weights(j), -es.values(j) * t);
    }
    return es.vectors.cast<std::complex<double>>() * phase;
}

double instantaneous_moment(const Hamiltonian& h, double p, double t) {
    const Eigen::VectorXcd a = amplitudes(h, t);
    double sum = 0.0;
    for (long i = 0; i < h.size(); ++i) sum += abs_power(i - h.origin(), p) * std::norm(a(i));
    return sum;
}

Eigen::VectorXd abel_distribution(const Hamiltonian& h, double T, double window_fraction) {
    check_window(h, T, window_fraction);
    const auto& es = h.eigensystem();
    // Eigenvectors vanishing at the origin do not contribute.
    const double cmax = es.origin_weights.cwiseAbs().maxCoeff();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < es.values.size(); ++j) {
        if (std::abs(es.origin_weights(j)) > 1e-14 * cmax) keep.push_back(j);
    }
    const auto m = static_cast<Eigen::Index>(keep.size());
    Eigen::MatrixXd c(h.size(), m);
    Eigen::VectorXd e(m);
    for (Eigen::Index q = 0; q < m; ++q) {
        c.col(q) = es.vectors.col(keep[q]) * es.origin_weights(keep[q]);
        e(q) = es.values(keep[q]);
    }
    const double g2 = (2.0 / T) * (2.0 / T);
    Eigen::MatrixXd kernel(m, m);
    for (Eigen::Index l = 0; l < m; ++l) {
        for (Eigen::Index j = 0; j < m; ++j) {
            const double d = e(j) - e(l);
            kernel(j, l) = g2 / (g2 + d * d);
        }
    }
    const Eigen::MatrixXd ck = c * kernel;
    return ck.cwiseProduct(c).rowwise().sum();
}

double moment_of(const Hamiltonian& h, const Eigen::VectorXd& distribution, double p) {
    double sum = 0.0;
    for (long i = 0; i < h.size(); ++i) sum += abs_power(i - h.origin(), p) * distribution(i);
    return sum;
}

double abel_moment(const Hamiltonian& h, double p, double T, double window_fraction) {
    if (!(p > 0.0)) throw ConfigError("abel_moment: p must be > 0");
    return moment_of(h, abel_distribution(h, T, window_fraction), p);
}

std::string to_string(Route r) { return r == Route::Time ? "time" : "resolvent"; }

double outside_of(const Hamiltonian& h, const Eigen::VectorXd& distribution, long N) {
    double sum = 0.0;
    for (long i = 0; i < h.size(); ++i) {
        if (std::labs(i - h.origin()) >= N) sum += distribution(i);
    }
    return sum;
}

double resolvent_tail_mass(const Hamiltonian& h, long N, std::complex<double> z) {
    // Thomas algorithm for (H - z) w = delta_0 with unit off-diagonals.
    using cd = std::complex<double>;
    const long n = h.size();
    std::vector<cd> cprime(static_cast<std::size_t>(n)), dprime(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        const cd b = h.diagonal()(i) - z;
        const cd rhs = i == h.origin() ? cd(1.0) : cd(0.0);
        if (i == 0) {
            cprime[0] = 1.0 / b;
            dprime[0] = rhs / b;
        } else {
            const cd denom = b - cprime[i - 1];
            cprime[i] = 1.0 / denom;
            dprime[i] = (rhs - dprime[i - 1]) / denom;
        }
    }
    double sum = 0.0;
    cd w = dprime[n - 1];
    for (long i = n - 1; i >= 0; --i) {
        if (i < n - 1) w = dprime[i] - cprime[i] * w;
        if (std::labs(i - h.origin()) >= N) sum += std::norm(w);
    }
    return sum;
}

double outside_prob(const Hamiltonian& h, long N, double T, Route route, double window_fraction) {
    if (N < 0) throw ConfigError("outside_prob: N must be >= 0");
    check_window(h, T, window_fraction);
    if (route == Route::Time) return outside_of(h, abel_distribution(h, T, window_fraction), N);
    const double eta = 1.0 / T;
    const double lo = h.diagonal().minCoeff() - 3.0;
    const double hi = h.diagonal().maxCoeff() + 3.0;
    const double integral = integrate_line(
        [&](double e) { return resolvent_tail_mass(h, N, {e, eta}); }, lo, hi, 4.0 * eta);
    return integral / (std::numbers::pi * T);
}

ParsevalSides parseval_sides(const Hamiltonian& h, long n, double T) {
    if (!(T > 0.0)) throw ConfigError("parseval: T must be > 0");
    ParsevalSides out;
    if (!h.has_site(n)) {
        out.resolvable = false;
        return out;
    }
    const auto& es = h.eigensystem();
    const Eigen::VectorXd c = es.vectors.row(h.index(n)).transpose().cwiseProduct(es.origin_weights);
    const double gamma = 2.0 / T;
    const std::complex<double> two_pi_i(0.0, 2.0 * std::numbers::pi);
    double time_side = 0.0;
    double energy_side = 0.0;
    const Eigen::Index m = es.values.size();
    for (Eigen::Index j = 0; j < m; ++j) {
        if (c(j) == 0.0) continue;
        for (Eigen::Index l = 0; l < m; ++l) {
            const double w = c(j) * c(l);
            if (w == 0.0) continue;
            const double d = es.values(j) - es.values(l);
            // 2 pi int_0^inf e^{-2t/T} e^{-i d t} dt, real part.
            time_side += w * 2.0 * std::numbers::pi * gamma / (gamma * gamma + d * d);
            // int_R dE / ((E_j - E - i/T)(E_l - E + i/T)) by residues.
            energy_side += w * std::real(two_pi_i / std::complex<double>(es.values(l) - es.values(j), gamma));
        }
    }
    out.time_side = time_side;
    out.energy_side = energy_side;
    const double scale = std::max(std::abs(time_side), std::abs(energy_side));
    out.residual = scale > 0 ? std::abs(time_side - energy_side) / scale : 0.0;
    out.resolvable = scale >= std::numbers::pi * T * parseval_probability_floor;
    return out;
}

double parseval_residual(const Hamiltonian& h, long n, double T) { return parseval_sides(h, n, T).residual; }

double transfer_matrix_lower_bound(double lambda, double omega, long N, double T) {
    if (N < 1) throw ConfigError("transfer_matrix_lower_bound: N must be >= 1");
    if (!(T > 0.0)) throw ConfigError("transfer_matrix_lower_bound: T must be > 0");
    const double eta = 1.0 / T;
    auto f = [&](double e) {
        const Complex z(e, eta);
        const double a = operator_norm(transfer_product(lambda, omega, z, N));
        const double b = operator_norm(transfer_product(lambda, omega, z, -N));
        const double m = std::max(a, b);
        return std::isfinite(m) ? 1.0 / (m * m) : 0.0;
    };
    return integrate_line(f, -3.0, 3.0 + lambda, 4.0 * eta) / T;
}

DynamicsResult run_dynamics(const Hamiltonian& h, const std::vector<double>& T_grid, const std::vector<double>& p_values,
                            const std::vector<long>& N_values, double window_fraction) {
    DynamicsResult r;
    r.lambda = h.lambda();
    r.omega = h.omega();
    r.L = h.reach();
    r.T_grid = T_grid;
    r.p_values = p_values;
    r.N_values = N_values;
    for (double p : p_values) {
        if (!(p > 0.0)) throw ConfigError("run_dynamics: p must be > 0");
        r.moments[p].reserve(T_grid.size());
    }
    for (double T : T_grid) {
        const Eigen::VectorXd dist = abel_distribution(h, T, window_fraction);
        for (double p : p_values) r.moments[p].push_back(moment_of(h, dist, p));
        for (long N : N_values) r.outside[N].push_back(outside_of(h, dist, N));
    }
    return r;
}

std::vector<double> geometric_grid(double t_min, double t_max, int count) {
    if (count < 2 || !(t_min > 0.0) || !(t_max > t_min)) throw ConfigError("geometric_grid: need 0 < t_min < t_max, count >= 2");
    std::vector<double> g(static_cast<std::size_t>(count));
    const double ratio = std::log(t_max / t_min) / (count - 1);
    for (int i = 0; i < count; ++i) g[static_cast<std::size_t>(i)] = t_min * std::exp(ratio * i);
    g.back() = t_max;
    return g;
}

}  // namespace fibtrans
