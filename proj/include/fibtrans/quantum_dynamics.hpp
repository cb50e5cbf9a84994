#pragma once

#include <complex>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fibtrans {

struct Eigensystem {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;  // columns are eigenvectors
    Eigen::VectorXd origin_weights;  // v_j(0)
};

/// Real symmetric tridiagonal operator with unit hopping on a finite window of Z.
/// Site n lives at index origin + n. Copies share one lazily computed eigensystem.
class Hamiltonian {
public:
    Hamiltonian(Eigen::VectorXd diagonal, long origin, double lambda = 0.0, double omega = 0.0);

    /// Sites -L..L with Dirichlet truncation, diagonal lambda * chi(n alpha + omega mod 1).
    static Hamiltonian fibonacci(double lambda, double omega, long L);

    double lambda() const { return lambda_; }
    double omega() const { return omega_; }
    long size() const { return static_cast<long>(diagonal_.size()); }
    long origin() const { return origin_; }
    /// Largest R with -R..R inside the window.
    long reach() const { return std::min(origin_, size() - 1 - origin_); }
    bool has_site(long n) const { return n >= -origin_ && n < size() - origin_; }
    long index(long n) const { return origin_ + n; }
    const Eigen::VectorXd& diagonal() const { return diagonal_; }

    /// Full eigendecomposition, computed on first use and then shared read-only.
    const Eigensystem& eigensystem() const;

private:
    struct Cache;
    Eigen::VectorXd diagonal_;
    long origin_ = 0;
    double lambda_ = 0.0;
    double omega_ = 0.0;
    std::shared_ptr<Cache> cache_;
};

/// Default reliable window: Abel averages are refused for T > window_fraction * reach.
inline constexpr double default_window_fraction = 0.1;

/// <delta_n, exp(-itH) delta_0> for every site, indexed like the diagonal.
Eigen::VectorXcd amplitudes(const Hamiltonian& h, double t);

/// sum_n |n|^p |<delta_n, exp(-itH) delta_0>|^2.
double instantaneous_moment(const Hamiltonian& h, double p, double t);

/// Abel average (2/T) int_0^inf e^{-2t/T} |<delta_n, exp(-itH) delta_0>|^2 dt for every site,
/// in closed form over the eigenbasis. Throws ConfigError past the reliable window.
Eigen::VectorXd abel_distribution(const Hamiltonian& h, double T,
                                  double window_fraction = default_window_fraction);

/// <<|X|^p>>(T) from an Abel distribution.
double moment_of(const Hamiltonian& h, const Eigen::VectorXd& distribution, double p);

double abel_moment(const Hamiltonian& h, double p, double T, double window_fraction = default_window_fraction);

enum class Route { Time, Resolvent };

std::string to_string(Route r);

/// Mass beyond |n| >= N from an Abel distribution.
double outside_of(const Hamiltonian& h, const Eigen::VectorXd& distribution, long N);

/// Abel-averaged outside probability <P(N, .)>(T). The time route uses the eigenbasis closed
/// form; the resolvent route integrates |(H - E - i/T)^{-1} delta_0|^2 over E by adaptive
/// quadrature with a tridiagonal solve per point.
double outside_prob(const Hamiltonian& h, long N, double T, Route route,
                    double window_fraction = default_window_fraction);

/// sum_{|n| >= N} |<delta_n, (H - z)^{-1} delta_0>|^2 by a forward/backward sweep.
double resolvent_tail_mass(const Hamiltonian& h, long N, std::complex<double> z);

struct ParsevalSides {
    double time_side = 0.0;
    double energy_side = 0.0;
    double residual = 0.0;
    // False when the Abel probability at n is below 1e-10, where eigenvector rounding
    // (absolute, about 1e-16) dominates both sides and the relative residual carries no information.
    bool resolvable = true;
};

inline constexpr double parseval_probability_floor = 1e-10;

/// Both sides of the Parseval identity at site n, each in closed form over the eigenbasis.
/// Sites outside the window give zero on both sides.
ParsevalSides parseval_sides(const Hamiltonian& h, long n, double T);
double parseval_residual(const Hamiltonian& h, long n, double T);

/// (1/T) int max(||M(N; omega, E + i/T)||, ||M(-N; omega, E + i/T)||)^{-2} dE, the transfer-matrix
/// lower bound for the outside probability (up to an unspecified constant).
double transfer_matrix_lower_bound(double lambda, double omega, long N, double T);

struct DynamicsResult {
    double lambda = 0.0;
    double omega = 0.0;
    long L = 0;
    std::vector<double> T_grid;
    std::vector<double> p_values;
    std::vector<long> N_values;
    // moments[p][i] belongs to T_grid[i].
    std::map<double, std::vector<double>> moments;
    std::map<long, std::vector<double>> outside;
    Route route = Route::Time;
};

/// Moments for every p and outside probabilities for every N over the T grid (time route).
DynamicsResult run_dynamics(const Hamiltonian& h, const std::vector<double>& T_grid, const std::vector<double>& p_values,
                            const std::vector<long>& N_values, double window_fraction = default_window_fraction);

/// Geometric T grid with `count` points between t_min and t_max inclusive.
std::vector<double> geometric_grid(double t_min, double t_max, int count);

}  // namespace fibtrans
