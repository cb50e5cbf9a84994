#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fibtrans/errors.hpp"
#include "fibtrans/quantum_dynamics.hpp"

using namespace fibtrans;

namespace {

constexpr double no_window = std::numeric_limits<double>::infinity();

Hamiltonian two_site() { return Hamiltonian(Eigen::VectorXd::Zero(2), 0); }

}  // namespace

TEST_CASE("fibonacci hamiltonian") {
    const auto free = Hamiltonian::fibonacci(0.0, 0.3, 20);
    CHECK(free.size() == 41);
    CHECK(free.diagonal().cwiseAbs().maxCoeff() == 0.0);
    const auto h = Hamiltonian::fibonacci(1.0, 0.0, 10);
    const double expected[5] = {1, 0, 1, 1, 0};
    for (long n = 1; n <= 5; ++n) CHECK(h.diagonal()(h.index(n)) == expected[n - 1]);
    for (long i = 0; i < h.size(); ++i) CHECK((h.diagonal()(i) == 0.0 || h.diagonal()(i) == 1.0));
    CHECK_THROWS_AS(Hamiltonian::fibonacci(1.0, 0.0, 0), ConfigError);
}

TEST_CASE("amplitudes are unitary") {
    const auto h = Hamiltonian::fibonacci(1.5, 0.2, 60);
    const auto a0 = amplitudes(h, 0.0);
    CHECK(std::abs(a0(h.index(0)) - 1.0) < 1e-12);
    CHECK(a0.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
    for (double t : {0.5, 3.0, 17.0, 400.0}) CHECK(std::abs(amplitudes(h, t).squaredNorm() - 1.0) < 1e-10);
}

TEST_CASE("free second moment is 2t^2") {
    const auto h = Hamiltonian::fibonacci(0.0, 0.0, 400);
    for (double t = 5.0; t <= 100.0; t += 5.0) {
        CHECK(std::abs(instantaneous_moment(h, 2.0, t) / (2 * t * t) - 1.0) < 1e-3);
    }
}

TEST_CASE("abel moment against time quadrature") {
    const auto h = Hamiltonian::fibonacci(0.0, 0.0, 200);
    const double T = 10.0;
    auto integrand = [&](double t) { return (2.0 / T) * std::exp(-2.0 * t / T) * instantaneous_moment(h, 2.0, t); };
    const double oracle = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, 40 * T, 15, 1e-10);
    const double closed = abel_moment(h, 2.0, T);
    CHECK(std::abs(closed / oracle - 1.0) < 5e-3);
    // Abel average of 2t^2 is T^2.
    CHECK(std::abs(closed / (T * T) - 1.0) < 5e-3);

    const auto g = Hamiltonian::fibonacci(1.0, 0.4, 150);
    auto fib_integrand = [&](double t) { return (2.0 / 12.0) * std::exp(-t / 6.0) * instantaneous_moment(g, 1.5, t); };
    const double fib_oracle =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(fib_integrand, 0.0, 480.0, 15, 1e-10);
    CHECK(std::abs(abel_moment(g, 1.5, 12.0) / fib_oracle - 1.0) < 5e-3);
}

TEST_CASE("abel moments obey the power-mean inequality") {
    const auto h = Hamiltonian::fibonacci(1.0, 0.1, 300);
    const Eigen::VectorXd dist = abel_distribution(h, 25.0);
    CHECK(dist.sum() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(dist.minCoeff() >= -1e-15);
    double previous = 0.0;
    for (double p : {0.5, 1.0, 2.0, 3.0, 5.0}) {
        const double root = std::pow(moment_of(h, dist, p), 1.0 / p);
        CHECK(root >= previous * (1 - 1e-12));
        previous = root;
    }
}

TEST_CASE("reliable window is enforced") {
    const auto h = Hamiltonian::fibonacci(1.0, 0.0, 100);
    CHECK_NOTHROW(abel_moment(h, 2.0, 10.0));
    CHECK_THROWS_AS(abel_moment(h, 2.0, 10.5), ConfigError);
    CHECK_THROWS_AS(abel_moment(h, 0.0, 5.0), ConfigError);
}

TEST_CASE("outside probabilities") {
    const auto free = Hamiltonian::fibonacci(0.0, 0.0, 200);
    CHECK(outside_prob(free, 0, 10.0, Route::Time) == doctest::Approx(1.0).epsilon(1e-12));
    // Past the light cone |n| = 2t only the exponential tail of the Abel weight survives.
    auto outside_at = [&](double t) {
        const Eigen::VectorXcd a = amplitudes(free, t);
        double s = 0.0;
        for (long i = 0; i < free.size(); ++i) {
            if (std::labs(i - free.origin()) >= 40) s += std::norm(a(i));
        }
        return (2.0 / 10.0) * std::exp(-t / 5.0) * s;
    };
    const double oracle = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(outside_at, 0.0, 150.0, 15, 1e-10);
    CHECK(outside_prob(free, 40, 10.0, Route::Time) == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(outside_prob(free, 40, 10.0, Route::Time) <= std::exp(-40.0 / 10.0));
    CHECK(outside_prob(free, 150, 10.0, Route::Time) <= 1e-6);

    const auto h = Hamiltonian::fibonacci(0.5, 0.0, 300);
    const double time = outside_prob(h, 20, 30.0, Route::Time);
    const double resolvent = outside_prob(h, 20, 30.0, Route::Resolvent);
    CHECK(time > 0.0);
    CHECK(std::abs(time - resolvent) / time <= 1e-6);
    CHECK(outside_prob(h, 0, 30.0, Route::Resolvent) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("parseval identity") {
    const auto toy = two_site();
    const auto sides = parseval_sides(toy, 0, 1.0);
    CHECK(sides.time_side == doctest::Approx(0.75 * std::numbers::pi).epsilon(1e-14));
    CHECK(sides.residual <= 1e-12);
    // Abel average of cos^2 t at T = 1 is 3/4.
    CHECK(abel_distribution(toy, 1.0, no_window)(0) == doctest::Approx(0.75).epsilon(1e-14));

    const auto h = Hamiltonian::fibonacci(1.0, 0.3, 200);
    CHECK(parseval_residual(h, 7, 25.0) <= 1e-8);
    for (long n : {-150L, -3L, 0L, 60L, 199L}) {
        for (double T : {1.0, 8.0, 40.0}) {
            const auto s = parseval_sides(h, n, T);
            if (s.resolvable) {
                CHECK(s.residual <= 1e-8);
            } else {
                // Below the floor both sides are rounding noise around zero.
                const double floor = std::numbers::pi * T * parseval_probability_floor;
                CHECK(std::abs(s.time_side) < floor);
                CHECK(std::abs(s.energy_side) < floor);
            }
        }
    }
    const auto outside = parseval_sides(h, 201, 5.0);
    CHECK(outside.time_side == 0.0);
    CHECK(outside.energy_side == 0.0);
}

TEST_CASE("transfer matrix lower bound stays below the outside probability") {
    const auto h = Hamiltonian::fibonacci(1.0, 0.0, 400);
    for (long N : {8L, 21L}) {
        const double measured = outside_prob(h, N, 30.0, Route::Time);
        const double bound = transfer_matrix_lower_bound(1.0, 0.0, N, 30.0);
        CHECK(bound > 0.0);
        CHECK(measured / bound > 0.0);
        MESSAGE("N=" << N << " outside=" << measured << " bound=" << bound << " ratio=" << measured / bound);
    }
}

TEST_CASE("run_dynamics collects every series") {
    const auto h = Hamiltonian::fibonacci(0.5, 0.0, 200);
    const auto grid = geometric_grid(2.0, 20.0, 6);
    CHECK(grid.front() == 2.0);
    CHECK(grid.back() == 20.0);
    const auto r = run_dynamics(h, grid, {1.0, 2.0}, {5L, 10L});
    CHECK(r.moments.at(2.0).size() == grid.size());
    CHECK(r.outside.at(10L).size() == grid.size());
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(r.moments.at(2.0)[i] > r.moments.at(2.0)[i - 1]);
}
