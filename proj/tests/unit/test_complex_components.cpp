#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fibtrans/complex_components.hpp"
#include "fibtrans/errors.hpp"
#include "fibtrans/trace_polynomials.hpp"

using namespace fibtrans;

TEST_CASE("koebe radii") {
    const auto r = koebe_bounds(5, 1.0, 1.0);
    CHECK(r.r_outer == doctest::Approx(18.0));
    CHECK(r.r_inner == doctest::Approx(0.72));
    for (double delta : {0.01, 0.3, 2.0}) {
        const auto q = koebe_bounds(3, delta, -7.5);
        const double ratio = delta / (2 + 3 * delta);
        CHECK(q.r_inner / q.r_outer == doctest::Approx(ratio * ratio).epsilon(1e-13));
    }
    CHECK_THROWS_AS(koebe_bounds(3, 0.1, 0.0), NumericalFailure);
}

TEST_CASE("linear case is a disk") {
    const double delta = 0.1;
    const auto c = trace_component(0.0, 1, delta, 0.0);
    CHECK(winding_number(c.polyline, c.center) == 1);
    CHECK(c.circumscribed_radius == doctest::Approx(2 * (1 + delta)).epsilon(1e-9));
    CHECK(c.inscribed_radius == doctest::Approx(2 * (1 + delta)).epsilon(1e-3));
}

TEST_CASE("key zero component satisfies the distortion inclusions") {
    const double lambda = 0.3;
    for (int k : {10, 12}) {
        const double delta = lambda * lambda / 16;
        const auto kz = key_zero(lambda, k);
        const auto c = trace_component(lambda, k, delta, kz.energy);

        CHECK(winding_number(c.polyline, c.center) == 1);
        CHECK(c.inscribed_radius <= c.circumscribed_radius);
        for (const auto& z : c.polyline) {
            CHECK(std::abs(std::abs(evaluate_trace(lambda, z, k).value) - (1 + delta)) <= 1e-10);
        }

        // Vertices come in conjugate pairs.
        double worst = 0.0;
        for (const auto& z : c.polyline) {
            double best = 1e300;
            for (const auto& w : c.polyline) best = std::min(best, std::abs(w - std::conj(z)));
            worst = std::max(worst, best);
        }
        CHECK(worst <= 1e-10);

        const auto koebe = koebe_bounds(k, delta, kz.derivative);
        CHECK(c.inscribed_radius >= koebe.r_inner * (1 - 1e-6));
        CHECK(c.circumscribed_radius <= koebe.r_outer * (1 + 1e-6));
        const auto paper = distortion_radii(lambda, k, delta, 0.05);
        CHECK(c.inscribed_radius >= paper.r_inner * (1 - 1e-6));
        CHECK(c.circumscribed_radius <= paper.r_outer * (1 + 1e-6));

        // Exactly one zero of x_k inside the component.
        int inside = 0;
        for (double e : zeros_of_xk(lambda, k)) {
            if (std::abs(e - kz.energy) <= c.circumscribed_radius && c.contains({e, 0.0})) ++inside;
        }
        CHECK(inside == 1);
    }
}

TEST_CASE("component input validation") {
    CHECK_THROWS_AS(trace_component(0.3, 10, 0.0, 0.0), ConfigError);
    CHECK_THROWS_AS(trace_component(0.3, 10, 0.01, 0.123456), ConfigError);
}
