#include "fibtrans/spectrum_geometry.hpp"

#include <algorithm>
#include <cmath>

#include "fibtrans/errors.hpp"

namespace fibtrans {

std::vector<Band> spectrum_cover(double lambda, int k) {
    if (k < 2) throw ConfigError("spectrum_cover: k must be >= 2");
    auto bands = band_components(lambda, k, 0.0);
    const auto next = band_components(lambda, k + 1, 0.0);
    bands.insert(bands.end(), next.begin(), next.end());
    std::sort(bands.begin(), bands.end(), [](const Band& a, const Band& b) { return a.lo < b.lo; });
    std::vector<Band> merged;
    for (const auto& b : bands) {
        if (!merged.empty() && b.lo <= merged.back().hi) {
            auto& m = merged.back();
            m.hi = std::max(m.hi, b.hi);
            m.zeros_inside += b.zeros_inside;
            m.clipped = m.clipped || b.clipped;
        } else {
            merged.push_back(b);
            merged.back().k = k;
        }
    }
    return merged;
}

CoverCheck check_cover(double lambda, int k, long grid_points, int iterations, double tolerance) {
    if (grid_points < 2) throw ConfigError("check_cover: grid_points must be >= 2");
    if (iterations <= k + 1) throw ConfigError("check_cover: iterations must exceed k + 1");
    const auto cover = spectrum_cover(lambda, k);
    CoverCheck c;
    c.lambda = lambda;
    c.k = k;
    c.iterations = iterations;
    c.grid_points = grid_points;
    const double lo = -2.5, hi = 2.5 + lambda;
    for (long i = 0; i < grid_points; ++i) {
        const double e = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_points - 1);
        if (!survives_escape_test(lambda, e, iterations)) continue;
        ++c.survivors;
        double dist = 1e300;
        for (const auto& b : cover) {
            dist = std::min(dist, b.contains(e) ? 0.0 : std::min(std::abs(e - b.lo), std::abs(e - b.hi)));
        }
        if (dist > tolerance) {
            ++c.violations;
            c.worst_distance = std::max(c.worst_distance, dist);
        }
    }
    return c;
}

DimensionEstimate box_dimension(double lambda, int k_min, int k_max) {
    if (k_min < 2 || k_max < k_min + 2) throw ConfigError("box_dimension: need 2 <= k_min and k_max >= k_min + 2");
    if (k_max > max_dimension_level) throw ConfigError("box_dimension: k_max must be <= 16");
    DimensionEstimate est;
    est.lambda = lambda;
    est.k_min = k_min;
    est.k_max = k_max;
    for (int k = k_min; k <= k_max; ++k) {
        const auto cover = spectrum_cover(lambda, k);
        LevelStats s;
        s.k = k;
        s.band_count = static_cast<long>(cover.size());
        for (const auto& b : cover) s.total_length += b.length();
        s.mean_length = s.total_length / static_cast<double>(s.band_count);
        if (!est.levels.empty() && s.total_length > est.levels.back().total_length * (1 + 1e-12)) {
            est.lengths_non_increasing = false;
        }
        est.levels.push_back(s);
    }
    if (lambda == 0.0) {
        est.dim_hat = 1.0;
        est.degenerate = true;
        return est;
    }
    const auto n = static_cast<double>(est.levels.size());
    double mx = 0, my = 0;
    for (const auto& s : est.levels) {
        mx += -std::log(s.mean_length);
        my += std::log(static_cast<double>(s.band_count));
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (const auto& s : est.levels) {
        const double x = -std::log(s.mean_length) - mx;
        sxx += x * x;
        sxy += x * (std::log(static_cast<double>(s.band_count)) - my);
    }
    if (sxx <= 0.0) {
        est.dim_hat = 1.0;
        est.degenerate = true;
        return est;
    }
    est.dim_hat = sxy / sxx;
    double ss = 0;
    for (const auto& s : est.levels) {
        const double r = std::log(static_cast<double>(s.band_count)) - my - est.dim_hat * (-std::log(s.mean_length) - mx);
        ss += r * r;
    }
    est.standard_error = std::sqrt(ss / (n - 2) / sxx);
    return est;
}

}  // namespace fibtrans
