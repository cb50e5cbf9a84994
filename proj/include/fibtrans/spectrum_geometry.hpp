#pragma once

#include <vector>

#include "fibtrans/trace_polynomials.hpp"

namespace fibtrans {

/// Disjoint intervals covering the spectrum: level-k and level-(k+1) bands at delta = 0, merged.
std::vector<Band> spectrum_cover(double lambda, int k);

struct CoverCheck {
    double lambda = 0.0;
    int k = 0;
    int iterations = 0;
    long grid_points = 0;
    long survivors = 0;
    long violations = 0;
    double worst_distance = 0.0;  // largest distance of a violating survivor from the cover
};

/// Every energy on a uniform grid over [-2.5, 2.5 + lambda] that survives the escape test must
/// lie in the cover (up to `tolerance`).
CoverCheck check_cover(double lambda, int k, long grid_points = 100000, int iterations = 60,
                       double tolerance = 1e-9);

struct LevelStats {
    int k = 0;
    long band_count = 0;
    double total_length = 0.0;
    double mean_length = 0.0;
};

struct DimensionEstimate {
    double lambda = 0.0;
    int k_min = 0;
    int k_max = 0;
    std::vector<LevelStats> levels;
    double dim_hat = 1.0;
    double standard_error = 0.0;
    bool degenerate = false;
    bool lengths_non_increasing = true;
};

inline constexpr int max_dimension_level = 16;

/// Slope of log(band count) against -log(mean band length) across the covers for k_min..k_max.
DimensionEstimate box_dimension(double lambda, int k_min = 4, int k_max = 14);

}  // namespace fibtrans
