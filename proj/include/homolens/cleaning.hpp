#pragma once

#include <cstddef>
#include <vector>

#include "homolens/geometry.hpp"

namespace homolens {

struct CleanParams {
    double radius = 0.0;
    double threshold = 0.0;  // degree fraction t: removed iff degree <= (n-1) t
};

struct CleanReport {
    std::vector<Index> kept;
    std::vector<Index> removed;
    std::vector<std::size_t> degrees;
};

/// Degree of each point in the radius-neighbor graph (exact, boundary inclusive).
std::vector<std::size_t> degree_counts(const PointCloud& cloud, double radius);

/// Degree thresholding: point i is removed iff degree_i <= (n-1) * threshold.
CleanReport clean(const PointCloud& cloud, const CleanParams& params);

struct ClutterCleanParams {
    CleanParams params;  // radius 2r, threshold t
    double r = 0.0;
    double theta = 0.0;  // asin(r / 2 tau)
    double alpha = 0.0;  // ball mass lower bound near M
    double beta = 0.0;   // ball mass upper bound far from M
    double t_midpoint = 0.0;  // (alpha + beta) / 2, same value as params.threshold
};

/// Threshold and radius for clutter noise; requires 0 < r < (sqrt9 - sqrt8) tau / 2, 0 < pi <= 1.
ClutterCleanParams clutter_threshold(double pi, double a, double r, double tau, std::size_t d, std::size_t D);

/// Default cleaning radius for clutter noise, (sqrt9 - sqrt8) tau / 4.
double clutter_default_r(double tau);

struct ClutterSampleSize {
    double zeta = 0.0;
    double kappa = 0.0;
    double n1 = 0.0;
    double n2 = 0.0;
    std::size_t n = 0;  // smallest integer exceeding max(n1, n2)
};
ClutterSampleSize clutter_sample_size(double pi, double a, double r, double tau, std::size_t d, double volume,
                                      double delta);

struct GaussianCleanParams {
    CleanParams params;  // radius s = 4r, threshold (alpha + beta) / 2
    double r = 0.0;
    double theta = 0.0;
    double gamma = 0.0;    // (4 e^-3)^{D/2}
    double t_const = 0.0;  // (16 e^-15)^{D/2}
    double alpha = 0.0;
    double beta = 0.0;
    /// r <= (sqrt9 - sqrt8) tau / 8 (the reconstruction radius bound) holds.
    bool nsw_radius_certified = false;
};

/// Requires 8 sqrt(D) sigma < tau and beta < alpha / 2.
GaussianCleanParams gaussian_clean_params(double sigma, double tau, double a, std::size_t d, std::size_t D);

/// Smallest integer n > 4 kappa log kappa, kappa = max(1 + 200/(3 alpha) log(1/delta), 4).
std::size_t bernstein_sample_size(double alpha, double delta);

}  // namespace homolens
