#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "homolens/geometry.hpp"
#include "homolens/homology.hpp"
#include "homolens/noise.hpp"
#include "homolens/profile.hpp"

namespace homolens {

struct EstimatorOverrides {
    std::optional<double> clean_radius;
    std::optional<double> clean_threshold;
    std::optional<double> ball_radius;
    std::optional<std::size_t> top_dim;
};

struct EstimatorSpec {
    NoiseModel noise_model = NoiseModel::noiseless;
    double tau = 0.0;
    double sigma = 0.0;  // tubular width or Gaussian scale
    double pi = 1.0;     // clutter
    double a = 0.0;      // density floor
    std::size_t d = 1, D = 2;
    EstimatorOverrides overrides;

    // additive_known only
    NoiseDistribution phi;
    double volume = 0.0;  // vol(M), for the resample count
    double c2 = 2.0;
    double decon_delta = 1e-3;
    std::uint64_t seed = 0;  // resampling stream

    /// Checks the model's hypotheses; throws HypothesisError naming the violated inequality.
    void validate() const;
};

struct EstimateResult {
    HomologyProfile profile;
    std::vector<Index> kept_indices;  // into the input cloud, or into `resampled` for deconvolution
    std::vector<std::pair<std::string, double>> parameters_used;
    std::vector<std::size_t> complex_size;
    std::string route;
    /// Fewer than d + 2 points survived cleaning; profile is left empty.
    bool unstable = false;
    std::optional<PointCloud> resampled;

    double parameter(const std::string& name) const;  // throws PreconditionError if absent
};

EstimateResult estimate_noiseless(const PointCloud& cloud, const EstimatorSpec& spec, const CechOptions& opts = {});
EstimateResult estimate_clutter(const PointCloud& cloud, const EstimatorSpec& spec, const CechOptions& opts = {});
EstimateResult estimate_tubular(const PointCloud& cloud, const EstimatorSpec& spec, const CechOptions& opts = {});
EstimateResult estimate_gaussian(const PointCloud& cloud, const EstimatorSpec& spec, const CechOptions& opts = {});
EstimateResult estimate_decon(const PointCloud& cloud, const EstimatorSpec& spec, const NoiseDistribution& phi,
                              const CechOptions& opts = {});

/// Dispatches on spec.noise_model (additive_known uses spec.phi).
EstimateResult estimate(const PointCloud& cloud, const EstimatorSpec& spec, const CechOptions& opts = {});

}  // namespace homolens
