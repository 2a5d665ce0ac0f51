#pragma once

#include <stdexcept>
#include <string>

#include "homolens/cleaning.hpp"
#include "homolens/deconvolution.hpp"
#include "homolens/estimators.hpp"
#include "homolens/manifold.hpp"
#include "homolens/noise.hpp"
#include "homolens/risk.hpp"
#include "json.hpp"

namespace homolens::cli {

using nlohmann::json;

/// Malformed or inconsistent configuration; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses a configuration file. Top-level sections: manifold, noise, estimator, experiment, tvcheck,
/// plus scalar keys (seed, n, ...). Unknown sections or keys are rejected.
json load_config(const std::string& path);

json to_json(const ManifoldSpec& m);
ManifoldSpec manifold_from_json(const json& j);

json to_json(const NoiseDistribution& phi);
NoiseDistribution noise_distribution_from_json(const json& j);

json to_json(const NoiseSpec& n);
NoiseSpec noise_from_json(const json& j);

/// Estimator spec from the merged configuration. Missing fields fall back to the noise section
/// (model, sigma, pi, phi) and to the manifold section (tau, d, a = 1/vol, volume).
EstimatorSpec estimator_from_config(const json& cfg, std::size_t ambient_dim);

ExperimentSpec experiment_from_config(const json& cfg);

json to_json(const CleanReport& r);
json to_json(const EstimateResult& r);
/// Preset name plus k1 sampled on a lattice covering its support.
json to_json(const KernelPair& kp, std::size_t table_points = 257);

}  // namespace homolens::cli
