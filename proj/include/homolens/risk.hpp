#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "homolens/estimators.hpp"
#include "homolens/manifold.hpp"
#include "homolens/noise.hpp"

namespace homolens {

using Sampler = std::function<PointCloud(std::size_t n, std::uint64_t seed)>;

struct ExperimentSpec {
    ManifoldSpec manifold;
    NoiseSpec noise;
    EstimatorSpec estimator;
    std::vector<std::size_t> n_grid;
    std::size_t trials = 1;
    std::uint64_t base_seed = 0;
    CechOptions cech;

    // Optional replacements for the lower-bound pair, whose densities are not uniform.
    Sampler sampler;                              // default: sample_manifold(manifold, ...)
    std::shared_ptr<const Manifold> geometry;     // default: make_manifold(manifold)
    std::optional<HomologyProfile> truth;         // default: manifold.true_homology()

    /// Called after each finished trial with (finished, total); returning false cancels the
    /// trials not yet started, which are then recorded as failures.
    std::function<bool(std::size_t, std::size_t)> progress;

    void validate() const;
};

struct TrialRecord {
    std::size_t n = 0;
    std::size_t trial_index = 0;
    std::uint64_t seed = 0;
    HomologyProfile estimated;
    HomologyProfile truth;
    bool hit = false;
    bool unstable = false;
    std::string failure;    // empty unless the trial raised
    double wall_time = 0.0;  // seconds; not serialized, so reruns compare byte-identical
};

struct RiskPoint {
    std::size_t n = 0;
    std::size_t trials = 0;
    std::size_t misses = 0;
    double risk = 0.0;
    double lo = 0.0, hi = 1.0;  // Clopper-Pearson 95%
    std::size_t failures = 0;
    std::string failure;  // first failure message at this n
};

struct RiskCurve {
    std::vector<RiskPoint> points;
};

struct ExperimentResult {
    std::vector<TrialRecord> records;  // sorted by (n, trial_index)
    RiskCurve curve;
    /// Set when the estimator cannot be constructed at all; every point then counts as a miss.
    std::string abort_reason;
    bool cancelled = false;
};

/// Seed for trial t at sample size n.
std::uint64_t trial_seed(std::uint64_t base, std::size_t n, std::size_t trial);

/// Worker count: HOMOLENS_THREADS if set and positive, else hardware concurrency.
std::size_t harness_threads();

ExperimentResult run_experiment(const ExperimentSpec& spec, std::size_t threads = 0);

/// Exact binomial 95% interval for k misses out of n.
std::pair<double, double> clopper_pearson(std::size_t k, std::size_t n, double level = 0.95);

/// Smallest grid n whose upper confidence bound is <= eps; nullopt if none.
std::optional<std::size_t> sample_complexity(const RiskCurve& curve, double eps);

/// (1/8)(1 - tv)^{2n}.
double lecam_floor(double tv, std::size_t n);

struct TvResult {
    double tv = 0.0;
    double change = 0.0;       // |difference| between the last two refinements
    std::size_t cells = 0;     // quadrature cells per manifold at the final level
};

/// 1 - integral of min(p1, p2), by midpoint quadrature over both manifolds of the pair,
/// doubling the resolution until successive values differ by < tol. Throws NumericalError
/// if a density integrates to 1 only within more than 1e-3, or if the 2^22-cell cap is hit.
TvResult tv_distance_numeric(const LowerBoundPair& pair, double tol = 1e-3);

/// TV between two discrete distributions on the same lattice, 0.5 sum |p - q|.
double tv_discrete(const std::vector<double>& p, const std::vector<double>& q);
/// Full linear convolution of lattice distributions on a 1-D or square 2-D grid (side given).
std::vector<double> convolve_discrete(const std::vector<double>& p, const std::vector<double>& k, std::size_t side_p,
                                      std::size_t side_k, std::size_t dims);

struct LowerBoundRow {
    double tau = 0.0;
    std::string estimator;
    std::size_t n = 0;
    double tv = 0.0;
    double floor = 0.0;
    double risk = 0.0;  // max over the pair of the miss rates
    double se = 0.0;
    bool ok = false;
};

/// Estimator template (tau, d, D, a and volume are filled per pair) and the noise applied to samples.
/// A positive sigma_per_tau sets both sigmas to sigma_per_tau * tau.
struct LowerBoundEstimator {
    EstimatorSpec spec;
    NoiseSpec noise;
    double sigma_per_tau = 0.0;
};

struct LowerBoundCheck {
    std::size_t d = 1, D = 2;
    double a = 0.2;
    std::vector<double> tau_grid;
    std::vector<std::size_t> n_grid;
    std::size_t trials = 50;
    std::uint64_t base_seed = 0;
    std::vector<LowerBoundEstimator> estimators;
};

/// The five shipped estimators with noise widths suited to a pair of reach tau.
std::vector<LowerBoundEstimator> shipped_lower_bound_estimators();

struct LowerBoundReport {
    std::vector<LowerBoundRow> rows;
    std::vector<std::pair<double, double>> tv_by_tau;
    bool ok() const;
};

/// Runs each estimator on samples of both pair members; a row passes when
/// risk >= lecam_floor(tv, n) - 3 SE.
LowerBoundReport check_lower_vs_empirical(const LowerBoundCheck& check, std::size_t threads = 0);

std::string format_record(const TrialRecord& r);
std::string format_curve_csv(const RiskCurve& c);

}  // namespace homolens
