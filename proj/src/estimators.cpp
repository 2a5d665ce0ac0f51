#include "homolens/estimators.hpp"

#include <cmath>
#include <numeric>

#include "homolens/cleaning.hpp"
#include "homolens/deconvolution.hpp"
#include "homolens/error.hpp"

namespace homolens {

namespace {

const double sqrt9_minus_sqrt8 = 3.0 - std::sqrt(8.0);

void require_model(const EstimatorSpec& spec, NoiseModel m, const char* who) {
    if (spec.noise_model != m)
        throw PreconditionError(std::string(who) + ": spec noise model is " + to_string(spec.noise_model) +
                                ", expected " + to_string(m));
}

std::vector<Index> all_indices(std::size_t n) {
    std::vector<Index> v(n);
    std::iota(v.begin(), v.end(), Index{0});
    return v;
}

// Union-of-balls homology of the kept points at the given scale.
void finish(EstimateResult& r, const PointCloud& kept, const EstimatorSpec& spec, double scale,
            const CechOptions& opts) {
    const double ball = spec.overrides.ball_radius.value_or(scale);
    const std::size_t top = spec.overrides.top_dim.value_or(spec.d + 1);
    if (top == 0) throw PreconditionError("estimator: top_dim must be at least 1");
    r.parameters_used.emplace_back("ball_radius", ball);
    r.parameters_used.emplace_back("top_dim", static_cast<double>(top));
    r.parameters_used.emplace_back("kept", static_cast<double>(kept.size()));
    if (kept.size() < spec.d + 2) {
        r.unstable = true;
        r.route = "none";
        return;
    }
    const auto h = cech_homology(kept, ball, top - 1, opts);
    r.profile = h.profile;
    r.complex_size = h.complex_size;
    r.route = h.route;
}

}  // namespace

void EstimatorSpec::validate() const {
    if (!(tau > 0.0)) throw PreconditionError("estimator spec: tau must be positive");
    if (!(a >= 0.0)) throw PreconditionError("estimator spec: density floor must be nonnegative");
    if (d == 0 || d >= D) throw PreconditionError("estimator spec: requires 1 <= d < D");
    switch (noise_model) {
        case NoiseModel::noiseless:
            break;
        case NoiseModel::clutter: {
            if (!(pi > 0.0 && pi <= 1.0)) throw PreconditionError("estimator spec: clutter requires 0 < pi <= 1");
            const double r = overrides.clean_radius ? *overrides.clean_radius / 2.0 : clutter_default_r(tau);
            if (!(r > 0.0 && r < sqrt9_minus_sqrt8 * tau / 2.0))
                throw HypothesisError("clutter estimator requires r < (√9−√8)τ/2, got r=" + std::to_string(r));
            break;
        }
        case NoiseModel::tubular:
            if (!(sigma >= 0.0 && sigma < tau / 24.0))
                throw HypothesisError("tubular estimator requires σ < τ/24 (σ=" + std::to_string(sigma) +
                                      ", τ/24=" + std::to_string(tau / 24.0) + ")");
            break;
        case NoiseModel::gaussian:
            if (!(8.0 * std::sqrt(double(D)) * sigma < tau))
                throw HypothesisError("Gaussian estimator requires 8√Dσ < τ (8√Dσ=" +
                                      std::to_string(8.0 * std::sqrt(double(D)) * sigma) +
                                      ", τ=" + std::to_string(tau) + ")");
            break;
        case NoiseModel::additive_known:
            if (!(volume > 0.0)) throw PreconditionError("estimator spec: deconvolution needs vol(M) > 0");
            if (!(a > 0.0)) throw PreconditionError("estimator spec: deconvolution needs a > 0");
            break;
    }
}

double EstimateResult::parameter(const std::string& name) const {
    for (const auto& [k, v] : parameters_used)
        if (k == name) return v;
    throw PreconditionError("EstimateResult: no parameter named " + name);
}

EstimateResult estimate_noiseless(const PointCloud& cloud, const EstimatorSpec& spec, const CechOptions& opts) {
    require_model(spec, NoiseModel::noiseless, "estimate_noiseless");
    spec.validate();
    EstimateResult r;
    r.kept_indices = all_indices(cloud.size());
    finish(r, cloud, spec, spec.tau / 2.0, opts);
    return r;
}

EstimateResult estimate_clutter(const PointCloud& cloud, const EstimatorSpec& spec, const CechOptions& opts) {
    require_model(spec, NoiseModel::clutter, "estimate_clutter");
    spec.validate();
    const double rr = spec.overrides.clean_radius ? *spec.overrides.clean_radius / 2.0 : clutter_default_r(spec.tau);
    auto c = clutter_threshold(spec.pi, spec.a, rr, spec.tau, spec.d, spec.D);
    if (spec.overrides.clean_threshold) c.params.threshold = *spec.overrides.clean_threshold;
    EstimateResult r;
    r.parameters_used = {{"r", c.r},
                         {"clean_radius", c.params.radius},
                         {"clean_threshold", c.params.threshold},
                         {"alpha", c.alpha},
                         {"beta", c.beta}};
    const auto rep = clean(cloud, c.params);
    r.kept_indices = rep.kept;
    finish(r, cloud.subset(rep.kept), spec, c.r + spec.tau / 2.0, opts);
    return r;
}

EstimateResult estimate_tubular(const PointCloud& cloud, const EstimatorSpec& spec, const CechOptions& opts) {
    require_model(spec, NoiseModel::tubular, "estimate_tubular");
    spec.validate();
    const double eps = 2.0 * spec.sigma;
    EstimateResult r;
    r.parameters_used = {{"epsilon", eps}};
    r.kept_indices = all_indices(cloud.size());
    finish(r, cloud, spec, eps + spec.tau / 2.0, opts);
    return r;
}

EstimateResult estimate_gaussian(const PointCloud& cloud, const EstimatorSpec& spec, const CechOptions& opts) {
    require_model(spec, NoiseModel::gaussian, "estimate_gaussian");
    spec.validate();
    auto g = gaussian_clean_params(spec.sigma, spec.tau, spec.a, spec.d, spec.D);
    if (spec.overrides.clean_radius) g.params.radius = *spec.overrides.clean_radius;
    if (spec.overrides.clean_threshold) g.params.threshold = *spec.overrides.clean_threshold;
    EstimateResult r;
    r.parameters_used = {{"r", g.r},
                         {"clean_radius", g.params.radius},
                         {"clean_threshold", g.params.threshold},
                         {"alpha", g.alpha},
                         {"beta", g.beta},
                         {"radius_certified", g.nsw_radius_certified ? 1.0 : 0.0}};
    const auto rep = clean(cloud, g.params);
    r.kept_indices = rep.kept;
    finish(r, cloud.subset(rep.kept), spec, (8.0 * g.r + spec.tau) / 2.0, opts);
    return r;
}

EstimateResult estimate_decon(const PointCloud& cloud, const EstimatorSpec& spec, const NoiseDistribution& phi,
                              const CechOptions& opts) {
    require_model(spec, NoiseModel::additive_known, "estimate_decon");
    spec.validate();
    if (cloud.empty()) throw PreconditionError("estimate_decon: cloud must be nonempty");
    const auto p = solve_decon_parameters(spec.a, spec.d, spec.D, spec.tau, spec.volume, cloud.size(), spec.c2,
                                          spec.decon_delta);
    const auto kp = build_kernel_pair(phi, p.epsilon, p.gamma, spec.D, p.sigma_psi);
    const DeconvolvedMeasure measure(cloud, kp);
    EstimateResult r;
    r.resampled = measure.resample(p.m, spec.seed);
    const double clean_radius = spec.overrides.clean_radius.value_or(4.0 * p.epsilon);
    const double threshold = spec.overrides.clean_threshold.value_or(2.0 * p.gamma);
    CleanReport rep;
    if (!spec.overrides.clean_radius && !spec.overrides.clean_threshold) {
        rep = decon_clean(*r.resampled, measure, p.epsilon, p.gamma);
    } else {
        for (std::size_t i = 0; i < r.resampled->size(); ++i) {
            if (measure.eval_on_ball(r.resampled->point(i), clean_radius) <= threshold)
                rep.removed.push_back(static_cast<Index>(i));
            else
                rep.kept.push_back(static_cast<Index>(i));
        }
    }
    r.parameters_used = {{"epsilon", p.epsilon},
                         {"sigma_psi", p.sigma_psi},
                         {"gamma", p.gamma},
                         {"omega", p.omega},
                         {"m", static_cast<double>(p.m)},
                         {"clean_radius", clean_radius},
                         {"clean_threshold", threshold},
                         {"kernel_residual", kp.residual()}};
    r.kept_indices = rep.kept;
    finish(r, r.resampled->subset(rep.kept), spec, (5.0 * p.epsilon + spec.tau) / 2.0, opts);
    return r;
}

EstimateResult estimate(const PointCloud& cloud, const EstimatorSpec& spec, const CechOptions& opts) {
    switch (spec.noise_model) {
        case NoiseModel::noiseless: return estimate_noiseless(cloud, spec, opts);
        case NoiseModel::clutter: return estimate_clutter(cloud, spec, opts);
        case NoiseModel::tubular: return estimate_tubular(cloud, spec, opts);
        case NoiseModel::gaussian: return estimate_gaussian(cloud, spec, opts);
        case NoiseModel::additive_known: return estimate_decon(cloud, spec, spec.phi, opts);
    }
    throw PreconditionError("estimate: unknown noise model");
}

}  // namespace homolens
