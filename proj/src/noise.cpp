#include "homolens/noise.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "homolens/error.hpp"

namespace homolens {

double NoiseDistribution::char_fn_1d(double t) const {
    switch (kind) {
        case Kind::point_mass: return 1.0;
        case Kind::gaussian: return std::exp(-0.5 * scale * scale * t * t);
        case Kind::laplace: return 1.0 / (1.0 + scale * scale * t * t);
        case Kind::uniform_box: {
            const double x = scale * t;
            return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
        }
    }
    return 0.0;
}

double NoiseDistribution::char_fn(std::span<const double> t) const {
    double v = 1.0;
    for (double ti : t) v *= char_fn_1d(ti);
    return v;
}

double NoiseDistribution::density_1d(double x) const {
    switch (kind) {
        case Kind::point_mass: throw PreconditionError("point mass noise has no density");
        case Kind::gaussian: return std::exp(-0.5 * x * x / (scale * scale)) / (scale * std::sqrt(2.0 * M_PI));
        case Kind::laplace: return std::exp(-std::abs(x) / scale) / (2.0 * scale);
        case Kind::uniform_box: return std::abs(x) <= scale ? 0.5 / scale : 0.0;
    }
    return 0.0;
}

void NoiseDistribution::sample(Rng& rng, std::span<double> out) const {
    switch (kind) {
        case Kind::point_mass:
            for (auto& v : out) v = 0.0;
            return;
        case Kind::gaussian: {
            std::normal_distribution<double> g(0.0, scale);
            for (auto& v : out) v = g(rng);
            return;
        }
        case Kind::laplace: {
            std::exponential_distribution<double> e(1.0 / scale);
            std::uniform_real_distribution<double> u(0.0, 1.0);
            for (auto& v : out) v = (u(rng) < 0.5 ? -1.0 : 1.0) * e(rng);
            return;
        }
        case Kind::uniform_box: {
            std::uniform_real_distribution<double> u(-scale, scale);
            for (auto& v : out) v = u(rng);
            return;
        }
    }
}

double NoiseDistribution::first_fourier_zero() const {
    if (kind == Kind::uniform_box) return M_PI / scale;
    return std::numeric_limits<double>::infinity();
}

std::string NoiseDistribution::describe() const {
    switch (kind) {
        case Kind::point_mass: return "point_mass";
        case Kind::gaussian: return "gaussian(" + std::to_string(scale) + ")";
        case Kind::laplace: return "laplace(" + std::to_string(scale) + ")";
        case Kind::uniform_box: return "uniform_box(" + std::to_string(scale) + ")";
    }
    return "?";
}

NoiseDistribution parse_noise_distribution(const std::string& kind, double scale) {
    NoiseDistribution d;
    if (kind == "point_mass" || kind == "none")
        return NoiseDistribution::point_mass();
    else if (kind == "gaussian")
        d = NoiseDistribution::gaussian(scale);
    else if (kind == "laplace")
        d = NoiseDistribution::laplace(scale);
    else if (kind == "uniform" || kind == "uniform_box")
        d = NoiseDistribution::uniform_box(scale);
    else
        throw PreconditionError("unknown noise distribution '" + kind + "'");
    if (!(scale > 0.0)) throw PreconditionError("noise distribution scale must be positive");
    return d;
}

std::string to_string(NoiseModel m) {
    switch (m) {
        case NoiseModel::noiseless: return "noiseless";
        case NoiseModel::clutter: return "clutter";
        case NoiseModel::tubular: return "tubular";
        case NoiseModel::gaussian: return "gaussian";
        case NoiseModel::additive_known: return "additive_known";
    }
    return "?";
}

NoiseModel parse_noise_model(const std::string& name) {
    if (name == "noiseless" || name == "none") return NoiseModel::noiseless;
    if (name == "clutter") return NoiseModel::clutter;
    if (name == "tubular") return NoiseModel::tubular;
    if (name == "gaussian") return NoiseModel::gaussian;
    if (name == "additive_known" || name == "additive" || name == "decon") return NoiseModel::additive_known;
    throw PreconditionError("unsupported noise model '" + name + "'");
}

void NoiseSpec::validate() const {
    if (!(pi >= 0.0 && pi <= 1.0)) throw PreconditionError("noise: pi must lie in [0,1]");
    if (!(sigma >= 0.0)) throw PreconditionError("noise: sigma must be nonnegative");
}

namespace {

void uniform_in_ball(Rng& rng, double radius, std::span<double> out) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double norm = 0.0;
    do {
        norm = 0.0;
        for (auto& v : out) {
            v = g(rng);
            norm += v * v;
        }
    } while (norm < 1e-300);
    const double scale = radius * std::pow(u(rng), 1.0 / static_cast<double>(out.size())) / std::sqrt(norm);
    for (auto& v : out) v *= scale;
}

}  // namespace

PointCloud apply_noise(const PointCloud& clean, const NoiseSpec& spec, const Manifold& manifold,
                       std::uint64_t seed) {
    spec.validate();
    if (clean.empty()) throw PreconditionError("apply_noise: input cloud is empty");
    const std::size_t dim = clean.ambient_dim();
    const std::size_t n = clean.size();
    Rng rng = make_rng(seed, stream::noise);
    PointCloud out = clean;
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    switch (spec.model) {
        case NoiseModel::noiseless: return out;
        case NoiseModel::clutter:
            for (std::size_t i = 0; i < n; ++i) {
                if (unif(rng) < spec.pi) continue;
                for (auto& v : out.point(i)) v = unif(rng);
            }
            return out;
        case NoiseModel::tubular: {
            if (manifold.ambient_dim() != dim) throw PreconditionError("apply_noise: manifold dimension mismatch");
            if (!spec.exact_tube || spec.sigma == 0.0) {
                for (std::size_t i = 0; i < n; ++i) {
                    std::vector<double> disp(dim);
                    uniform_in_ball(rng, spec.sigma, disp);
                    auto p = out.point(i);
                    for (std::size_t a = 0; a < dim; ++a) p[a] += disp[a];
                }
                return out;
            }
            // Uniform on the tube: rejection from the manifold's bounding box grown by sigma.
            const Box box = manifold.bounds();
            std::vector<std::uniform_real_distribution<double>> axis;
            for (std::size_t a = 0; a < dim; ++a) axis.emplace_back(box.lo[a] - spec.sigma, box.hi[a] + spec.sigma);
            std::vector<double> x(dim);
            const std::size_t max_proposals = 200'000'000;
            std::size_t proposals = 0;
            for (std::size_t i = 0; i < n; ++i) {
                for (;;) {
                    if (++proposals > max_proposals)
                        throw ResourceLimitError("tubular sampler: rejection rate too high");
                    for (std::size_t a = 0; a < dim; ++a) x[a] = axis[a](rng);
                    if (manifold.distance(x) <= spec.sigma) break;
                }
                auto p = out.point(i);
                std::copy(x.begin(), x.end(), p.begin());
            }
            return out;
        }
        case NoiseModel::gaussian: {
            std::normal_distribution<double> g(0.0, spec.sigma);
            for (std::size_t i = 0; i < n; ++i)
                for (auto& v : out.point(i)) v += g(rng);
            return out;
        }
        case NoiseModel::additive_known: {
            std::vector<double> e(dim);
            for (std::size_t i = 0; i < n; ++i) {
                spec.phi.sample(rng, e);
                auto p = out.point(i);
                for (std::size_t a = 0; a < dim; ++a) p[a] += e[a];
            }
            return out;
        }
    }
    throw PreconditionError("apply_noise: unsupported noise model");
}

}  // namespace homolens
