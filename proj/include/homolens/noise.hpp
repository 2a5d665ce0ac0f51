#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "homolens/geometry.hpp"
#include "homolens/manifold.hpp"
#include "homolens/rng.hpp"

namespace homolens {

/// Known additive noise law with product-form density and characteristic function.
struct NoiseDistribution {
    enum class Kind { point_mass, gaussian, laplace, uniform_box } kind = Kind::point_mass;
    double scale = 0.0;  // gaussian sigma, laplace b, uniform half-width h

    static NoiseDistribution point_mass() { return {}; }
    static NoiseDistribution gaussian(double sigma) { return {Kind::gaussian, sigma}; }
    static NoiseDistribution laplace(double b) { return {Kind::laplace, b}; }
    static NoiseDistribution uniform_box(double h) { return {Kind::uniform_box, h}; }

    /// One-dimensional characteristic function (all laws here are symmetric, so real).
    double char_fn_1d(double t) const;
    /// Product over coordinates.
    double char_fn(std::span<const double> t) const;
    /// One-dimensional density; point mass has none (throws).
    double density_1d(double x) const;
    void sample(Rng& rng, std::span<double> out) const;
    /// Smallest positive frequency with char_fn_1d = 0, or +inf.
    double first_fourier_zero() const;

    std::string describe() const;
};

NoiseDistribution parse_noise_distribution(const std::string& kind, double scale);

enum class NoiseModel { noiseless, clutter, tubular, gaussian, additive_known };

std::string to_string(NoiseModel m);
NoiseModel parse_noise_model(const std::string& name);

struct NoiseSpec {
    NoiseModel model = NoiseModel::noiseless;
    double pi = 1.0;      // clutter: probability of keeping the manifold draw
    double sigma = 0.0;   // tubular width or Gaussian scale
    bool exact_tube = true;
    NoiseDistribution phi;  // additive_known

    void validate() const;
};

/// Applies the noise model to manifold samples. The box for clutter is [0,1]^D.
/// Tubular noise needs the manifold (distance test); other models ignore it.
PointCloud apply_noise(const PointCloud& clean, const NoiseSpec& spec, const Manifold& manifold,
                       std::uint64_t seed);

}  // namespace homolens
