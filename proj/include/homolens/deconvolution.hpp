#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "homolens/cleaning.hpp"
#include "homolens/geometry.hpp"
#include "homolens/noise.hpp"

namespace homolens {

/// inf over the box |t|_inf <= R of |Phi*(t)|, on a grid of step <= R/256 per axis.
/// Throws HypothesisError when the minimum falls below 1e-12.
double verify_fourier_floor(const NoiseDistribution& phi, double R, std::size_t D);

/// Psi is an isotropic Gaussian; K solves K * Phi = Psi. Both factor over
/// coordinates, so K(x) = prod_a k(x_a) with a one-dimensional k.
class KernelPair {
public:
    enum class Kind { identity, gaussian, lattice };

    Kind kind() const { return kind_; }
    std::size_t dim() const { return dim_; }
    double sigma_psi() const { return sigma_psi_; }
    double sigma_k() const { return sigma_k_; }  // identity and gaussian kinds
    double epsilon() const { return epsilon_; }
    double gamma() const { return gamma_; }
    /// Euclidean tail mass Psi{|x| >= epsilon} (closed form).
    double psi_tail() const { return psi_tail_; }
    /// Measured sup-norm of (K * Phi) - Psi on the probe grid.
    double residual() const { return residual_; }
    const NoiseDistribution& phi() const { return phi_; }

    double k1(double x) const;
    double k(std::span<const double> x) const;
    double psi1(double x) const;
    /// |k| is negligible (below 1e-12 of its peak) beyond this distance per axis.
    double support_radius() const { return support_; }

    /// Positive mass of k, integral of max(k, 0).
    double k1_positive_mass() const;
    /// Draws one coordinate from |k| / ||k||_1; returns the sign of k there.
    int sample_abs_k1(Rng& rng, double& x) const;

    std::string describe() const;

private:
    friend KernelPair build_kernel_pair(const NoiseDistribution&, double, double, std::size_t,
                                        std::optional<double>, bool);
    Kind kind_ = Kind::identity;
    std::size_t dim_ = 1;
    NoiseDistribution phi_;
    double sigma_psi_ = 0.0, sigma_k_ = 0.0;
    double epsilon_ = 0.0, gamma_ = 0.0, psi_tail_ = 0.0, residual_ = 0.0;
    double support_ = 0.0;
    // lattice kind: k sampled at x_j = j h, j = 0..N-1 (even extension)
    std::vector<double> table_;
    double table_h_ = 0.0;
    // cumulative |k| on [0, L] for sampling
    std::vector<double> abs_cdf_;
};

/// Builds the pair with sigma_psi = epsilon / 4 unless given. Throws
/// PreconditionError when Psi's tail beyond epsilon exceeds gamma, HypothesisError
/// when the Fourier floor fails on Psi's band, and NumericalError when the kernel
/// cannot be realized (unbounded amplification or residual above 1e-3).
KernelPair build_kernel_pair(const NoiseDistribution& phi, double epsilon, double gamma, std::size_t D,
                             std::optional<double> sigma_psi = std::nullopt, bool force_lattice = false);

/// Maximum of |(K * Phi) - Psi| over a probe grid in D <= 3 dimensions.
double kernel_residual(const KernelPair& kp);

/// Signed measure P_n(A) = (1/n) sum_i integral_A K(u - Y_i) du.
class DeconvolvedMeasure {
public:
    DeconvolvedMeasure(PointCloud data, KernelPair kernel);

    const PointCloud& data() const { return data_; }
    const KernelPair& kernel() const { return kernel_; }

    /// Lattice midpoint quadrature over the ball, pitch radius/16.
    double eval_on_ball(std::span<const double> center, double radius) const;

    /// Mixture sampling: uniform data point plus a draw from the positive part of K.
    PointCloud resample(std::size_t count, std::uint64_t seed) const;

private:
    void gather(std::span<const double> center, double reach, std::vector<Index>& out) const;

    PointCloud data_;
    KernelPair kernel_;
    double cell_ = 0.0;
    std::vector<double> lo_;
    std::vector<std::size_t> dims_;
    std::vector<std::size_t> start_;
    std::vector<Index> order_;
};

/// Tail mass of the isotropic Gaussian N(0, sigma^2 I_D) outside the ball of radius eps.
double gaussian_tail_mass(std::size_t D, double eps, double sigma);

struct DeconParameters {
    double epsilon = 0.0;    // 0.9 (sqrt9 - sqrt8) tau / 5
    double sigma_psi = 0.0;
    double gamma = 0.0;      // Psi tail beyond epsilon
    double omega = 0.0;      // a v_d eps^d cos^d(theta_eps) (1 - gamma) - gamma
    double cover = 0.0;      // vol(M) / (cos^d(theta) v_d (2 eps)^d)
    std::size_t m = 0;       // resample count
};

/// Picks epsilon with a 10% margin, then shrinks sigma_psi (and so gamma) until omega >= 2 gamma.
/// m = max(ceil((log cover + log(2/delta)) / omega), ceil(c2 n)).
DeconParameters solve_decon_parameters(double a, std::size_t d, std::size_t D, double tau, double volume,
                                       std::size_t n, double c2 = 2.0, double delta = 1e-3);

/// Removes exactly the points whose ball of radius 4 epsilon has measure <= 2 gamma.
CleanReport decon_clean(const PointCloud& samples, const DeconvolvedMeasure& m, double epsilon, double gamma);

}  // namespace homolens
