#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "homolens/geometry.hpp"
#include "homolens/profile.hpp"
#include "homolens/rng.hpp"

namespace homolens {

enum class ManifoldFamily { circle, sphere, torus, m1_pair_of_balls, m2_pair_of_annuli };

std::string to_string(ManifoldFamily f);
ManifoldFamily parse_manifold_family(const std::string& name);

struct ManifoldSpec {
    ManifoldFamily family = ManifoldFamily::circle;
    std::size_t intrinsic_dim = 1;
    std::size_t ambient_dim = 2;
    double tau = 1.0;
    double density_floor = 0.0;  // a; 0 means "whatever the uniform density gives"
    std::vector<double> center;  // empty: origin

    HomologyProfile true_homology() const;
    /// Throws PreconditionError naming the violated constraint.
    void validate() const;
};

ManifoldSpec circle_spec(double tau, std::size_t ambient_dim = 2);
ManifoldSpec sphere_spec(std::size_t d, double tau, std::size_t ambient_dim);
ManifoldSpec torus_spec(double tau, std::size_t ambient_dim = 3);

/// Axis-aligned box.
struct Box {
    std::vector<double> lo, hi;
};

/// Embedded compact manifold with uniform (volume-measure) sampling.
class Manifold {
public:
    virtual ~Manifold() = default;

    const ManifoldSpec& spec() const { return spec_; }
    std::size_t ambient_dim() const { return spec_.ambient_dim; }

    virtual double volume() const = 0;
    virtual double distance(std::span<const double> x) const = 0;
    virtual Box bounds() const = 0;
    /// Appends one volume-uniform point to `out`.
    virtual void sample_point(Rng& rng, std::vector<double>& out) const = 0;

    PointCloud sample_uniform(std::size_t n, Rng& rng) const;

protected:
    explicit Manifold(ManifoldSpec spec) : spec_(std::move(spec)) {}
    ManifoldSpec spec_;
};

std::unique_ptr<Manifold> make_manifold(const ManifoldSpec& spec);

/// n volume-uniform points; deterministic given seed (manifold stream).
PointCloud sample_manifold(const ManifoldSpec& spec, std::size_t n, std::uint64_t seed);

/// dist(cloud[i], M) for each point.
std::vector<double> tube_distance(const PointCloud& cloud, const Manifold& m);
std::vector<double> tube_distance(const PointCloud& cloud, const ManifoldSpec& spec);

// ---------------------------------------------------------------------------
// Surfaces of revolution built from a planar profile curve in the (rho, z)
// half-plane: rho = |x_0..x_{d-1}|, z = x_d. Used for the M1/M2 pair.
// ---------------------------------------------------------------------------

enum class RegionLabel { common, w1, w2 };

struct ProfilePiece {
    enum class Kind { segment, arc } kind = Kind::segment;
    // segment: from (a0, a1) to (b0, b1); arc: center (a0, a1), radius r, angles [t0, t1]
    double a0 = 0, a1 = 0, b0 = 0, b1 = 0;
    double r = 0, t0 = 0, t1 = 0;
    RegionLabel label = RegionLabel::common;

    double length() const;
    /// Profile point at arc-length fraction u in [0, 1].
    std::pair<double, double> at(double u) const;
    /// Planar distance from (rho, z) to the piece.
    double planar_distance(double rho, double z) const;
};

class ProfileManifold : public Manifold {
public:
    ProfileManifold(ManifoldSpec spec, std::vector<ProfilePiece> pieces);

    double volume() const override { return total_volume_; }
    double distance(std::span<const double> x) const override;
    Box bounds() const override;
    void sample_point(Rng& rng, std::vector<double>& out) const override;

    const std::vector<ProfilePiece>& pieces() const { return pieces_; }
    /// d-volume of piece k (|S^{d-1}| * integral of rho^{d-1} ds, by quadrature).
    double piece_volume(std::size_t k) const { return piece_volumes_[k]; }
    double label_volume(RegionLabel label) const;
    /// Index of the piece nearest to x, and the distance to it.
    std::pair<std::size_t, double> nearest_piece(std::span<const double> x) const;

    /// Sample with piece k chosen with probability proportional to weights[k],
    /// volume-uniform within the piece.
    PointCloud sample_weighted(std::size_t n, Rng& rng, std::span<const double> weights) const;
    void sample_in_piece(std::size_t k, Rng& rng, std::vector<double>& out) const;

    /// Maps a profile point and unit direction in R^d to ambient coordinates.
    void embed(double rho, double z, std::span<const double> direction, std::vector<double>& out) const;

private:
    void planar_coords(std::span<const double> x, double& rho, double& z, double& rest2) const;

    std::vector<ProfilePiece> pieces_;
    std::vector<double> piece_volumes_;
    std::vector<double> max_rho_;
    double total_volume_ = 0.0;
};

/// Evaluable density on R^D (zero off the support).
using DensityFn = std::function<double(std::span<const double>)>;

/// The lower-bound construction: two manifolds with different homology whose
/// densities agree off W1 = M1 \ M2 and W2 = M2 \ M1.
struct LowerBoundPair {
    std::shared_ptr<const ProfileManifold> m1, m2;
    ManifoldSpec spec1, spec2;
    double a = 0.0;
    double density_common = 0.0;  // on M1 ∩ M2
    double density_w1 = 0.0;      // p1 on W1
    double density_w2 = 0.0;      // p2 on W2
    DensityFn p1, p2;

    double vol_w1() const { return m1->label_volume(RegionLabel::w1); }
    double vol_w2() const { return m2->label_volume(RegionLabel::w2); }
    /// Analytic TV of the construction: a * max(vol W1, vol W2).
    double tv_closed_form() const;

    PointCloud sample_p1(std::size_t n, std::uint64_t seed) const;
    PointCloud sample_p2(std::size_t n, std::uint64_t seed) const;
};

LowerBoundPair build_lower_bound_pair(std::size_t d, std::size_t D, double tau, double a);

/// Midpoint-rule discretization of a profile manifold: ambient points with
/// quadrature weights (cells per piece given).
struct Quadrature {
    PointCloud points;
    std::vector<double> weights;
};
Quadrature profile_quadrature(const ProfileManifold& m, std::size_t cells_per_piece);

}  // namespace homolens
