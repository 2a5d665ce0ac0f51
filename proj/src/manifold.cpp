#include "homolens/manifold.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numeric>
#include <random>

#include "homolens/error.hpp"
#include "homolens/numeric.hpp"

namespace homolens {

std::string to_string(ManifoldFamily f) {
    switch (f) {
        case ManifoldFamily::circle: return "circle";
        case ManifoldFamily::sphere: return "sphere";
        case ManifoldFamily::torus: return "torus";
        case ManifoldFamily::m1_pair_of_balls: return "m1";
        case ManifoldFamily::m2_pair_of_annuli: return "m2";
    }
    return "?";
}

ManifoldFamily parse_manifold_family(const std::string& name) {
    if (name == "circle") return ManifoldFamily::circle;
    if (name == "sphere" || name == "sphere_d") return ManifoldFamily::sphere;
    if (name == "torus") return ManifoldFamily::torus;
    if (name == "m1" || name == "m1_pair_of_balls") return ManifoldFamily::m1_pair_of_balls;
    if (name == "m2" || name == "m2_pair_of_annuli") return ManifoldFamily::m2_pair_of_annuli;
    throw PreconditionError("unknown manifold family '" + name + "'");
}

HomologyProfile ManifoldSpec::true_homology() const {
    switch (family) {
        case ManifoldFamily::circle: return {1, 1};
        case ManifoldFamily::sphere: return sphere_homology(intrinsic_dim);
        case ManifoldFamily::torus: return {1, 2, 1};
        // Boundary of a flattened (d+1)-ball: a d-sphere.
        case ManifoldFamily::m1_pair_of_balls: return sphere_homology(intrinsic_dim);
        case ManifoldFamily::m2_pair_of_annuli: {
            // d = 1: two disjoint closed curves; d >= 2: S^1 x S^{d-1}.
            if (intrinsic_dim == 1) return {2, 2};
            return product_homology(sphere_homology(1), sphere_homology(intrinsic_dim - 1));
        }
    }
    return {};
}

void ManifoldSpec::validate() const {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw PreconditionError("manifold: tau must be positive");
    if (density_floor < 0.0) throw PreconditionError("manifold: density floor a must be nonnegative");
    if (intrinsic_dim == 0) throw PreconditionError("manifold: intrinsic dimension d must be positive");
    if (intrinsic_dim >= ambient_dim)
        throw PreconditionError("manifold: requires d < D (d=" + std::to_string(intrinsic_dim) +
                                ", D=" + std::to_string(ambient_dim) + ")");
    if (!center.empty() && center.size() != ambient_dim)
        throw PreconditionError("manifold: center must have D coordinates");
    switch (family) {
        case ManifoldFamily::circle:
            if (intrinsic_dim != 1) throw PreconditionError("circle: intrinsic dimension must be 1");
            break;
        case ManifoldFamily::sphere: break;
        case ManifoldFamily::torus:
            if (intrinsic_dim != 2 || ambient_dim < 3) throw PreconditionError("torus: requires d = 2, D >= 3");
            break;
        case ManifoldFamily::m1_pair_of_balls:
        case ManifoldFamily::m2_pair_of_annuli:
            if (!(4.0 * tau < 1.0 - tau))
                throw PreconditionError("m1/m2: requires 4*tau < 1 - tau (inner radius must fit)");
            break;
    }
}

ManifoldSpec circle_spec(double tau, std::size_t ambient_dim) {
    ManifoldSpec s;
    s.family = ManifoldFamily::circle;
    s.intrinsic_dim = 1;
    s.ambient_dim = ambient_dim;
    s.tau = tau;
    return s;
}

ManifoldSpec sphere_spec(std::size_t d, double tau, std::size_t ambient_dim) {
    ManifoldSpec s;
    s.family = ManifoldFamily::sphere;
    s.intrinsic_dim = d;
    s.ambient_dim = ambient_dim;
    s.tau = tau;
    return s;
}

ManifoldSpec torus_spec(double tau, std::size_t ambient_dim) {
    ManifoldSpec s;
    s.family = ManifoldFamily::torus;
    s.intrinsic_dim = 2;
    s.ambient_dim = ambient_dim;
    s.tau = tau;
    return s;
}

PointCloud Manifold::sample_uniform(std::size_t n, Rng& rng) const {
    std::vector<double> flat;
    flat.reserve(n * ambient_dim());
    for (std::size_t i = 0; i < n; ++i) sample_point(rng, flat);
    return PointCloud(ambient_dim(), std::move(flat));
}

namespace {

double center_coord(const ManifoldSpec& s, std::size_t k) { return s.center.empty() ? 0.0 : s.center[k]; }

void uniform_direction(Rng& rng, std::size_t k, std::vector<double>& dir) {
    std::normal_distribution<double> g(0.0, 1.0);
    dir.resize(k);
    double norm = 0.0;
    do {
        norm = 0.0;
        for (auto& v : dir) {
            v = g(rng);
            norm += v * v;
        }
    } while (norm < 1e-300);
    norm = std::sqrt(norm);
    for (auto& v : dir) v /= norm;
}

/// Round sphere of radius tau in the first d+1 coordinates (circle when d = 1).
class RoundSphere : public Manifold {
public:
    explicit RoundSphere(ManifoldSpec s) : Manifold(std::move(s)) {}

    double volume() const override {
        const std::size_t d = spec_.intrinsic_dim;
        return unit_sphere_area(d + 1) * std::pow(spec_.tau, static_cast<double>(d));
    }

    double distance(std::span<const double> x) const override {
        const std::size_t k = spec_.intrinsic_dim + 1;
        double in = 0.0, rest = 0.0;
        for (std::size_t a = 0; a < x.size(); ++a) {
            const double v = x[a] - center_coord(spec_, a);
            (a < k ? in : rest) += v * v;
        }
        const double radial = std::sqrt(in) - spec_.tau;
        return std::sqrt(radial * radial + rest);
    }

    Box bounds() const override {
        Box b;
        const std::size_t k = spec_.intrinsic_dim + 1;
        for (std::size_t a = 0; a < spec_.ambient_dim; ++a) {
            const double c = center_coord(spec_, a);
            const double h = a < k ? spec_.tau : 0.0;
            b.lo.push_back(c - h);
            b.hi.push_back(c + h);
        }
        return b;
    }

    void sample_point(Rng& rng, std::vector<double>& out) const override {
        const std::size_t k = spec_.intrinsic_dim + 1;
        std::vector<double> dir;
        if (k == 2) {
            std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
            const double t = u(rng);
            dir = {std::cos(t), std::sin(t)};
        } else {
            uniform_direction(rng, k, dir);
        }
        for (std::size_t a = 0; a < spec_.ambient_dim; ++a)
            out.push_back(center_coord(spec_, a) + (a < k ? spec_.tau * dir[a] : 0.0));
    }
};

double wrap_angle(double t) {
    t = std::fmod(t, 2.0 * M_PI);
    if (t < 0) t += 2.0 * M_PI;
    return t;
}

}  // namespace

// ---------------------------------------------------------------------------
// Profile pieces
// ---------------------------------------------------------------------------

double ProfilePiece::length() const {
    if (kind == Kind::segment) return std::hypot(b0 - a0, b1 - a1);
    return r * (t1 - t0);
}

std::pair<double, double> ProfilePiece::at(double u) const {
    if (kind == Kind::segment) return {a0 + u * (b0 - a0), a1 + u * (b1 - a1)};
    const double t = t0 + u * (t1 - t0);
    return {a0 + r * std::cos(t), a1 + r * std::sin(t)};
}

double ProfilePiece::planar_distance(double rho, double z) const {
    if (kind == Kind::segment) {
        const double dx = b0 - a0, dz = b1 - a1;
        const double len2 = dx * dx + dz * dz;
        double u = len2 > 0 ? ((rho - a0) * dx + (z - a1) * dz) / len2 : 0.0;
        u = std::clamp(u, 0.0, 1.0);
        return std::hypot(rho - (a0 + u * dx), z - (a1 + u * dz));
    }
    const double vr = rho - a0, vz = z - a1;
    const double span = t1 - t0;
    if (span >= 2.0 * M_PI - 1e-15) return std::abs(std::hypot(vr, vz) - r);
    const double rel = wrap_angle(std::atan2(vz, vr) - t0);
    if (rel <= span) return std::abs(std::hypot(vr, vz) - r);
    const auto [p0, q0] = at(0.0);
    const auto [p1, q1] = at(1.0);
    return std::min(std::hypot(rho - p0, z - q0), std::hypot(rho - p1, z - q1));
}

ProfileManifold::ProfileManifold(ManifoldSpec spec, std::vector<ProfilePiece> pieces)
    : Manifold(std::move(spec)), pieces_(std::move(pieces)) {
    const std::size_t d = spec_.intrinsic_dim;
    const double sphere = unit_sphere_area(d);
    for (const auto& p : pieces_) {
        const double len = p.length();
        auto rho_pow = [&](double u) {
            const double rho = p.at(u).first;
            return d == 1 ? 1.0 : std::pow(std::max(rho, 0.0), static_cast<double>(d - 1));
        };
        const double integral =
            boost::math::quadrature::gauss_kronrod<double, 61>::integrate(rho_pow, 0.0, 1.0, 12, 1e-13);
        piece_volumes_.push_back(sphere * len * integral);
        double mr = 0.0;
        for (int k = 0; k <= 4096; ++k) mr = std::max(mr, p.at(k / 4096.0).first);
        if (p.kind == ProfilePiece::Kind::arc) {
            // Rightmost point of the circle when it lies within the angular range.
            const double rel = wrap_angle(0.0 - p.t0);
            if (rel <= p.t1 - p.t0) mr = std::max(mr, p.a0 + p.r);
        }
        max_rho_.push_back(mr);
    }
    total_volume_ = std::accumulate(piece_volumes_.begin(), piece_volumes_.end(), 0.0);
}

void ProfileManifold::planar_coords(std::span<const double> x, double& rho, double& z, double& rest2) const {
    const std::size_t d = spec_.intrinsic_dim;
    double r2 = 0.0;
    rest2 = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) {
        const double v = x[a] - center_coord(spec_, a);
        if (a < d)
            r2 += v * v;
        else if (a == d)
            z = v;
        else
            rest2 += v * v;
    }
    rho = std::sqrt(r2);
}

std::pair<std::size_t, double> ProfileManifold::nearest_piece(std::span<const double> x) const {
    double rho = 0, z = 0, rest2 = 0;
    planar_coords(x, rho, z, rest2);
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
        const double dk = pieces_[k].planar_distance(rho, z);
        if (dk < best_d) {
            best_d = dk;
            best = k;
        }
    }
    return {best, std::sqrt(best_d * best_d + rest2)};
}

double ProfileManifold::distance(std::span<const double> x) const { return nearest_piece(x).second; }

Box ProfileManifold::bounds() const {
    const std::size_t d = spec_.intrinsic_dim;
    double rmax = 0.0, zlo = std::numeric_limits<double>::infinity(), zhi = -zlo;
    for (const auto& p : pieces_) {
        for (int k = 0; k <= 4096; ++k) {
            const auto [rho, z] = p.at(k / 4096.0);
            zlo = std::min(zlo, z);
            zhi = std::max(zhi, z);
        }
        if (p.kind == ProfilePiece::Kind::arc) {
            zlo = std::min(zlo, p.a1 - p.r);
            zhi = std::max(zhi, p.a1 + p.r);
        }
    }
    for (double mr : max_rho_) rmax = std::max(rmax, mr);
    Box b;
    for (std::size_t a = 0; a < spec_.ambient_dim; ++a) {
        const double c = center_coord(spec_, a);
        if (a < d) {
            b.lo.push_back(c - rmax);
            b.hi.push_back(c + rmax);
        } else if (a == d) {
            b.lo.push_back(c + zlo);
            b.hi.push_back(c + zhi);
        } else {
            b.lo.push_back(c);
            b.hi.push_back(c);
        }
    }
    return b;
}

double ProfileManifold::label_volume(RegionLabel label) const {
    double v = 0.0;
    for (std::size_t k = 0; k < pieces_.size(); ++k)
        if (pieces_[k].label == label) v += piece_volumes_[k];
    return v;
}

void ProfileManifold::embed(double rho, double z, std::span<const double> direction,
                            std::vector<double>& out) const {
    const std::size_t d = spec_.intrinsic_dim;
    for (std::size_t a = 0; a < spec_.ambient_dim; ++a) {
        const double c = center_coord(spec_, a);
        if (a < d)
            out.push_back(c + rho * direction[a]);
        else if (a == d)
            out.push_back(c + z);
        else
            out.push_back(c);
    }
}

void ProfileManifold::sample_in_piece(std::size_t k, Rng& rng, std::vector<double>& out) const {
    const std::size_t d = spec_.intrinsic_dim;
    const auto& p = pieces_[k];
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double rho = 0, z = 0;
    // Volume element is proportional to rho^{d-1} ds: rejection against the piece maximum.
    for (;;) {
        std::tie(rho, z) = p.at(unif(rng));
        if (d == 1) break;
        const double accept = std::pow(std::max(rho, 0.0) / max_rho_[k], static_cast<double>(d - 1));
        if (unif(rng) <= accept) break;
    }
    std::vector<double> dir;
    if (d == 1)
        dir = {unif(rng) < 0.5 ? -1.0 : 1.0};
    else
        uniform_direction(rng, d, dir);
    embed(rho, z, dir, out);
}

PointCloud ProfileManifold::sample_weighted(std::size_t n, Rng& rng, std::span<const double> weights) const {
    if (weights.size() != pieces_.size()) throw PreconditionError("sample_weighted: one weight per piece");
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    std::vector<double> flat;
    flat.reserve(n * ambient_dim());
    for (std::size_t i = 0; i < n; ++i) sample_in_piece(pick(rng), rng, flat);
    return PointCloud(ambient_dim(), std::move(flat));
}

void ProfileManifold::sample_point(Rng& rng, std::vector<double>& out) const {
    std::discrete_distribution<std::size_t> pick(piece_volumes_.begin(), piece_volumes_.end());
    sample_in_piece(pick(rng), rng, out);
}

namespace {

std::vector<ProfilePiece> m1_pieces(double tau) {
    using K = ProfilePiece::Kind;
    const double inner = 4.0 * tau, outer = 1.0 - tau;
    std::vector<ProfilePiece> v;
    for (double z : {tau, -tau}) {
        v.push_back({K::segment, 0.0, z, inner, z, 0, 0, 0, RegionLabel::w1});
        v.push_back({K::segment, inner, z, outer, z, 0, 0, 0, RegionLabel::common});
    }
    v.push_back({K::arc, outer, 0.0, 0, 0, tau, -M_PI / 2, M_PI / 2, RegionLabel::common});
    return v;
}

std::vector<ProfilePiece> m2_pieces(double tau) {
    using K = ProfilePiece::Kind;
    const double inner = 4.0 * tau, outer = 1.0 - tau;
    std::vector<ProfilePiece> v;
    for (double z : {tau, -tau}) v.push_back({K::segment, inner, z, outer, z, 0, 0, 0, RegionLabel::common});
    v.push_back({K::arc, outer, 0.0, 0, 0, tau, -M_PI / 2, M_PI / 2, RegionLabel::common});
    v.push_back({K::arc, inner, 0.0, 0, 0, tau, M_PI / 2, 3 * M_PI / 2, RegionLabel::w2});
    return v;
}

std::unique_ptr<ProfileManifold> make_profile_manifold(const ManifoldSpec& spec) {
    switch (spec.family) {
        case ManifoldFamily::torus: {
            using K = ProfilePiece::Kind;
            std::vector<ProfilePiece> v{
                {K::arc, 2.0 * spec.tau, 0.0, 0, 0, spec.tau, 0.0, 2 * M_PI, RegionLabel::common}};
            return std::make_unique<ProfileManifold>(spec, std::move(v));
        }
        case ManifoldFamily::m1_pair_of_balls: return std::make_unique<ProfileManifold>(spec, m1_pieces(spec.tau));
        case ManifoldFamily::m2_pair_of_annuli: return std::make_unique<ProfileManifold>(spec, m2_pieces(spec.tau));
        default: return nullptr;
    }
}

void check_density_floor(const Manifold& m) {
    const double a = m.spec().density_floor;
    if (a > 0.0 && a * m.volume() > 1.0 + 1e-12)
        throw PreconditionError("manifold: density floor a=" + std::to_string(a) + " exceeds 1/vol(M)=" +
                                std::to_string(1.0 / m.volume()));
}

}  // namespace

std::unique_ptr<Manifold> make_manifold(const ManifoldSpec& spec) {
    spec.validate();
    std::unique_ptr<Manifold> m;
    if (spec.family == ManifoldFamily::circle || spec.family == ManifoldFamily::sphere)
        m = std::make_unique<RoundSphere>(spec);
    else
        m = make_profile_manifold(spec);
    check_density_floor(*m);
    return m;
}

PointCloud sample_manifold(const ManifoldSpec& spec, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw PreconditionError("sample_manifold: n must be at least 1");
    const auto m = make_manifold(spec);
    Rng rng = make_rng(seed, stream::manifold);
    return m->sample_uniform(n, rng);
}

std::vector<double> tube_distance(const PointCloud& cloud, const Manifold& m) {
    if (cloud.ambient_dim() != m.ambient_dim())
        throw PreconditionError("tube_distance: cloud and manifold dimensions differ");
    std::vector<double> out(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) out[i] = m.distance(cloud.point(i));
    return out;
}

std::vector<double> tube_distance(const PointCloud& cloud, const ManifoldSpec& spec) {
    return tube_distance(cloud, *make_manifold(spec));
}

// ---------------------------------------------------------------------------
// Lower-bound pair
// ---------------------------------------------------------------------------

double LowerBoundPair::tv_closed_form() const { return a * std::max(vol_w1(), vol_w2()); }

namespace {

std::vector<double> piece_masses(const ProfileManifold& m, double common, double special) {
    std::vector<double> w;
    for (std::size_t k = 0; k < m.pieces().size(); ++k)
        w.push_back((m.pieces()[k].label == RegionLabel::common ? common : special) * m.piece_volume(k));
    return w;
}

}  // namespace

PointCloud LowerBoundPair::sample_p1(std::size_t n, std::uint64_t seed) const {
    Rng rng = make_rng(seed, stream::manifold);
    const auto w = piece_masses(*m1, density_common, density_w1);
    return m1->sample_weighted(n, rng, w);
}

PointCloud LowerBoundPair::sample_p2(std::size_t n, std::uint64_t seed) const {
    Rng rng = make_rng(seed, stream::manifold);
    const auto w = piece_masses(*m2, density_common, density_w2);
    return m2->sample_weighted(n, rng, w);
}

LowerBoundPair build_lower_bound_pair(std::size_t d, std::size_t D, double tau, double a) {
    if (!(a > 0.0)) throw PreconditionError("lower-bound pair: a must be positive");
    LowerBoundPair pair;
    pair.a = a;
    for (auto* s : {&pair.spec1, &pair.spec2}) {
        s->intrinsic_dim = d;
        s->ambient_dim = D;
        s->tau = tau;
        s->density_floor = a;
    }
    pair.spec1.family = ManifoldFamily::m1_pair_of_balls;
    pair.spec2.family = ManifoldFamily::m2_pair_of_annuli;
    pair.spec1.validate();
    pair.spec2.validate();
    pair.m1 = std::shared_ptr<const ProfileManifold>(make_profile_manifold(pair.spec1).release());
    pair.m2 = std::shared_ptr<const ProfileManifold>(make_profile_manifold(pair.spec2).release());

    const double vw1 = pair.vol_w1(), vw2 = pair.vol_w2();
    const double vc1 = pair.m1->label_volume(RegionLabel::common);
    // Density a on the larger W set; the other W set carries the same mass; the rest is spread evenly.
    const double mass_w = a * std::max(vw1, vw2);
    pair.density_common = (1.0 - mass_w) / vc1;
    if (pair.density_common < a)
        throw PreconditionError("lower-bound pair: mass balance fails, a=" + std::to_string(a) +
                                " leaves density " + std::to_string(pair.density_common) +
                                " < a on M1 ∩ M2 (need a <= " +
                                std::to_string(1.0 / (vc1 + std::max(vw1, vw2))) + ")");
    pair.density_w1 = mass_w / vw1;
    pair.density_w2 = mass_w / vw2;

    auto make_density = [](std::shared_ptr<const ProfileManifold> m, double common, double special) {
        return DensityFn([m, common, special](std::span<const double> x) {
            const auto [k, dist] = m->nearest_piece(x);
            if (dist > 1e-9) return 0.0;
            return m->pieces()[k].label == RegionLabel::common ? common : special;
        });
    };
    pair.p1 = make_density(pair.m1, pair.density_common, pair.density_w1);
    pair.p2 = make_density(pair.m2, pair.density_common, pair.density_w2);
    return pair;
}

Quadrature profile_quadrature(const ProfileManifold& m, std::size_t cells_per_piece) {
    const std::size_t d = m.spec().intrinsic_dim;
    const double sphere = unit_sphere_area(d);
    std::vector<double> dir(d, 0.0);
    dir[0] = 1.0;
    Quadrature q;
    q.points = PointCloud(m.ambient_dim());
    std::vector<double> buf;
    for (const auto& p : m.pieces()) {
        const double h = p.length() / static_cast<double>(cells_per_piece);
        for (std::size_t c = 0; c < cells_per_piece; ++c) {
            const double u = (static_cast<double>(c) + 0.5) / static_cast<double>(cells_per_piece);
            const auto [rho, z] = p.at(u);
            buf.clear();
            m.embed(rho, z, dir, buf);
            q.points.push_back(buf);
            q.weights.push_back(sphere * std::pow(std::max(rho, 0.0), static_cast<double>(d - 1)) * h);
        }
    }
    return q;
}

}  // namespace homolens
