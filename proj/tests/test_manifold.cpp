#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "homolens/error.hpp"
#include "homolens/manifold.hpp"
#include "homolens/noise.hpp"

using namespace homolens;

namespace {

// Distance from p to the boundary of the tau-neighborhood of a horizontal core
// segment [x0, x1] x {0}; this boundary is a stadium curve.
double stadium_distance(double x, double y, double x0, double x1, double tau) {
    const double cx = std::clamp(x, x0, x1);
    return std::abs(std::hypot(x - cx, y) - tau);
}

double m1_oracle(double x, double y, double tau) { return stadium_distance(x, y, -(1 - tau), 1 - tau, tau); }

double m2_oracle(double x, double y, double tau) {
    return std::min(stadium_distance(x, y, 4 * tau, 1 - tau, tau), stadium_distance(x, y, -(1 - tau), -4 * tau, tau));
}

}  // namespace

TEST_CASE("circle samples lie on the circle and are deterministic") {
    const auto c = sample_manifold(circle_spec(1.0), 4, 1);
    CHECK(c.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::hypot(c.point(i)[0], c.point(i)[1]) == doctest::Approx(1.0));
    CHECK(sample_manifold(circle_spec(1.0), 100, 42) == sample_manifold(circle_spec(1.0), 100, 42));
    CHECK_FALSE(sample_manifold(circle_spec(1.0), 100, 42) == sample_manifold(circle_spec(1.0), 100, 43));
    CHECK_THROWS_AS(sample_manifold(circle_spec(1.0), 0, 1), PreconditionError);
}

TEST_CASE("spec validation names the violated constraint") {
    CHECK_THROWS_AS(circle_spec(-1.0).validate(), PreconditionError);
    ManifoldSpec s = circle_spec(1.0);
    s.ambient_dim = 1;
    CHECK_THROWS_AS(s.validate(), PreconditionError);
    ManifoldSpec m2;
    m2.family = ManifoldFamily::m2_pair_of_annuli;
    m2.tau = 0.25;
    try {
        m2.validate();
        FAIL("accepted tau too large");
    } catch (const PreconditionError& e) {
        CHECK(std::string(e.what()).find("4*tau < 1 - tau") != std::string::npos);
    }
    ManifoldSpec dense = circle_spec(1.0);
    dense.density_floor = 1.0;  // 1/vol = 1/(2 pi)
    CHECK_THROWS_AS(make_manifold(dense), PreconditionError);
}

TEST_CASE("true homology by family") {
    CHECK(homology_equal(circle_spec(1).true_homology(), {1, 1}));
    CHECK(homology_equal(sphere_spec(2, 1, 3).true_homology(), {1, 0, 1}));
    CHECK(homology_equal(torus_spec(0.3).true_homology(), {1, 2, 1}));
    ManifoldSpec m2;
    m2.family = ManifoldFamily::m2_pair_of_annuli;
    m2.tau = 0.05;
    CHECK(homology_equal(m2.true_homology(), {2, 2}));
    m2.intrinsic_dim = 2;
    m2.ambient_dim = 3;
    CHECK(homology_equal(m2.true_homology(), {1, 2, 1}));
    m2.intrinsic_dim = 3;
    m2.ambient_dim = 4;
    CHECK(homology_equal(m2.true_homology(), {1, 1, 1, 1}));
}

TEST_CASE("tube distance closed forms and discretization oracle") {
    const auto circle = make_manifold(circle_spec(1.0));
    CHECK(circle->distance(std::vector<double>{2.0, 0.0}) == doctest::Approx(1.0));
    CHECK(circle->distance(std::vector<double>{0.0, 1.0}) == doctest::Approx(0.0));
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const int grid = 1'000'000;
    for (int rep = 0; rep < 5; ++rep) {
        const double x = u(gen), y = u(gen);
        double best = 1e300;
        for (int k = 0; k < grid; ++k) {
            const double t = 2 * M_PI * k / grid;
            best = std::min(best, std::hypot(x - std::cos(t), y - std::sin(t)));
        }
        CHECK(std::abs(circle->distance(std::vector<double>{x, y}) - best) <= 1e-4);
    }
    // Sphere in higher ambient dimension: orthogonal coordinates add in quadrature.
    const auto sphere = make_manifold(sphere_spec(2, 0.5, 5));
    CHECK(sphere->distance(std::vector<double>{0.5, 0, 0, 0.3, 0.4}) == doctest::Approx(0.5));
}

TEST_CASE("samples from every family lie on the manifold") {
    std::vector<ManifoldSpec> specs{circle_spec(0.7, 3), sphere_spec(2, 0.4, 3), sphere_spec(3, 1.0, 5),
                                    torus_spec(0.3, 4)};
    for (auto fam : {ManifoldFamily::m1_pair_of_balls, ManifoldFamily::m2_pair_of_annuli})
        for (std::size_t d : {1u, 2u, 3u}) {
            ManifoldSpec s;
            s.family = fam;
            s.intrinsic_dim = d;
            s.ambient_dim = d + 1;
            s.tau = 0.1;
            specs.push_back(s);
        }
    for (auto s : specs) {
        s.center.assign(s.ambient_dim, 0.25);
        const auto m = make_manifold(s);
        const auto cloud = sample_manifold(s, 400, 3);
        for (double dist : tube_distance(cloud, *m)) CHECK(dist <= 1e-8);
    }
}

TEST_CASE("M1 and M2 curves match stadium distance oracles") {
    const double tau = 0.1;
    ManifoldSpec s1;
    s1.family = ManifoldFamily::m1_pair_of_balls;
    s1.tau = tau;
    ManifoldSpec s2 = s1;
    s2.family = ManifoldFamily::m2_pair_of_annuli;
    const auto c1 = sample_manifold(s1, 1000, 9);
    for (std::size_t i = 0; i < c1.size(); ++i) CHECK(m1_oracle(c1.point(i)[0], c1.point(i)[1], tau) <= 1e-8);
    const auto c2 = sample_manifold(s2, 1000, 9);
    for (std::size_t i = 0; i < c2.size(); ++i) CHECK(m2_oracle(c2.point(i)[0], c2.point(i)[1], tau) <= 1e-8);

    const auto m1 = make_manifold(s1);
    const auto m2 = make_manifold(s2);
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> u(-1.3, 1.3);
    for (int k = 0; k < 2000; ++k) {
        const std::vector<double> p{u(gen), u(gen)};
        CHECK(m1->distance(p) == doctest::Approx(m1_oracle(p[0], p[1], tau)).epsilon(1e-10));
        CHECK(m2->distance(p) == doctest::Approx(m2_oracle(p[0], p[1], tau)).epsilon(1e-10));
    }
    // Every curved piece has radius exactly tau.
    for (const auto* m : {m1.get(), m2.get()})
        for (const auto& p : dynamic_cast<const ProfileManifold*>(m)->pieces())
            if (p.kind == ProfilePiece::Kind::arc) CHECK(p.r == tau);
}

TEST_CASE("volumes agree with closed forms") {
    CHECK(make_manifold(circle_spec(0.5))->volume() == doctest::Approx(M_PI));
    CHECK(make_manifold(sphere_spec(2, 2.0, 3))->volume() == doctest::Approx(16 * M_PI));
    CHECK(make_manifold(torus_spec(0.3))->volume() == doctest::Approx(8 * M_PI * M_PI * 0.09).epsilon(1e-10));
    const double tau = 0.07;
    ManifoldSpec s;
    s.family = ManifoldFamily::m1_pair_of_balls;
    s.tau = tau;
    CHECK(make_manifold(s)->volume() == doctest::Approx(4 * (1 - tau) + 2 * M_PI * tau).epsilon(1e-10));
    s.intrinsic_dim = 2;
    s.ambient_dim = 3;
    // Two flat disks plus the revolved half circle (Pappus).
    const double expect = 2 * M_PI * (1 - tau) * (1 - tau) + 2 * M_PI * tau * ((1 - tau) * M_PI + 2 * tau);
    CHECK(make_manifold(s)->volume() == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("uniform sampling respects arc-length measure") {
    const std::size_t n = 20000;
    const auto cloud = sample_manifold(circle_spec(1.0), n, 17);
    // Arc of angle [0, 1): expected fraction 1/(2 pi).
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double t = std::atan2(cloud.point(i)[1], cloud.point(i)[0]);
        if (t >= 0 && t < 1) ++hits;
    }
    const double p = 1 / (2 * M_PI);
    CHECK(std::abs(hits / double(n) - p) <= 3 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("noise models") {
    const auto m = make_manifold(circle_spec(1.0));
    const auto clean = sample_manifold(circle_spec(1.0), 10000, 4);

    NoiseSpec none;
    CHECK(apply_noise(clean, none, *m, 1) == clean);

    NoiseSpec clutter;
    clutter.model = NoiseModel::clutter;
    clutter.pi = 1.0;
    CHECK(apply_noise(clean, clutter, *m, 1) == clean);
    clutter.pi = 0.0;
    const auto junk = apply_noise(clean, clutter, *m, 1);
    for (std::size_t a = 0; a < 2; ++a) {
        double mean = 0;
        for (std::size_t i = 0; i < junk.size(); ++i) {
            CHECK(junk.point(i)[a] >= 0.0);
            CHECK(junk.point(i)[a] <= 1.0);
            mean += junk.point(i)[a];
        }
        mean /= junk.size();
        CHECK(std::abs(mean - 0.5) <= 3 * std::sqrt(1.0 / 12 / junk.size()));
    }

    NoiseSpec tube;
    tube.model = NoiseModel::tubular;
    tube.sigma = 0.05;
    const auto thick = apply_noise(clean, tube, *m, 2);
    std::size_t outer = 0;
    for (double d : tube_distance(thick, *m)) {
        CHECK(d <= 0.05 + 1e-8);
        if (d > 0.025) ++outer;
    }
    // Area of {0.025 < dist <= 0.05} over area of {dist <= 0.05} for the unit circle.
    auto ring = [](double r0, double r1) { return M_PI * (r1 * r1 - r0 * r0); };
    const double ratio = (ring(1.025, 1.05) + ring(0.95, 0.975)) / ring(0.95, 1.05);
    CHECK(std::abs(outer / 10000.0 - ratio) <= 3 * std::sqrt(ratio * (1 - ratio) / 10000));

    tube.exact_tube = false;
    for (double d : tube_distance(apply_noise(clean, tube, *m, 2), *m)) CHECK(d <= 0.05 + 1e-8);

    NoiseSpec gauss;
    gauss.model = NoiseModel::gaussian;
    gauss.sigma = 0.1;
    const auto big = sample_manifold(circle_spec(1.0), 100000, 8);
    const auto noisy = apply_noise(big, gauss, *m, 3);
    double c00 = 0, c01 = 0, c11 = 0;
    for (std::size_t i = 0; i < big.size(); ++i) {
        const double e0 = noisy.point(i)[0] - big.point(i)[0];
        const double e1 = noisy.point(i)[1] - big.point(i)[1];
        c00 += e0 * e0;
        c01 += e0 * e1;
        c11 += e1 * e1;
    }
    const double s2 = 0.01, nn = double(big.size());
    const double frob = std::sqrt(std::pow(c00 / nn - s2, 2) + 2 * std::pow(c01 / nn, 2) + std::pow(c11 / nn - s2, 2));
    CHECK(frob <= 0.05 * s2 * std::sqrt(2.0));

    CHECK_THROWS_AS(parse_noise_model("normal_fiber"), PreconditionError);
}

TEST_CASE("additive noise laws") {
    const auto g = NoiseDistribution::gaussian(0.2);
    CHECK(g.char_fn(std::vector<double>{1.0, 2.0}) == doctest::Approx(std::exp(-0.5 * 0.04 * 5)));
    CHECK(NoiseDistribution::point_mass().char_fn(std::vector<double>{30.0}) == 1.0);
    const auto box = NoiseDistribution::uniform_box(0.5);
    CHECK(std::abs(box.char_fn_1d(box.first_fourier_zero())) < 1e-12);
    Rng rng(1);
    double sum = 0;
    std::vector<double> e(1);
    for (int i = 0; i < 20000; ++i) {
        NoiseDistribution::laplace(0.3).sample(rng, e);
        sum += std::abs(e[0]);
    }
    CHECK(sum / 20000 == doctest::Approx(0.3).epsilon(0.05));
}

TEST_CASE("lower-bound pair construction") {
    const double tau = 0.05, a = 0.2;
    const auto pair = build_lower_bound_pair(1, 2, tau, a);
    CHECK(pair.vol_w1() == doctest::Approx(16 * tau));  // 2 v_1 (4 tau)
    CHECK(pair.vol_w2() == doctest::Approx(2 * M_PI * tau));
    CHECK(pair.density_w1 == doctest::Approx(a));
    CHECK(pair.tv_closed_form() == doctest::Approx(a * 16 * tau));
    CHECK(!homology_equal(pair.spec1.true_homology(), pair.spec2.true_homology()));

    for (std::size_t d : {1u, 2u}) {
        const auto pr = build_lower_bound_pair(d, d + 1, 0.08, 0.1);
        for (const auto& [m, p] : {std::pair{pr.m1, pr.p1}, std::pair{pr.m2, pr.p2}}) {
            const auto q = profile_quadrature(*m, 20000);
            double total = 0;
            for (std::size_t i = 0; i < q.weights.size(); ++i) total += p(q.points.point(i)) * q.weights[i];
            CHECK(total == doctest::Approx(1.0).epsilon(1e-4));
        }
    }

    // Off W1 ∪ W2 the densities agree: probe the common region and the ambient plane.
    const auto probes = pair.sample_p1(10000, 3);
    std::size_t common_hits = 0;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const auto x = probes.point(i);
        const auto k = pair.m1->nearest_piece(x).first;
        if (pair.m1->pieces()[k].label != RegionLabel::common) continue;
        ++common_hits;
        CHECK(pair.p1(x) == pair.p2(x));
    }
    CHECK(common_hits > 5000);
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(-1.2, 1.2);
    for (int k = 0; k < 1000; ++k) {
        const std::vector<double> x{u(gen), u(gen)};
        if (pair.m1->distance(x) > 1e-6 && pair.m2->distance(x) > 1e-6) CHECK(pair.p1(x) == pair.p2(x));
    }
    CHECK_THROWS_AS(build_lower_bound_pair(1, 2, tau, 0.5), PreconditionError);
}
