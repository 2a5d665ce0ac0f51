#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "doctest.h"
#include "homolens/error.hpp"
#include "homolens/geometry.hpp"
#include "support.hpp"

using namespace homolens;
using testing_support::uniform_cloud;

TEST_CASE("pairwise_within boundary is inclusive") {
    const auto c = PointCloud::from_rows({{0.0, 0.0}, {1.0, 0.0}});
    CHECK(pairwise_within(c, 1.0) == std::vector<IndexPair>{{0, 1}});
    CHECK(pairwise_within(c, 0.999).empty());
    CHECK(pairwise_within(PointCloud(3), 1.0).empty());
}

TEST_CASE("pairwise_within matches brute force scan") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const std::size_t dim = 1 + seed % 5;
        const std::size_t n = 50 + (seed * 37) % 451;
        const auto c = uniform_cloud(n, dim, seed);
        for (double r : {0.0, 0.01, 0.07, 0.2, 0.5, 2.0}) {
            auto brute = pairwise_within_brute(c, r);
            std::sort(brute.begin(), brute.end());
            REQUIRE(pairwise_within(c, r) == brute);
        }
    }
    const auto c = uniform_cloud(100, 2, 99);
    CHECK(pairwise_within(c, 0.2) == pairwise_within_brute(c, 0.2));
}

TEST_CASE("pairwise_within high dimension uses fallback consistently") {
    const auto c = uniform_cloud(80, 25, 5);
    CHECK(pairwise_within(c, 1.3) == pairwise_within_brute(c, 1.3));
}

TEST_CASE("neighbor graph and counts agree with pair list") {
    const auto c = uniform_cloud(300, 2, 11);
    const auto pairs = pairwise_within(c, 0.1);
    const auto g = neighbor_graph(c, 0.1);
    const auto deg = neighbor_counts(c, 0.1);
    CHECK(g.edge_count() == pairs.size());
    std::vector<std::size_t> expect(c.size(), 0);
    for (auto [i, j] : pairs) {
        ++expect[i];
        ++expect[j];
        const auto nb = g.of(i);
        CHECK(std::binary_search(nb.begin(), nb.end(), j));
    }
    CHECK(deg == expect);
    for (std::size_t v = 0; v < c.size(); ++v) CHECK(g.degree(v) == expect[v]);
    CHECK_THROWS_AS(neighbor_graph(c, 0.5, 10), ResourceLimitError);
}

TEST_CASE("min_enclosing_ball closed-form cases") {
    CHECK_THROWS_AS(min_enclosing_ball(std::vector<std::span<const double>>{}), PreconditionError);
    const auto one = PointCloud::from_rows({{0.3, -2.0}});
    const Ball b1 = min_enclosing_ball(one);
    CHECK(b1.radius == 0.0);
    CHECK(b1.center == std::vector<double>{0.3, -2.0});

    const auto two = PointCloud::from_rows({{0.0, 0.0, 0.0}, {2.0, 2.0, 1.0}});
    const Ball b2 = min_enclosing_ball(two);
    CHECK(b2.radius == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(b2.center[0] == doctest::Approx(1.0));

    const auto tri = PointCloud::from_rows({{0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}});
    CHECK(min_enclosing_ball(tri).radius == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
    CHECK(triangle_enclosing_radius(tri.point(0), tri.point(1), tri.point(2)) ==
          doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
}

namespace {

// Smallest enclosing ball by trying every support subset of size <= D+1 whose
// circumcenter lies in its affine hull; used as an independent oracle.
double oracle_radius(const std::vector<std::vector<double>>& pts) {
    const std::size_t n = pts.size();
    const std::size_t dim = pts[0].size();
    double best = std::numeric_limits<double>::infinity();
    // Support pairs: diameter balls.
    auto encloses = [&](const std::vector<double>& c, double r) {
        for (const auto& p : pts) {
            double s = 0;
            for (std::size_t a = 0; a < dim; ++a) s += (p[a] - c[a]) * (p[a] - c[a]);
            if (std::sqrt(s) > r + 1e-10) return false;
        }
        return true;
    };
    if (n == 1) return 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            std::vector<double> c(dim);
            double s = 0;
            for (std::size_t a = 0; a < dim; ++a) {
                c[a] = 0.5 * (pts[i][a] + pts[j][a]);
                s += (pts[i][a] - pts[j][a]) * (pts[i][a] - pts[j][a]);
            }
            const double r = 0.5 * std::sqrt(s);
            if (r < best && encloses(c, r)) best = r;
        }
    // Triples in 2-D or 3-D via the circumcenter in the plane of the triple.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k) {
                std::vector<double> u(dim), v(dim);
                double uu = 0, vv = 0, uv = 0;
                for (std::size_t a = 0; a < dim; ++a) {
                    u[a] = pts[j][a] - pts[i][a];
                    v[a] = pts[k][a] - pts[i][a];
                    uu += u[a] * u[a];
                    vv += v[a] * v[a];
                    uv += u[a] * v[a];
                }
                const double det = uu * vv - uv * uv;
                if (det <= 1e-14) continue;
                const double l1 = (vv * uu - uv * vv) / (2 * det);
                const double l2 = (uu * vv - uv * uu) / (2 * det);
                std::vector<double> c(dim);
                for (std::size_t a = 0; a < dim; ++a) c[a] = pts[i][a] + l1 * u[a] + l2 * v[a];
                double r = 0;
                for (std::size_t a = 0; a < dim; ++a) r += (c[a] - pts[i][a]) * (c[a] - pts[i][a]);
                r = std::sqrt(r);
                if (r < best && encloses(c, r)) best = r;
            }
    return best;
}

}  // namespace

TEST_CASE("min_enclosing_ball planar sets match subset oracle") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 300; ++rep) {
        const std::size_t n = 1 + rep % 9;
        std::vector<std::vector<double>> pts(n, std::vector<double>(2));
        for (auto& p : pts)
            for (auto& x : p) x = u(gen);
        const auto cloud = PointCloud::from_rows(pts);
        const Ball b = min_enclosing_ball(cloud);
        CHECK(b.radius == doctest::Approx(oracle_radius(pts)).epsilon(1e-7));
        for (std::size_t i = 0; i < n; ++i) CHECK(b.contains(cloud.point(i)));
        if (n == 3)
            CHECK(triangle_enclosing_radius(cloud.point(0), cloud.point(1), cloud.point(2)) ==
                  doctest::Approx(b.radius).epsilon(1e-9));
    }
}

TEST_CASE("min_enclosing_ball properties in higher dimension") {
    std::mt19937_64 gen(8);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t dim = 2 + rep % 4;
        const std::size_t n = 1 + rep % 30;
        const auto cloud = uniform_cloud(n, dim, 1000 + rep);
        const Ball b = min_enclosing_ball(cloud);
        double diam = 0;
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(b.contains(cloud.point(i)));
            for (std::size_t j = i + 1; j < n; ++j) diam = std::max(diam, distance(cloud.point(i), cloud.point(j)));
        }
        CHECK(b.radius >= diam / 2 - 1e-12);
        std::vector<Index> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), gen);
        CHECK(std::abs(min_enclosing_ball(cloud, perm).radius - b.radius) < 1e-9);
        if (n == 3)
            CHECK(triangle_enclosing_radius(cloud.point(0), cloud.point(1), cloud.point(2)) ==
                  doctest::Approx(b.radius).epsilon(1e-9));
    }
    // Degenerate inputs: duplicates and collinear points.
    const auto dup = PointCloud::from_rows({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}, {2, 1, 1}});
    CHECK(min_enclosing_ball(dup).radius == doctest::Approx(0.5));
    const auto line = PointCloud::from_rows({{0, 0}, {1, 1}, {2, 2}, {3, 3}, {0.5, 0.5}});
    CHECK(min_enclosing_ball(line).radius == doctest::Approx(1.5 * std::sqrt(2.0)));
}

TEST_CASE("point cloud text round trip and ragged rows") {
    const auto c = uniform_cloud(20, 3, 4, -5.0, 5.0);
    std::stringstream ss;
    write_point_cloud(ss, c);
    CHECK(read_point_cloud(ss) == c);

    std::istringstream bad("# header\n1,2\n3,4\n5\n");
    try {
        read_point_cloud(bad);
        FAIL("ragged rows accepted");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
    std::istringstream junk("1,x\n");
    CHECK_THROWS_AS(read_point_cloud(junk), ParseError);
}
