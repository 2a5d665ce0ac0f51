#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "homolens/complexes.hpp"
#include "homolens/error.hpp"
#include "homolens/homology.hpp"
#include "homolens/manifold.hpp"
#include "support.hpp"

using namespace homolens;
using testing_support::uniform_cloud;

namespace {

// Textbook row reduction on a dense 0/1 matrix; independent of the library.
std::size_t dense_rank_oracle(std::vector<std::vector<int>> a) {
    const std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
        std::size_t piv = rank;
        while (piv < rows && a[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(a[piv], a[rank]);
        for (std::size_t r = 0; r < rows; ++r)
            if (r != rank && a[r][c])
                for (std::size_t k = c; k < cols; ++k) a[r][k] ^= a[rank][k];
        ++rank;
    }
    return rank;
}

std::vector<std::vector<int>> to_dense(const BinaryMatrix& m) {
    std::vector<std::vector<int>> d(m.rows, std::vector<int>(m.cols, 0));
    for (std::size_t c = 0; c < m.cols; ++c)
        for (Index r : m.columns[c]) d[r][c] = 1;
    return d;
}

// Betti numbers by dense elimination of every boundary map.
std::vector<long> oracle_betti(const SimplicialComplex& c) {
    std::vector<long> ranks(c.top_dim() + 2, 0);
    for (std::size_t p = 1; p <= c.top_dim(); ++p) ranks[p] = dense_rank_oracle(to_dense(boundary_matrix(c, p)));
    std::vector<long> b;
    for (std::size_t p = 0; p <= c.top_dim(); ++p) b.push_back(long(c.count(p)) - ranks[p] - ranks[p + 1]);
    return b;
}

SimplicialComplex octahedron() {
    std::vector<std::vector<Index>> f;
    for (Index x : {0u, 1u})
        for (Index y : {2u, 3u})
            for (Index z : {4u, 5u}) f.push_back({x, y, z});
    return closure_of(6, f, 2);
}

SimplicialComplex seven_vertex_torus() {
    std::vector<std::vector<Index>> f;
    for (Index i = 0; i < 7; ++i) {
        f.push_back({i, (i + 1) % 7, (i + 3) % 7});
        f.push_back({i, (i + 2) % 7, (i + 3) % 7});
    }
    return closure_of(7, f, 2);
}

SimplicialComplex disjoint_union(const SimplicialComplex& a, const SimplicialComplex& b) {
    const std::size_t top = std::max(a.top_dim(), b.top_dim());
    SimplicialComplex c(a.vertex_count() + b.vertex_count(), top);
    for (std::size_t p = 1; p <= top; ++p) {
        for (std::size_t k = 0; k < a.count(p); ++k) c.append(a.simplex(p, k));
        for (std::size_t k = 0; k < b.count(p); ++k) {
            std::vector<Index> s(b.simplex(p, k).begin(), b.simplex(p, k).end());
            for (auto& v : s) v += static_cast<Index>(a.vertex_count());
            c.append(s);
        }
    }
    c.normalize();
    return c;
}

// Brute-force Čech: every subset up to top_dim+1 vertices tested by its enclosing ball.
std::vector<std::vector<Index>> brute_cech(const PointCloud& cloud, double eps, std::size_t top_dim) {
    std::vector<std::vector<Index>> out;
    const std::size_t n = cloud.size();
    std::vector<Index> cur;
    auto rec = [&](auto&& self, Index start) -> void {
        if (cur.size() >= 2) {
            bool ok;
            if (cur.size() == 2)
                ok = distance(cloud.point(cur[0]), cloud.point(cur[1])) <= 2 * eps;
            else
                ok = min_enclosing_ball(cloud, cur).radius <= eps + 1e-9;
            if (!ok) return;
            out.push_back(cur);
        }
        if (cur.size() == top_dim + 1) return;
        for (Index v = start; v < n; ++v) {
            cur.push_back(v);
            self(self, v + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::vector<Index>> all_simplices(const SimplicialComplex& c) {
    std::vector<std::vector<Index>> out;
    for (std::size_t p = 1; p <= c.top_dim(); ++p)
        for (std::size_t k = 0; k < c.count(p); ++k) out.emplace_back(c.simplex(p, k).begin(), c.simplex(p, k).end());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("boundary matrices of small complexes") {
    const auto tri = closure_of(3, {{0, 1, 2}}, 2);
    const auto d2 = boundary_matrix(tri, 2);
    CHECK(d2.rows == 3);
    CHECK(d2.cols == 1);
    CHECK(d2.columns[0].size() == 3);
    const auto edge = closure_of(2, {{0, 1}}, 1);
    CHECK(boundary_matrix(edge, 1).columns[0] == std::vector<Index>{0, 1});
    CHECK_THROWS_AS(boundary_matrix(edge, 2), PreconditionError);
    CHECK_THROWS_AS(boundary_matrix(edge, 0), PreconditionError);

    const auto square = closure_of(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}, 1);
    const auto d1 = boundary_matrix(square, 1);
    BinaryMatrix all_edges(4, 1);
    for (Index e = 0; e < 4; ++e) all_edges.flip(e, 0);
    for (const auto& col : d1.columns) CHECK(col.size() == 2);
    CHECK(multiply(d1, all_edges).nonzeros() == 0);
}

TEST_CASE("rank over Z2") {
    BinaryMatrix id(5, 5);
    for (std::size_t i = 0; i < 5; ++i) id.flip(i, i);
    CHECK(rank_mod2(id) == 5);
    BinaryMatrix ones(3, 1);
    for (std::size_t i = 0; i < 3; ++i) ones.flip(i, 0);
    CHECK(rank_mod2(ones) == 1);
    CHECK(rank_mod2(BinaryMatrix(0, 4)) == 0);
    ones.flip(1, 0);
    CHECK(!ones.get(1, 0));

    std::mt19937_64 gen(12);
    for (int rep = 0; rep < 200; ++rep) {
        BinaryMatrix m(50, 80);
        std::bernoulli_distribution bit(0.02 + 0.1 * (rep % 5));
        for (std::size_t r = 0; r < 50; ++r)
            for (std::size_t c = 0; c < 80; ++c)
                if (bit(gen)) m.flip(r, c);
        const std::size_t expect = dense_rank_oracle(to_dense(m));
        CHECK(rank_mod2_sparse(m) == expect);
        CHECK(rank_mod2_dense(m) == expect);
        CHECK(rank_mod2(m) == expect);
    }
}

TEST_CASE("Betti numbers of reference complexes") {
    const auto hollow = closure_of(3, {{0, 1}, {1, 2}, {0, 2}}, 2);
    CHECK(homology_equal(betti_numbers(hollow, 1), {1, 1}));
    const auto filled = closure_of(3, {{0, 1, 2}}, 2);
    CHECK(homology_equal(betti_numbers(filled, 1), {1, 0}));
    const auto oct = octahedron();
    CHECK(oct.counts() == std::vector<std::size_t>{6, 12, 8});
    const auto oct3 = closure_of(6, {{0, 2, 4}, {0, 2, 5}, {0, 3, 4}, {0, 3, 5}, {1, 2, 4}, {1, 2, 5}, {1, 3, 4}, {1, 3, 5}}, 3);
    CHECK(homology_equal(betti_numbers(oct3, 2), {1, 0, 1}));
    CHECK(oracle_betti(oct) == std::vector<long>{1, 0, 1});
    const auto torus = seven_vertex_torus();
    CHECK(torus.counts() == std::vector<std::size_t>{7, 21, 14});
    CHECK(oracle_betti(torus) == std::vector<long>{1, 2, 1});
    SimplicialComplex torus3(7, 3);
    for (std::size_t p = 1; p <= 2; ++p)
        for (std::size_t k = 0; k < torus.count(p); ++k) torus3.append(torus.simplex(p, k));
    CHECK(homology_equal(betti_numbers(torus3, 2), {1, 2, 1}));
    const auto two = disjoint_union(torus3, torus3);
    CHECK(homology_equal(betti_numbers(two, 2), {2, 4, 2}));
    CHECK_THROWS_AS(betti_numbers(oct, 2), PreconditionError);

    CHECK(homology_equal(HomologyProfile{1, 1}, HomologyProfile{1, 1, 0}));
    CHECK(!homology_equal(HomologyProfile{2, 0}, HomologyProfile{2, 2}));
    CHECK(!homology_equal(HomologyProfile{1}, HomologyProfile{1, 1}));
    CHECK(to_string(parse_profile("1, 0,1")) == "1,0,1");
}

TEST_CASE("Čech complex boundary cases") {
    const auto pair = PointCloud::from_rows({{0.0, 0.0}, {1.0, 0.0}});
    CHECK(cech_complex(pair, 0.5, 1).count(1) == 1);
    const auto tri = PointCloud::from_rows({{0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}});
    const auto c55 = cech_complex(tri, 0.55, 2);
    CHECK(c55.count(1) == 3);
    CHECK(c55.count(2) == 0);
    CHECK(cech_complex(tri, 0.58, 2).count(2) == 1);
    CHECK(cech_complex(PointCloud(2), 0.3, 2).total_size() == 0);
    CHECK_THROWS_AS(cech_complex(tri, 0.0, 2), PreconditionError);
}

TEST_CASE("Čech complex matches subset enumeration") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const std::size_t dim = 2 + seed % 2;
        const auto cloud = uniform_cloud(30, dim, seed);
        const double eps = 0.1 + 0.05 * (seed % 3);
        const std::size_t top = dim == 2 ? 2 : 3;
        const auto c = cech_complex(cloud, eps, top);
        CHECK(c.is_hereditary());
        CHECK(all_simplices(c) == brute_cech(cloud, eps, top));
        CHECK(c.count(1) == pairwise_within(cloud, 2 * eps).size());
        const auto rips = rips_complex(cloud, 2 * eps, top);
        CHECK(c.is_subcomplex_of(rips));
        CHECK(rips.is_hereditary());
        CHECK(rips.flat(1) == c.flat(1));
        CHECK(c.is_subcomplex_of(cech_complex(cloud, eps * 1.2, top)));
    }
}

TEST_CASE("Rips complex") {
    const auto line = PointCloud::from_rows({{0.0}, {1.0}, {2.0}});
    const auto r = rips_complex(line, 1.0, 2);
    CHECK(r.count(1) == 2);
    CHECK(r.count(2) == 0);
    const auto tri = PointCloud::from_rows({{0.0, 0.0}, {0.1, 0.0}, {0.0, 0.1}});
    CHECK(rips_complex(tri, 0.2, 2).count(2) == 1);
}

TEST_CASE("boundary of boundary vanishes and Euler characteristic matches") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const auto cloud = uniform_cloud(25, 3, 500 + seed);
        const auto c = cech_complex(cloud, 0.25, 3);
        for (std::size_t p = 2; p <= 3; ++p)
            CHECK(multiply(boundary_matrix(c, p - 1), boundary_matrix(c, p)).nonzeros() == 0);
        const auto oracle = oracle_betti(c);
        long chi = 0, chib = 0;
        for (std::size_t p = 0; p <= 3; ++p) {
            chi += (p % 2 ? -1 : 1) * long(c.count(p));
            chib += (p % 2 ? -1 : 1) * oracle[p];
        }
        CHECK(chi == chib);
        const auto b = betti_numbers(c, 2);
        for (std::size_t p = 0; p <= 2; ++p) CHECK(long(b[p]) == oracle[p]);
        CHECK(b[0] == component_count(c));
    }
}

TEST_CASE("complex interchange round trip") {
    const auto c = cech_complex(uniform_cloud(20, 2, 4), 0.2, 2);
    std::stringstream ss;
    write_complex(ss, c);
    const auto back = read_complex(ss);
    CHECK(back.flat(1) == c.flat(1));
    CHECK(back.flat(2) == c.flat(2));
    std::istringstream bad("0 1 2\n");
    CHECK_THROWS_AS(read_complex(bad), ParseError);
}

TEST_CASE("planar alpha route agrees with explicit Čech homology") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const auto cloud = uniform_cloud(40 + seed % 30, 2, 900 + seed);
        for (double eps : {0.03, 0.07, 0.1, 0.15, 0.3}) {
            const auto a = planar_union_homology(cloud, eps);
            const auto c = cech_complex(cloud, eps, 2);
            const auto b = betti_numbers(c, 1);
            CHECK(homology_equal(a.profile, b));
        }
    }
    // Circle samples: the scale decides between one loop and a filled disk.
    const auto circle = sample_manifold(circle_spec(1.0), 60, 3);
    CHECK(homology_equal(planar_union_homology(circle, 0.5).profile, {1, 1}));
    CHECK(homology_equal(planar_union_homology(circle, 1.01).profile, {1, 0}));
    // Lattice points are massively cocircular.
    std::vector<std::vector<double>> grid;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            if (!(i >= 2 && i <= 3 && j >= 2 && j <= 3)) grid.push_back({double(i), double(j)});
    const auto g = PointCloud::from_rows(grid);
    for (double eps : {0.4, 0.5, 0.6, 0.71, 1.2})
        CHECK(homology_equal(planar_union_homology(g, eps).profile, betti_numbers(cech_complex(g, eps, 2), 1)));
    // Tight clusters on a circle form needle triangles far below the site lattice pitch.
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<std::vector<double>> rows;
        for (int c = 0; c < 12; ++c) {
            const double base = 2.0 * std::numbers::pi * u(gen);
            for (int k = 0; k < 3; ++k) {
                const double th = base + 1e-5 * u(gen);
                rows.push_back({0.5 + 0.5 * std::cos(th), 0.5 + 0.5 * std::sin(th)});
            }
        }
        for (int k = 0; k < 10; ++k) rows.push_back({u(gen), u(gen)});
        const auto cl = PointCloud::from_rows(rows);
        for (double eps : {0.05, 0.15, 0.27})
            CHECK(homology_equal(planar_union_homology(cl, eps).profile, betti_numbers(cech_complex(cl, eps, 2), 1)));
    }
    // Dense circle plus box clutter fills the square.
    auto spec = circle_spec(0.5);
    spec.center = {0.5, 0.5};
    auto mixed = sample_manifold(spec, 20000, 4);
    const auto box = uniform_cloud(20000, 2, 5);
    for (std::size_t i = 0; i < box.size(); ++i) mixed.push_back(box.point(i));
    CHECK(homology_equal(planar_union_homology(mixed, 0.27).profile, {1, 0}));
    CHECK(homology_equal(planar_union_homology(sample_manifold(spec, 20000, 4), 0.27).profile, {1, 1}));

    // Duplicates and tiny sets.
    const auto dup = PointCloud::from_rows({{0.0, 0.0}, {0.0, 0.0}, {3.0, 0.0}});
    CHECK(homology_equal(planar_union_homology(dup, 1.0).profile, {2, 0}));
    CHECK(homology_equal(planar_union_homology(PointCloud::from_rows({{1.0, 1.0}}), 1.0).profile, {1, 0}));
}
