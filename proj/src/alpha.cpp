// Planar alpha complex built on the Delaunay triangulation (dual of the Voronoi
// diagram from Boost.Polygon, which needs integer sites). Filtration values are
// computed from the quantized sites with exact integer predicates so that they
// agree with the triangulation; the quantization moves points by < 2^-31 of the extent.

#include <algorithm>
#include <array>
#include <boost/polygon/voronoi.hpp>
#include <cmath>
#include <numeric>

#include "homolens/error.hpp"
#include "homolens/homology.hpp"

namespace homolens {

namespace {

using Site = boost::polygon::point_data<std::int32_t>;
using Wide = __int128;

Wide sq_dist(const Site& a, const Site& b) {
    const Wide dx = Wide(a.x()) - b.x(), dy = Wide(a.y()) - b.y();
    return dx * dx + dy * dy;
}

// Circumradius in lattice units.
double circumradius(const Site& a, const Site& b, const Site& c) {
    const Wide ux = Wide(b.x()) - a.x(), uy = Wide(b.y()) - a.y();
    const Wide vx = Wide(c.x()) - a.x(), vy = Wide(c.y()) - a.y();
    Wide cross = ux * vy - uy * vx;
    if (cross == 0) return std::numeric_limits<double>::infinity();
    if (cross < 0) cross = -cross;
    const long double p = static_cast<long double>(sq_dist(a, b)) * static_cast<long double>(sq_dist(a, c)) *
                          static_cast<long double>(sq_dist(b, c));
    return static_cast<double>(std::sqrt(p) / (2.0L * static_cast<long double>(cross)));
}

// o lies strictly inside the circle with diameter ab.
bool in_diametral_disk(const Site& a, const Site& b, const Site& o) {
    const Wide mx2 = Wide(a.x()) + b.x(), my2 = Wide(a.y()) + b.y();
    const Wide dx = 2 * Wide(o.x()) - mx2, dy = 2 * Wide(o.y()) - my2;
    return dx * dx + dy * dy < sq_dist(a, b);
}

}  // namespace

AlphaFiltration2D alpha_filtration_2d(const PointCloud& cloud) {
    if (cloud.ambient_dim() != 2) throw PreconditionError("alpha_filtration_2d: cloud must be planar");
    const std::size_t n = cloud.size();
    AlphaFiltration2D out;
    out.representative.resize(n);
    if (n == 0) return out;

    double lo[2] = {cloud.point(0)[0], cloud.point(0)[1]}, hi[2] = {lo[0], lo[1]};
    for (std::size_t i = 0; i < n; ++i)
        for (int a = 0; a < 2; ++a) {
            lo[a] = std::min(lo[a], cloud.point(i)[a]);
            hi[a] = std::max(hi[a], cloud.point(i)[a]);
        }
    const double extent = std::max({hi[0] - lo[0], hi[1] - lo[1], 1e-300});
    const double scale = static_cast<double>(1 << 30) / extent;

    // Quantize; points landing on the same lattice site share a vertex (the lowest index).
    std::vector<Site> quant(n);
    for (std::size_t i = 0; i < n; ++i)
        quant[i] = Site(static_cast<std::int32_t>(std::llround((cloud.point(i)[0] - lo[0]) * scale)),
                        static_cast<std::int32_t>(std::llround((cloud.point(i)[1] - lo[1]) * scale)));
    std::vector<Index> order(n);
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        if (quant[a].x() != quant[b].x()) return quant[a].x() < quant[b].x();
        if (quant[a].y() != quant[b].y()) return quant[a].y() < quant[b].y();
        return a < b;
    });
    std::vector<Site> sites;
    std::vector<Index> site_point;
    for (std::size_t k = 0; k < n; ++k) {
        const Index i = order[k];
        if (k > 0 && quant[i] == quant[order[k - 1]]) {
            out.representative[i] = out.representative[order[k - 1]];
            continue;
        }
        out.representative[i] = i;
        sites.push_back(quant[i]);
        site_point.push_back(i);
    }
    if (sites.size() < 2) return out;

    boost::polygon::voronoi_diagram<double> vd;
    boost::polygon::construct_voronoi(sites.begin(), sites.end(), &vd);
    const auto* edge0 = vd.edges().data();
    auto edge_id = [&](const auto* e) {
        const auto a = static_cast<std::size_t>(e - edge0), b = static_cast<std::size_t>(e->twin() - edge0);
        return std::min(a, b);
    };

    // Per Delaunay edge (indexed by its lower Voronoi half-edge): cheapest coface and Gabriel flag.
    // Fan diagonals of cocircular rings have no Voronoi edge and go to `extra`.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> coface(vd.edges().size(), inf);
    std::vector<char> gabriel(vd.edges().size(), 1);
    struct Diagonal {
        std::size_t a, b;  // site indices
        double coface;
        bool gabriel;
    };
    std::vector<Diagonal> extra;

    std::vector<const boost::polygon::voronoi_edge<double>*> around;
    std::vector<std::size_t> ring;
    for (const auto& vertex : vd.vertices()) {
        around.clear();
        ring.clear();
        const auto* e = vertex.incident_edge();
        do {
            around.push_back(e);
            ring.push_back(e->cell()->source_index());
            e = e->rot_next();
        } while (e != vertex.incident_edge());
        for (std::size_t k = 1; k + 1 < ring.size(); ++k) {
            const std::array<std::size_t, 3> s{ring[0], ring[k], ring[k + 1]};
            const double r = circumradius(sites[s[0]], sites[s[1]], sites[s[2]]);
            std::array<Index, 3> t{site_point[s[0]], site_point[s[1]], site_point[s[2]]};
            std::sort(t.begin(), t.end());
            out.triangles.push_back({t, r / scale});
            for (int side = 0; side < 3; ++side) {
                const std::size_t a = s[side], b = s[(side + 1) % 3], o = s[(side + 2) % 3];
                const bool blocked = in_diametral_disk(sites[a], sites[b], sites[o]);
                const boost::polygon::voronoi_edge<double>* dual = nullptr;
                for (const auto* v : around) {
                    const std::size_t p = v->cell()->source_index(), q = v->twin()->cell()->source_index();
                    if ((p == a && q == b) || (p == b && q == a)) dual = v;
                }
                if (dual) {
                    const std::size_t id = edge_id(dual);
                    coface[id] = std::min(coface[id], r);
                    if (blocked) gabriel[id] = 0;
                    continue;
                }
                auto it = std::find_if(extra.begin(), extra.end(), [&](const Diagonal& d) {
                    return (d.a == a && d.b == b) || (d.a == b && d.b == a);
                });
                if (it == extra.end()) it = extra.insert(extra.end(), Diagonal{a, b, inf, true});
                it->coface = std::min(it->coface, r);
                if (blocked) it->gabriel = false;
            }
        }
    }

    // A Gabriel edge enters at half its length; otherwise with its cheapest coface.
    auto push_edge = [&](std::size_t a, std::size_t b, double cof, bool gab) {
        const double half = 0.5 * std::sqrt(static_cast<double>(sq_dist(sites[a], sites[b])));
        Index pa = site_point[a], pb = site_point[b];
        if (pa > pb) std::swap(pa, pb);
        out.edges.push_back({{pa, pb}, (gab ? half : cof) / scale});
    };
    for (const auto& e : vd.edges()) {
        const std::size_t id = static_cast<std::size_t>(&e - edge0);
        if (edge_id(&e) != id) continue;
        push_edge(e.cell()->source_index(), e.twin()->cell()->source_index(), coface[id], gabriel[id] != 0);
    }
    for (const auto& d : extra) push_edge(d.a, d.b, d.coface, d.gabriel);
    return out;
}

AlphaSummary planar_union_homology(const PointCloud& cloud, double epsilon) {
    if (!(epsilon > 0.0)) throw PreconditionError("planar_union_homology: epsilon must be positive");
    const auto f = alpha_filtration_2d(cloud);
    const std::size_t n = cloud.size();
    const double limit = epsilon + cech_tolerance;
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::size_t vertices = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (f.representative[i] == i)
            ++vertices;
        else
            parent[i] = f.representative[i];
    }
    std::size_t components = vertices, edges = 0, triangles = 0;
    for (const auto& [e, v] : f.edges) {
        if (v > limit) continue;
        ++edges;
        const std::size_t a = find(e.first), b = find(e.second);
        if (a != b) {
            parent[std::max(a, b)] = std::min(a, b);
            --components;
        }
    }
    for (const auto& t : f.triangles)
        if (t.second <= limit) ++triangles;
    // A planar 2-complex has no 2-cycles, so the Euler characteristic fixes b1.
    const long long b1 = static_cast<long long>(components) - static_cast<long long>(vertices) +
                         static_cast<long long>(edges) - static_cast<long long>(triangles);
    if (b1 < 0) throw NumericalError("planar_union_homology: inconsistent alpha complex (negative b1)");
    AlphaSummary s;
    s.profile.betti = {components, static_cast<std::size_t>(b1)};
    s.counts = {vertices, edges, triangles};
    return s;
}

}  // namespace homolens
