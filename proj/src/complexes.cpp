#include "homolens/complexes.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "homolens/error.hpp"

namespace homolens {

SimplicialComplex::SimplicialComplex(std::size_t vertex_count, std::size_t top_dim)
    : vertex_count_(vertex_count), top_dim_(top_dim), simplices_(top_dim + 1) {}

std::size_t SimplicialComplex::count(std::size_t p) const {
    if (p == 0) return vertex_count_;
    if (p > top_dim_) return 0;
    return simplices_[p].size() / (p + 1);
}

std::span<const Index> SimplicialComplex::simplex(std::size_t p, std::size_t k) const {
    return {simplices_[p].data() + k * (p + 1), p + 1};
}

std::size_t SimplicialComplex::find(std::span<const Index> tuple) const {
    if (tuple.empty()) return npos;
    const std::size_t p = tuple.size() - 1;
    if (p == 0) return tuple[0] < vertex_count_ ? tuple[0] : npos;
    if (p > top_dim_) return npos;
    std::size_t lo = 0, hi = count(p);
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        const auto s = simplex(p, mid);
        if (std::lexicographical_compare(s.begin(), s.end(), tuple.begin(), tuple.end()))
            lo = mid + 1;
        else
            hi = mid;
    }
    if (lo < count(p) && std::equal(tuple.begin(), tuple.end(), simplex(p, lo).begin())) return lo;
    return npos;
}

std::vector<std::size_t> SimplicialComplex::counts() const {
    std::vector<std::size_t> out;
    for (std::size_t p = 0; p <= top_dim_; ++p) out.push_back(count(p));
    return out;
}

std::size_t SimplicialComplex::total_size() const {
    std::size_t s = 0;
    for (std::size_t p = 0; p <= top_dim_; ++p) s += count(p);
    return s;
}

void SimplicialComplex::append(std::span<const Index> tuple) {
    const std::size_t p = tuple.size() - 1;
    if (p == 0) {
        vertex_count_ = std::max<std::size_t>(vertex_count_, tuple[0] + 1);
        return;
    }
    if (p > top_dim_) throw PreconditionError("append: simplex dimension exceeds top_dim");
    simplices_[p].insert(simplices_[p].end(), tuple.begin(), tuple.end());
}

void SimplicialComplex::normalize() {
    for (std::size_t p = 1; p <= top_dim_; ++p) {
        const std::size_t w = p + 1;
        std::vector<std::vector<Index>> rows;
        for (std::size_t k = 0; k < count(p); ++k) {
            auto s = simplex(p, k);
            std::vector<Index> row(s.begin(), s.end());
            std::sort(row.begin(), row.end());
            if (std::adjacent_find(row.begin(), row.end()) != row.end())
                throw PreconditionError("simplex has a repeated vertex");
            rows.push_back(std::move(row));
        }
        std::sort(rows.begin(), rows.end());
        rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
        simplices_[p].clear();
        simplices_[p].reserve(rows.size() * w);
        for (const auto& r : rows) simplices_[p].insert(simplices_[p].end(), r.begin(), r.end());
    }
}

bool SimplicialComplex::is_hereditary() const {
    std::vector<Index> face;
    for (std::size_t p = 1; p <= top_dim_; ++p) {
        for (std::size_t k = 0; k < count(p); ++k) {
            const auto s = simplex(p, k);
            for (std::size_t drop = 0; drop <= p; ++drop) {
                face.clear();
                for (std::size_t i = 0; i <= p; ++i)
                    if (i != drop) face.push_back(s[i]);
                if (!contains(face)) return false;
            }
        }
    }
    return true;
}

bool SimplicialComplex::is_subcomplex_of(const SimplicialComplex& other) const {
    if (vertex_count_ > other.vertex_count()) return false;
    for (std::size_t p = 1; p <= top_dim_; ++p)
        for (std::size_t k = 0; k < count(p); ++k)
            if (!other.contains(simplex(p, k))) return false;
    return true;
}

SimplicialComplex closure_of(std::size_t vertex_count, const std::vector<std::vector<Index>>& facets,
                             std::size_t top_dim) {
    std::set<std::vector<Index>> all;
    for (auto f : facets) {
        std::sort(f.begin(), f.end());
        const std::size_t m = f.size();
        if (m > 20) throw PreconditionError("closure_of: facet too large");
        for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
            std::vector<Index> s;
            for (std::size_t i = 0; i < m; ++i)
                if (mask & (1u << i)) s.push_back(f[i]);
            if (s.size() - 1 <= top_dim) all.insert(std::move(s));
        }
    }
    SimplicialComplex c(vertex_count, top_dim);
    for (const auto& s : all) {
        if (s.back() >= vertex_count) throw PreconditionError("closure_of: vertex id out of range");
        if (s.size() > 1) c.append(s);
    }
    c.normalize();
    return c;
}

namespace {

enum class Rule { cech, rips };

SimplicialComplex clique_expansion(const PointCloud& cloud, double scale, std::size_t top_dim,
                                   std::size_t max_simplices, Rule rule) {
    const std::size_t n = cloud.size();
    SimplicialComplex c(n, top_dim);
    if (top_dim == 0 || n < 2) return c;
    const double edge_radius = rule == Rule::cech ? 2.0 * scale : scale;
    const NeighborGraph g = neighbor_graph(cloud, edge_radius, max_simplices);
    std::size_t total = n + g.edge_count();
    if (total > max_simplices) throw ResourceLimitError("complex exceeds simplex cap");

    std::vector<Index> tuple(2);
    for (std::size_t u = 0; u < n; ++u)
        for (Index v : g.of(u))
            if (v > u) {
                tuple[0] = static_cast<Index>(u);
                tuple[1] = v;
                c.append(tuple);
            }

    const double limit = scale + cech_tolerance;
    std::vector<Index> candidates, scratch, face;
    std::vector<std::span<const double>> pts;
    for (std::size_t p = 1; p < top_dim; ++p) {
        for (std::size_t k = 0; k < c.count(p); ++k) {
            const auto s = c.simplex(p, k);
            // Common neighbors above the last vertex.
            auto upper = [&](Index v) {
                const auto nb = g.of(v);
                return std::span<const Index>(std::upper_bound(nb.begin(), nb.end(), s[p]), nb.end());
            };
            auto first = upper(s[0]);
            candidates.assign(first.begin(), first.end());
            for (std::size_t i = 1; i <= p && !candidates.empty(); ++i) {
                const auto nb = upper(s[i]);
                scratch.clear();
                std::set_intersection(candidates.begin(), candidates.end(), nb.begin(), nb.end(),
                                      std::back_inserter(scratch));
                candidates.swap(scratch);
            }
            for (Index w : candidates) {
                tuple.assign(s.begin(), s.end());
                tuple.push_back(w);
                if (rule == Rule::cech) {
                    bool ok = true;
                    // Hereditary pruning: every facet containing w must already be present.
                    if (p >= 2) {
                        for (std::size_t drop = 0; drop < p + 1 && ok; ++drop) {
                            face.clear();
                            for (std::size_t i = 0; i <= p + 1; ++i)
                                if (i != drop) face.push_back(tuple[i]);
                            ok = c.contains(face);
                        }
                    }
                    if (!ok) continue;
                    double radius;
                    if (p == 1) {
                        radius = triangle_enclosing_radius(cloud.point(tuple[0]), cloud.point(tuple[1]),
                                                           cloud.point(tuple[2]));
                    } else {
                        pts.clear();
                        for (Index v : tuple) pts.push_back(cloud.point(v));
                        radius = min_enclosing_ball(pts).radius;
                    }
                    if (radius > limit) continue;
                }
                c.append(tuple);
                if (++total > max_simplices)
                    throw ResourceLimitError("complex exceeds simplex cap of " + std::to_string(max_simplices));
            }
        }
    }
    return c;
}

}  // namespace

SimplicialComplex cech_complex(const PointCloud& cloud, double epsilon, std::size_t top_dim,
                               std::size_t max_simplices) {
    if (!(epsilon > 0.0)) throw PreconditionError("cech_complex: epsilon must be positive");
    return clique_expansion(cloud, epsilon, top_dim, max_simplices, Rule::cech);
}

SimplicialComplex rips_complex(const PointCloud& cloud, double r, std::size_t top_dim,
                               std::size_t max_simplices) {
    if (!(r > 0.0)) throw PreconditionError("rips_complex: r must be positive");
    return clique_expansion(cloud, r, top_dim, max_simplices, Rule::rips);
}

void write_complex(std::ostream& out, const SimplicialComplex& c) {
    out << "# vertices=" << c.vertex_count() << " top_dim=" << c.top_dim() << '\n';
    for (std::size_t v = 0; v < c.vertex_count(); ++v) out << v << '\n';
    for (std::size_t p = 1; p <= c.top_dim(); ++p)
        for (std::size_t k = 0; k < c.count(p); ++k) {
            const auto s = c.simplex(p, k);
            for (std::size_t i = 0; i <= p; ++i) out << (i ? " " : "") << s[i];
            out << '\n';
        }
}

SimplicialComplex read_complex(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::vector<Index>> rows;
    std::size_t vertices = 0, top = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') continue;
        std::istringstream ls(line);
        std::vector<Index> row;
        long long v;
        while (ls >> v) {
            if (v < 0) throw ParseError("line " + std::to_string(line_no) + ": negative vertex id");
            row.push_back(static_cast<Index>(v));
        }
        ls.clear();
        std::string rest;
        if (ls >> rest) throw ParseError("line " + std::to_string(line_no) + ": invalid token '" + rest + "'");
        for (Index x : row) vertices = std::max<std::size_t>(vertices, x + 1);
        top = std::max(top, row.size() - 1);
        rows.push_back(std::move(row));
    }
    SimplicialComplex c(vertices, top);
    for (const auto& r : rows) c.append(r);
    c.normalize();
    if (!c.is_hereditary()) throw ParseError("complex is not closed under taking faces");
    return c;
}

}  // namespace homolens
