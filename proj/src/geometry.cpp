#include "homolens/geometry.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <list>
#include <numeric>
#include <ostream>
#include <sstream>

#include "homolens/error.hpp"

namespace homolens {

PointCloud::PointCloud(std::size_t ambient_dim) : ambient_dim_(ambient_dim) {
    if (ambient_dim == 0) throw PreconditionError("PointCloud: ambient dimension must be positive");
}

PointCloud::PointCloud(std::size_t ambient_dim, std::vector<double> flat_coords)
    : ambient_dim_(ambient_dim), coords_(std::move(flat_coords)) {
    if (ambient_dim == 0) throw PreconditionError("PointCloud: ambient dimension must be positive");
    if (coords_.size() % ambient_dim != 0)
        throw PreconditionError("PointCloud: coordinate count is not a multiple of the dimension");
}

PointCloud PointCloud::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw PreconditionError("PointCloud::from_rows: no rows, dimension unknown");
    PointCloud cloud(rows.front().size());
    cloud.reserve(rows.size());
    for (const auto& r : rows) cloud.push_back(r);
    return cloud;
}

void PointCloud::push_back(std::span<const double> p) {
    if (p.size() != ambient_dim_)
        throw PreconditionError("PointCloud::push_back: point has " + std::to_string(p.size()) +
                                " coordinates, expected " + std::to_string(ambient_dim_));
    coords_.insert(coords_.end(), p.begin(), p.end());
}

PointCloud PointCloud::subset(std::span<const Index> indices) const {
    PointCloud out(ambient_dim_);
    out.reserve(indices.size());
    for (Index i : indices) out.push_back(point(i));
    return out;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

double distance(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_distance(a, b));
}

bool Ball::contains(std::span<const double> p, double tol) const {
    return distance(center, p) <= radius + tol;
}

// ---------------------------------------------------------------------------
// Fixed-radius pair enumeration
// ---------------------------------------------------------------------------

namespace {

template <typename F>
void brute_pairs(const PointCloud& cloud, double r, F&& f) {
    const double r2 = r * r;
    const std::size_t n = cloud.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto pi = cloud.point(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            if (squared_distance(pi, cloud.point(j)) <= r2) f(static_cast<Index>(i), static_cast<Index>(j));
        }
    }
}

// Grid over the first min(D, 3) coordinates with cell side r. Projected distance
// never exceeds the true distance, so neighbor cells cover every candidate.
template <typename F>
void for_each_pair_within(const PointCloud& cloud, double r, F&& f) {
    const std::size_t n = cloud.size();
    const std::size_t dim = cloud.ambient_dim();
    if (n < 2) return;
    if (r < 0.0) throw PreconditionError("pairwise_within: radius must be nonnegative");
    if (dim > 20 || n < 48 || r == 0.0) {
        brute_pairs(cloud, r, f);
        return;
    }

    const std::size_t k = std::min<std::size_t>(dim, 3);
    std::array<double, 3> lo{0.0, 0.0, 0.0};
    std::array<double, 3> hi{0.0, 0.0, 0.0};
    for (std::size_t a = 0; a < k; ++a) {
        lo[a] = std::numeric_limits<double>::infinity();
        hi[a] = -std::numeric_limits<double>::infinity();
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = cloud.point(i);
        for (std::size_t a = 0; a < k; ++a) {
            lo[a] = std::min(lo[a], p[a]);
            hi[a] = std::max(hi[a], p[a]);
        }
    }
    for (std::size_t a = 0; a < k; ++a) {
        if (!std::isfinite(lo[a]) || (hi[a] - lo[a]) / r > 1e15) {
            brute_pairs(cloud, r, f);
            return;
        }
    }

    using Key = std::array<std::int64_t, 3>;
    std::vector<std::pair<Key, Index>> entries(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = cloud.point(i);
        Key key{0, 0, 0};
        for (std::size_t a = 0; a < k; ++a) key[a] = static_cast<std::int64_t>(std::floor((p[a] - lo[a]) / r));
        entries[i] = {key, static_cast<Index>(i)};
    }
    std::sort(entries.begin(), entries.end());

    std::vector<Key> keys;
    std::vector<std::size_t> starts;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0 || entries[i].first != entries[i - 1].first) {
            keys.push_back(entries[i].first);
            starts.push_back(i);
        }
    }
    starts.push_back(n);

    // Offsets strictly positive in lexicographic order: each cell pair is visited once.
    std::vector<Key> offsets;
    const int span_a = 1, span_b = k > 1 ? 1 : 0, span_c = k > 2 ? 1 : 0;
    for (int a = -span_a; a <= span_a; ++a)
        for (int b = -span_b; b <= span_b; ++b)
            for (int c = -span_c; c <= span_c; ++c) {
                const Key o{a, b, c};
                if (o > Key{0, 0, 0}) offsets.push_back(o);
            }

    const double r2 = r * r;
    for (std::size_t ci = 0; ci < keys.size(); ++ci) {
        const std::size_t b0 = starts[ci], e0 = starts[ci + 1];
        for (std::size_t x = b0; x < e0; ++x) {
            const auto px = cloud.point(entries[x].second);
            for (std::size_t y = x + 1; y < e0; ++y) {
                if (squared_distance(px, cloud.point(entries[y].second)) <= r2) {
                    const Index i = entries[x].second, j = entries[y].second;
                    f(std::min(i, j), std::max(i, j));
                }
            }
        }
        for (const Key& o : offsets) {
            const Key nk{keys[ci][0] + o[0], keys[ci][1] + o[1], keys[ci][2] + o[2]};
            const auto it = std::lower_bound(keys.begin(), keys.end(), nk);
            if (it == keys.end() || *it != nk) continue;
            const std::size_t cj = static_cast<std::size_t>(it - keys.begin());
            const std::size_t b1 = starts[cj], e1 = starts[cj + 1];
            for (std::size_t x = b0; x < e0; ++x) {
                const auto px = cloud.point(entries[x].second);
                for (std::size_t y = b1; y < e1; ++y) {
                    if (squared_distance(px, cloud.point(entries[y].second)) <= r2) {
                        const Index i = entries[x].second, j = entries[y].second;
                        f(std::min(i, j), std::max(i, j));
                    }
                }
            }
        }
    }
}

}  // namespace

std::vector<IndexPair> pairwise_within(const PointCloud& cloud, double r) {
    std::vector<IndexPair> out;
    for_each_pair_within(cloud, r, [&](Index i, Index j) { out.emplace_back(i, j); });
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<IndexPair> pairwise_within_brute(const PointCloud& cloud, double r) {
    if (r < 0.0) throw PreconditionError("pairwise_within: radius must be nonnegative");
    std::vector<IndexPair> out;
    brute_pairs(cloud, r, [&](Index i, Index j) { out.emplace_back(i, j); });
    return out;
}

NeighborGraph neighbor_graph(const PointCloud& cloud, double r, std::size_t max_edges) {
    std::vector<IndexPair> pairs;
    for_each_pair_within(cloud, r, [&](Index i, Index j) {
        if (pairs.size() >= max_edges)
            throw ResourceLimitError("neighbor graph exceeds " + std::to_string(max_edges) +
                                     " edges at radius " + std::to_string(r));
        pairs.emplace_back(i, j);
    });
    const std::size_t n = cloud.size();
    NeighborGraph g;
    g.offsets.assign(n + 1, 0);
    for (const auto& [i, j] : pairs) {
        ++g.offsets[i + 1];
        ++g.offsets[j + 1];
    }
    std::partial_sum(g.offsets.begin(), g.offsets.end(), g.offsets.begin());
    g.neighbors.resize(g.offsets[n]);
    std::vector<std::size_t> fill(g.offsets.begin(), g.offsets.end() - 1);
    for (const auto& [i, j] : pairs) {
        g.neighbors[fill[i]++] = j;
        g.neighbors[fill[j]++] = i;
    }
    pairs.clear();
    pairs.shrink_to_fit();
    for (std::size_t v = 0; v < n; ++v)
        std::sort(g.neighbors.begin() + static_cast<std::ptrdiff_t>(g.offsets[v]),
                  g.neighbors.begin() + static_cast<std::ptrdiff_t>(g.offsets[v + 1]));
    return g;
}

std::vector<std::size_t> neighbor_counts(const PointCloud& cloud, double r) {
    std::vector<std::size_t> deg(cloud.size(), 0);
    for_each_pair_within(cloud, r, [&](Index i, Index j) {
        ++deg[i];
        ++deg[j];
    });
    return deg;
}

// ---------------------------------------------------------------------------
// Minimum enclosing ball: move-to-front recursion over support sets.
// ---------------------------------------------------------------------------

namespace {

using PointRef = std::span<const double>;

// Center of the smallest sphere through all support points (center in their affine hull).
bool circumball(const std::vector<PointRef>& support, std::vector<double>& center, double& radius) {
    const std::size_t dim = support.front().size();
    const std::size_t m = support.size() - 1;
    center.assign(support.front().begin(), support.front().end());
    if (m == 0) {
        radius = 0.0;
        return true;
    }
    std::vector<std::vector<double>> v(m, std::vector<double>(dim));
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t a = 0; a < dim; ++a) v[j][a] = support[j + 1][a] - support[0][a];

    // A lambda = b with A_ij = 2 v_i.v_j, b_i = |v_i|^2.
    std::vector<std::vector<double>> mat(m, std::vector<double>(m + 1));
    double scale = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            double dot = 0.0;
            for (std::size_t a = 0; a < dim; ++a) dot += v[i][a] * v[j][a];
            mat[i][j] = 2.0 * dot;
        }
        mat[i][m] = 0.5 * mat[i][i];
        scale = std::max(scale, std::abs(mat[i][i]));
    }
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < m; ++r)
            if (std::abs(mat[r][col]) > std::abs(mat[piv][col])) piv = r;
        if (std::abs(mat[piv][col]) <= 1e-13 * scale) return false;
        std::swap(mat[piv], mat[col]);
        for (std::size_t r = 0; r < m; ++r) {
            if (r == col) continue;
            const double factor = mat[r][col] / mat[col][col];
            if (factor == 0.0) continue;
            for (std::size_t c = col; c <= m; ++c) mat[r][c] -= factor * mat[col][c];
        }
    }
    for (std::size_t j = 0; j < m; ++j) {
        const double lambda = mat[j][m] / mat[j][j];
        for (std::size_t a = 0; a < dim; ++a) center[a] += lambda * v[j][a];
    }
    radius = 0.0;
    for (const auto& s : support) radius = std::max(radius, distance(center, s));
    return true;
}

class MoveToFront {
public:
    explicit MoveToFront(const std::vector<PointRef>& pts) : pts_(pts), dim_(pts.front().size()) {
        for (std::size_t i = 0; i < pts.size(); ++i) order_.push_back(i);
    }

    Ball run() {
        std::vector<PointRef> support;
        Ball b = solve(order_.end(), support);
        return b;
    }

private:
    static bool outside(const Ball& b, PointRef p) {
        if (b.radius < 0.0) return true;
        const double d = distance(b.center, p);
        return d > b.radius * (1.0 + 1e-12) + 1e-15;
    }

    Ball solve(std::list<std::size_t>::iterator end, std::vector<PointRef>& support) {
        Ball b;
        b.radius = -1.0;
        if (!support.empty()) {
            if (!circumball(support, b.center, b.radius)) b.radius = -1.0;
        }
        if (support.size() == dim_ + 1) return b;
        for (auto it = order_.begin(); it != end;) {
            auto next = std::next(it);
            const PointRef p = pts_[*it];
            if (outside(b, p)) {
                support.push_back(p);
                std::vector<double> c;
                double rad = 0.0;
                if (circumball(support, c, rad)) {
                    b = solve(it, support);
                    order_.splice(order_.begin(), order_, it);
                }
                support.pop_back();
            }
            it = next;
        }
        return b;
    }

    const std::vector<PointRef>& pts_;
    std::size_t dim_;
    std::list<std::size_t> order_;
};

bool encloses_all(const Ball& b, const std::vector<PointRef>& pts) {
    if (b.radius < 0.0) return false;
    for (const auto& p : pts)
        if (distance(b.center, p) > b.radius * (1.0 + 1e-9) + 1e-12) return false;
    return true;
}

// Exhaustive search over support subsets; used when the incremental scheme hits a
// degenerate configuration it cannot resolve in floating point.
Ball exhaustive_ball(const std::vector<PointRef>& pts) {
    const std::size_t n = pts.size();
    const std::size_t max_support = std::min(n, pts.front().size() + 1);
    Ball best;
    best.radius = std::numeric_limits<double>::infinity();
    std::vector<PointRef> support;
    std::vector<std::size_t> idx;
    auto recurse = [&](auto&& self, std::size_t start) -> void {
        if (!support.empty()) {
            Ball b;
            if (circumball(support, b.center, b.radius) && b.radius < best.radius && encloses_all(b, pts))
                best = b;
        }
        if (support.size() == max_support) return;
        for (std::size_t i = start; i < n; ++i) {
            support.push_back(pts[i]);
            self(self, i + 1);
            support.pop_back();
        }
    };
    recurse(recurse, 0);
    return best;
}

}  // namespace

Ball min_enclosing_ball(const std::vector<std::span<const double>>& pts) {
    if (pts.empty()) throw PreconditionError("min_enclosing_ball: input must contain at least one point");
    const std::size_t dim = pts.front().size();
    for (const auto& p : pts)
        if (p.size() != dim) throw PreconditionError("min_enclosing_ball: points have mixed dimensions");
    if (pts.size() == 1) return Ball{std::vector<double>(pts[0].begin(), pts[0].end()), 0.0};

    MoveToFront mtf(pts);
    Ball b = mtf.run();
    if (encloses_all(b, pts)) return b;
    if (pts.size() <= 16) {
        Ball e = exhaustive_ball(pts);
        if (std::isfinite(e.radius)) return e;
    }
    // Last resort: keep the computed center and grow to cover every point.
    if (b.center.empty()) b.center.assign(pts[0].begin(), pts[0].end());
    b.radius = 0.0;
    for (const auto& p : pts) b.radius = std::max(b.radius, distance(b.center, p));
    return b;
}

Ball min_enclosing_ball(const PointCloud& cloud) {
    std::vector<std::span<const double>> pts;
    pts.reserve(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) pts.push_back(cloud.point(i));
    return min_enclosing_ball(pts);
}

Ball min_enclosing_ball(const PointCloud& cloud, std::span<const Index> subset) {
    std::vector<std::span<const double>> pts;
    pts.reserve(subset.size());
    for (Index i : subset) pts.push_back(cloud.point(i));
    return min_enclosing_ball(pts);
}

double triangle_enclosing_radius(std::span<const double> a, std::span<const double> b,
                                 std::span<const double> c) {
    const double ab = squared_distance(a, b);
    const double ac = squared_distance(a, c);
    const double bc = squared_distance(b, c);
    const double longest = std::max({ab, ac, bc});
    // Right or obtuse: the longest side is a diameter.
    if (longest >= ab + ac + bc - longest) return 0.5 * std::sqrt(longest);
    double uv = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) uv += (b[k] - a[k]) * (c[k] - a[k]);
    const double gram = ab * ac - uv * uv;  // 4 * area^2
    if (gram <= 0.0) return 0.5 * std::sqrt(longest);
    return std::sqrt(ab * ac * bc / (4.0 * gram));
}

// ---------------------------------------------------------------------------
// Text I/O
// ---------------------------------------------------------------------------

PointCloud read_point_cloud(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::size_t dim = 0;
    std::vector<double> flat;
    std::vector<double> row;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        row.clear();
        std::size_t pos = 0;
        while (pos <= line.size()) {
            std::size_t comma = line.find(',', pos);
            if (comma == std::string::npos) comma = line.size();
            std::size_t b = line.find_first_not_of(" \t", pos);
            std::size_t e = comma;
            while (e > b && b != std::string::npos && (line[e - 1] == ' ' || line[e - 1] == '\t')) --e;
            double v = 0.0;
            if (b == std::string::npos || b >= e)
                throw ParseError("line " + std::to_string(line_no) + ": empty coordinate field");
            const auto res = std::from_chars(line.data() + b, line.data() + e, v);
            if (res.ec != std::errc() || res.ptr != line.data() + e)
                throw ParseError("line " + std::to_string(line_no) + ": invalid number '" +
                                 line.substr(b, e - b) + "'");
            row.push_back(v);
            pos = comma + 1;
        }
        if (dim == 0) dim = row.size();
        if (row.size() != dim)
            throw ParseError("line " + std::to_string(line_no) + ": ragged row with " +
                             std::to_string(row.size()) + " coordinates, expected " + std::to_string(dim));
        flat.insert(flat.end(), row.begin(), row.end());
    }
    if (dim == 0) throw ParseError("point cloud contains no points");
    return PointCloud(dim, std::move(flat));
}

PointCloud read_point_cloud_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open point cloud file '" + path + "'");
    return read_point_cloud(in);
}

void write_point_cloud(std::ostream& out, const PointCloud& cloud, bool header) {
    char buf[64];
    if (header) out << "# n=" << cloud.size() << " D=" << cloud.ambient_dim() << '\n';
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto p = cloud.point(i);
        for (std::size_t a = 0; a < p.size(); ++a) {
            std::snprintf(buf, sizeof(buf), "%.17g", p[a]);
            if (a) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

void write_point_cloud_file(const std::string& path, const PointCloud& cloud, bool header) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write point cloud file '" + path + "'");
    write_point_cloud(out, cloud, header);
}

}  // namespace homolens
