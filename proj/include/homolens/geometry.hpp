#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace homolens {

using Index = std::uint32_t;
using IndexPair = std::pair<Index, Index>;

/// Finite point set in R^D stored row-major. Indices are stable identifiers.
class PointCloud {
public:
    explicit PointCloud(std::size_t ambient_dim = 1);
    PointCloud(std::size_t ambient_dim, std::vector<double> flat_coords);

    static PointCloud from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t size() const { return ambient_dim_ == 0 ? 0 : coords_.size() / ambient_dim_; }
    bool empty() const { return coords_.empty(); }
    std::size_t ambient_dim() const { return ambient_dim_; }

    std::span<const double> point(std::size_t i) const {
        return {coords_.data() + i * ambient_dim_, ambient_dim_};
    }
    std::span<double> point(std::size_t i) {
        return {coords_.data() + i * ambient_dim_, ambient_dim_};
    }

    void push_back(std::span<const double> p);
    void reserve(std::size_t n) { coords_.reserve(n * ambient_dim_); }

    PointCloud subset(std::span<const Index> indices) const;
    const std::vector<double>& flat() const { return coords_; }

    friend bool operator==(const PointCloud&, const PointCloud&) = default;

private:
    std::size_t ambient_dim_;
    std::vector<double> coords_;
};

struct Ball {
    std::vector<double> center;
    double radius = 0.0;

    bool contains(std::span<const double> p, double tol = 1e-9) const;
};

double squared_distance(std::span<const double> a, std::span<const double> b);
double distance(std::span<const double> a, std::span<const double> b);

/// Unordered pairs {i, j}, i < j, with ||X_i - X_j|| <= r, sorted lexicographically.
std::vector<IndexPair> pairwise_within(const PointCloud& cloud, double r);

/// Brute-force O(n^2) pair scan; same contract as pairwise_within.
std::vector<IndexPair> pairwise_within_brute(const PointCloud& cloud, double r);

/// Compressed adjacency of the r-neighbor graph. Neighbors of each vertex are sorted by id.
struct NeighborGraph {
    std::vector<std::size_t> offsets;  // size n + 1
    std::vector<Index> neighbors;

    std::size_t vertex_count() const { return offsets.empty() ? 0 : offsets.size() - 1; }
    std::span<const Index> of(std::size_t v) const {
        return {neighbors.data() + offsets[v], offsets[v + 1] - offsets[v]};
    }
    std::size_t degree(std::size_t v) const { return offsets[v + 1] - offsets[v]; }
    std::size_t edge_count() const { return neighbors.size() / 2; }
};

/// Builds the r-neighbor graph. Throws ResourceLimitError past max_edges.
NeighborGraph neighbor_graph(const PointCloud& cloud, double r, std::size_t max_edges = 40'000'000);

/// Degree of every vertex in the r-neighbor graph without storing the graph.
std::vector<std::size_t> neighbor_counts(const PointCloud& cloud, double r);

/// Smallest ball enclosing all points. Throws PreconditionError on empty input.
Ball min_enclosing_ball(const std::vector<std::span<const double>>& pts);
Ball min_enclosing_ball(const PointCloud& cloud);
Ball min_enclosing_ball(const PointCloud& cloud, std::span<const Index> subset);

/// Radius of the smallest ball enclosing three points (closed form).
double triangle_enclosing_radius(std::span<const double> a, std::span<const double> b,
                                 std::span<const double> c);

// Point-cloud text format: one point per line, comma separated, '#' header/comment lines.
PointCloud read_point_cloud(std::istream& in);
PointCloud read_point_cloud_file(const std::string& path);
void write_point_cloud(std::ostream& out, const PointCloud& cloud, bool header = true);
void write_point_cloud_file(const std::string& path, const PointCloud& cloud, bool header = true);

}  // namespace homolens
