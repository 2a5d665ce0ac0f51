#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "homolens/geometry.hpp"

namespace homolens {

/// Simplices of each dimension p >= 1 stored as flat, lexicographically sorted
/// arrays of strictly increasing (p+1)-tuples. Vertices are 0..vertex_count-1.
class SimplicialComplex {
public:
    SimplicialComplex() = default;
    SimplicialComplex(std::size_t vertex_count, std::size_t top_dim);

    std::size_t vertex_count() const { return vertex_count_; }
    std::size_t top_dim() const { return top_dim_; }

    /// Number of p-simplices (p = 0 gives the vertex count).
    std::size_t count(std::size_t p) const;
    std::span<const Index> simplex(std::size_t p, std::size_t k) const;
    /// Position of the sorted tuple among the p-simplices, or npos.
    std::size_t find(std::span<const Index> tuple) const;
    bool contains(std::span<const Index> tuple) const { return find(tuple) != npos; }

    /// Simplex counts for p = 0..top_dim.
    std::vector<std::size_t> counts() const;
    std::size_t total_size() const;

    /// Appends a p-simplex; callers must keep the per-dimension order sorted
    /// (use normalize() otherwise).
    void append(std::span<const Index> tuple);
    /// Sorts and deduplicates every dimension.
    void normalize();

    /// True when every face of every stored simplex is stored.
    bool is_hereditary() const;
    bool is_subcomplex_of(const SimplicialComplex& other) const;

    const std::vector<Index>& flat(std::size_t p) const { return simplices_[p]; }

    friend bool operator==(const SimplicialComplex&, const SimplicialComplex&) = default;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::size_t vertex_count_ = 0;
    std::size_t top_dim_ = 0;
    std::vector<std::vector<Index>> simplices_;  // index p; entry 0 unused
};

/// Downward closure of the given simplices, truncated at top_dim.
SimplicialComplex closure_of(std::size_t vertex_count, const std::vector<std::vector<Index>>& facets,
                             std::size_t top_dim);

inline constexpr double cech_tolerance = 1e-9;

/// Čech complex at scale epsilon: a tuple is a simplex iff its minimum enclosing
/// ball has radius <= epsilon + 1e-9; edges are exactly the pairs within 2 epsilon.
SimplicialComplex cech_complex(const PointCloud& cloud, double epsilon, std::size_t top_dim,
                               std::size_t max_simplices = 20'000'000);

/// Vietoris-Rips complex: cliques of the distance <= r graph.
SimplicialComplex rips_complex(const PointCloud& cloud, double r, std::size_t top_dim,
                               std::size_t max_simplices = 20'000'000);

/// Interchange format: one simplex per line, space-separated vertex ids.
void write_complex(std::ostream& out, const SimplicialComplex& c);
SimplicialComplex read_complex(std::istream& in);

}  // namespace homolens
