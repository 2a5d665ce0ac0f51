#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "homolens/complexes.hpp"
#include "homolens/geometry.hpp"
#include "homolens/profile.hpp"

namespace homolens {

/// Sparse matrix over Z2, stored by column (sorted, duplicate-free row indices).
struct BinaryMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<std::vector<Index>> columns;

    BinaryMatrix() = default;
    BinaryMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), columns(c) {}

    /// Toggles entry (r, c); keeps set semantics.
    void flip(std::size_t r, std::size_t c);
    bool get(std::size_t r, std::size_t c) const;
    std::size_t nonzeros() const;
};

/// Product over Z2.
BinaryMatrix multiply(const BinaryMatrix& a, const BinaryMatrix& b);

/// Rows indexed by (p-1)-simplices, columns by p-simplices, entry 1 iff facet.
BinaryMatrix boundary_matrix(const SimplicialComplex& c, std::size_t p);

std::size_t rank_mod2(const BinaryMatrix& m);
/// Column reduction with low-pivot lookup on the sparse representation.
std::size_t rank_mod2_sparse(const BinaryMatrix& m);
/// Bit-packed Gaussian elimination.
std::size_t rank_mod2_dense(const BinaryMatrix& m);

/// Betti numbers b_0..b_{max_p}; needs max_p <= top_dim - 1.
HomologyProfile betti_numbers(const SimplicialComplex& c, std::size_t max_p);

/// Connected components of the 1-skeleton (union-find).
std::size_t component_count(const SimplicialComplex& c);

/// Planar union-of-balls homology through the Delaunay alpha complex, which has
/// the homotopy type of the union of radius-epsilon balls and of the Čech complex.
struct AlphaSummary {
    HomologyProfile profile;             // (b0, b1)
    std::vector<std::size_t> counts;     // vertices, edges, triangles at scale epsilon
};
AlphaSummary planar_union_homology(const PointCloud& cloud, double epsilon);

/// Delaunay triangulation with alpha filtration values for each simplex.
struct AlphaFiltration2D {
    std::vector<Index> representative;  // duplicate points map to one vertex
    std::vector<std::pair<IndexPair, double>> edges;
    std::vector<std::pair<std::array<Index, 3>, double>> triangles;
};
AlphaFiltration2D alpha_filtration_2d(const PointCloud& cloud);

/// Homology of the Čech complex at scale epsilon up to degree max_p.
struct CechHomology {
    HomologyProfile profile;
    std::vector<std::size_t> complex_size;
    std::string route;  // "cech" or "alpha2d"
};
struct CechOptions {
    std::size_t max_simplices = 20'000'000;
    bool allow_planar_shortcut = true;
};
CechHomology cech_homology(const PointCloud& cloud, double epsilon, std::size_t max_p,
                           const CechOptions& opts = {});

}  // namespace homolens
