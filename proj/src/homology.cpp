#include "homolens/homology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "homolens/error.hpp"

namespace homolens {

void BinaryMatrix::flip(std::size_t r, std::size_t c) {
    if (r >= rows || c >= cols) throw PreconditionError("BinaryMatrix::flip: position out of range");
    auto& col = columns[c];
    const auto it = std::lower_bound(col.begin(), col.end(), static_cast<Index>(r));
    if (it != col.end() && *it == r)
        col.erase(it);
    else
        col.insert(it, static_cast<Index>(r));
}

bool BinaryMatrix::get(std::size_t r, std::size_t c) const {
    const auto& col = columns[c];
    return std::binary_search(col.begin(), col.end(), static_cast<Index>(r));
}

std::size_t BinaryMatrix::nonzeros() const {
    std::size_t s = 0;
    for (const auto& c : columns) s += c.size();
    return s;
}

BinaryMatrix multiply(const BinaryMatrix& a, const BinaryMatrix& b) {
    if (a.cols != b.rows) throw PreconditionError("multiply: inner dimensions differ");
    BinaryMatrix out(a.rows, b.cols);
    std::vector<std::uint8_t> acc(a.rows, 0);
    std::vector<Index> touched;
    for (std::size_t j = 0; j < b.cols; ++j) {
        touched.clear();
        for (Index k : b.columns[j])
            for (Index r : a.columns[k]) {
                if (!acc[r]) touched.push_back(r);
                acc[r] ^= 1;
            }
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
        for (Index r : touched) {
            if (acc[r]) out.columns[j].push_back(r);
            acc[r] = 0;
        }
    }
    return out;
}

BinaryMatrix boundary_matrix(const SimplicialComplex& c, std::size_t p) {
    if (p < 1 || p > c.top_dim())
        throw PreconditionError("boundary_matrix: p=" + std::to_string(p) + " outside [1, " +
                                std::to_string(c.top_dim()) + "]");
    BinaryMatrix m(c.count(p - 1), c.count(p));
    std::vector<Index> face;
    for (std::size_t k = 0; k < c.count(p); ++k) {
        const auto s = c.simplex(p, k);
        auto& col = m.columns[k];
        for (std::size_t drop = 0; drop <= p; ++drop) {
            face.clear();
            for (std::size_t i = 0; i <= p; ++i)
                if (i != drop) face.push_back(s[i]);
            const std::size_t row = c.find(face);
            if (row == SimplicialComplex::npos)
                throw PreconditionError("boundary_matrix: complex is not closed under faces");
            col.push_back(static_cast<Index>(row));
        }
        std::sort(col.begin(), col.end());
    }
    return m;
}

std::size_t rank_mod2_sparse(const BinaryMatrix& m) {
    std::vector<std::size_t> pivot_col(m.rows, static_cast<std::size_t>(-1));
    std::vector<std::vector<Index>> reduced(m.cols);
    std::vector<Index> tmp;
    std::size_t rank = 0;
    for (std::size_t j = 0; j < m.cols; ++j) {
        std::vector<Index> col = m.columns[j];
        while (!col.empty()) {
            const Index low = col.back();
            const std::size_t other = pivot_col[low];
            if (other == static_cast<std::size_t>(-1)) break;
            tmp.clear();
            const auto& oc = reduced[other];
            std::set_symmetric_difference(col.begin(), col.end(), oc.begin(), oc.end(), std::back_inserter(tmp));
            col.swap(tmp);
        }
        if (!col.empty()) {
            pivot_col[col.back()] = j;
            reduced[j] = std::move(col);
            ++rank;
        }
    }
    return rank;
}

std::size_t rank_mod2_dense(const BinaryMatrix& m) {
    const std::size_t words = (m.rows + 63) / 64;
    std::vector<std::uint64_t> bits(words * m.cols, 0);
    for (std::size_t j = 0; j < m.cols; ++j)
        for (Index r : m.columns[j]) bits[j * words + r / 64] ^= std::uint64_t{1} << (r % 64);
    std::vector<std::size_t> pivot_col(m.rows, static_cast<std::size_t>(-1));
    std::size_t rank = 0;
    for (std::size_t j = 0; j < m.cols; ++j) {
        std::uint64_t* col = &bits[j * words];
        for (;;) {
            std::size_t w = words;
            while (w > 0 && col[w - 1] == 0) --w;
            if (w == 0) break;
            const std::size_t low = (w - 1) * 64 + 63 - static_cast<std::size_t>(__builtin_clzll(col[w - 1]));
            const std::size_t other = pivot_col[low];
            if (other == static_cast<std::size_t>(-1)) {
                pivot_col[low] = j;
                ++rank;
                break;
            }
            const std::uint64_t* oc = &bits[other * words];
            for (std::size_t k = 0; k < w; ++k) col[k] ^= oc[k];
        }
    }
    return rank;
}

std::size_t rank_mod2(const BinaryMatrix& m) {
    if (m.rows == 0 || m.cols == 0) return 0;
    const double dense_bits = static_cast<double>(m.rows) * static_cast<double>(m.cols);
    if (m.cols < 10'000 && dense_bits <= 4e8) return rank_mod2_dense(m);
    return rank_mod2_sparse(m);
}

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    std::size_t components;
    explicit UnionFind(std::size_t n) : parent(n), components(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        parent[std::max(a, b)] = std::min(a, b);
        --components;
    }
};

}  // namespace

std::size_t component_count(const SimplicialComplex& c) {
    UnionFind uf(c.vertex_count());
    if (c.top_dim() >= 1)
        for (std::size_t k = 0; k < c.count(1); ++k) {
            const auto e = c.simplex(1, k);
            uf.unite(e[0], e[1]);
        }
    return uf.components;
}

HomologyProfile betti_numbers(const SimplicialComplex& c, std::size_t max_p) {
    if (max_p + 1 > c.top_dim())
        throw PreconditionError("betti_numbers: b_" + std::to_string(max_p) + " needs simplices of dimension " +
                                std::to_string(max_p + 1) + " but the complex stops at top_dim " +
                                std::to_string(c.top_dim()));
    std::vector<std::size_t> ranks(max_p + 2, 0);  // ranks[p] = rank of the p-th boundary map
    for (std::size_t p = 1; p <= max_p + 1; ++p) ranks[p] = rank_mod2(boundary_matrix(c, p));
    HomologyProfile h;
    for (std::size_t p = 0; p <= max_p; ++p) h.betti.push_back(c.count(p) - ranks[p] - ranks[p + 1]);
    if (h.betti[0] != component_count(c))
        throw NumericalError("betti_numbers: b0 disagrees with the component count of the 1-skeleton");
    return h;
}

CechHomology cech_homology(const PointCloud& cloud, double epsilon, std::size_t max_p, const CechOptions& opts) {
    CechHomology out;
    if (opts.allow_planar_shortcut && cloud.ambient_dim() == 2 && max_p <= 1) {
        const auto a = planar_union_homology(cloud, epsilon);
        out.profile.betti.assign(a.profile.betti.begin(), a.profile.betti.begin() + static_cast<long>(max_p + 1));
        out.complex_size = a.counts;
        out.route = "alpha2d";
        return out;
    }
    const auto c = cech_complex(cloud, epsilon, max_p + 1, opts.max_simplices);
    out.profile = betti_numbers(c, max_p);
    out.complex_size = c.counts();
    out.route = "cech";
    return out;
}

}  // namespace homolens
