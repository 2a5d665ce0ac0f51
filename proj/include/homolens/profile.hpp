#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace homolens {

/// Betti numbers (b0, b1, ..., bk). Comparison ignores trailing zeros.
struct HomologyProfile {
    std::vector<std::size_t> betti;

    HomologyProfile() = default;
    HomologyProfile(std::initializer_list<std::size_t> b) : betti(b) {}
    explicit HomologyProfile(std::vector<std::size_t> b) : betti(std::move(b)) {}

    std::size_t operator[](std::size_t p) const { return p < betti.size() ? betti[p] : 0; }
    bool operator==(const HomologyProfile&) const = default;  // exact, padding-sensitive
};

bool homology_equal(const HomologyProfile& a, const HomologyProfile& b);

/// "1,0,1"
std::string to_string(const HomologyProfile& h);
HomologyProfile parse_profile(const std::string& text);

/// Betti numbers of the d-sphere (length d+1).
HomologyProfile sphere_homology(std::size_t d);

/// Betti numbers of the product of two spaces (Kunneth over a field).
HomologyProfile product_homology(const HomologyProfile& a, const HomologyProfile& b);

}  // namespace homolens
