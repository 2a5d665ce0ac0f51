#include "homolens/profile.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "homolens/error.hpp"
#include "homolens/numeric.hpp"

namespace homolens {

bool homology_equal(const HomologyProfile& a, const HomologyProfile& b) {
    const std::size_t n = std::max(a.betti.size(), b.betti.size());
    for (std::size_t p = 0; p < n; ++p)
        if (a[p] != b[p]) return false;
    return true;
}

std::string to_string(const HomologyProfile& h) {
    std::string out;
    for (std::size_t p = 0; p < h.betti.size(); ++p) {
        if (p) out += ',';
        out += std::to_string(h.betti[p]);
    }
    return out;
}

HomologyProfile parse_profile(const std::string& text) {
    HomologyProfile h;
    std::stringstream ss(text);
    std::string field;
    while (std::getline(ss, field, ',')) {
        std::size_t v = 0;
        const auto b = field.find_first_not_of(" \t");
        const auto e = field.find_last_not_of(" \t");
        if (b == std::string::npos) throw ParseError("empty Betti entry in '" + text + "'");
        const auto res = std::from_chars(field.data() + b, field.data() + e + 1, v);
        if (res.ec != std::errc() || res.ptr != field.data() + e + 1)
            throw ParseError("invalid Betti entry '" + field + "'");
        h.betti.push_back(v);
    }
    return h;
}

HomologyProfile sphere_homology(std::size_t d) {
    HomologyProfile h;
    h.betti.assign(d + 1, 0);
    h.betti[0] += 1;
    h.betti[d] += 1;
    return h;
}

HomologyProfile product_homology(const HomologyProfile& a, const HomologyProfile& b) {
    HomologyProfile h;
    if (a.betti.empty() || b.betti.empty()) return h;
    h.betti.assign(a.betti.size() + b.betti.size() - 1, 0);
    for (std::size_t i = 0; i < a.betti.size(); ++i)
        for (std::size_t j = 0; j < b.betti.size(); ++j) h.betti[i + j] += a.betti[i] * b.betti[j];
    return h;
}

double unit_ball_volume(std::size_t k) {
    const double half = 0.5 * static_cast<double>(k);
    return std::pow(M_PI, half) / std::tgamma(half + 1.0);
}

double unit_sphere_area(std::size_t k) { return static_cast<double>(k) * unit_ball_volume(k); }

}  // namespace homolens
