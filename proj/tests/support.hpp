#pragma once

#include <cstdint>
#include <random>

#include "homolens/geometry.hpp"

namespace testing_support {

inline homolens::PointCloud uniform_cloud(std::size_t n, std::size_t dim, std::uint64_t seed,
                                          double lo = 0.0, double hi = 1.0) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> flat(n * dim);
    for (auto& x : flat) x = u(gen);
    return homolens::PointCloud(dim, std::move(flat));
}

}  // namespace testing_support
