#pragma once

#include <cstddef>

namespace homolens {

/// Volume of the unit k-ball, v_k = pi^{k/2} / Gamma(k/2 + 1). v_0 = 1.
double unit_ball_volume(std::size_t k);

/// Surface measure of the unit sphere S^{k-1} in R^k, k * v_k. For k = 1 this is 2 (two points).
double unit_sphere_area(std::size_t k);

}  // namespace homolens
