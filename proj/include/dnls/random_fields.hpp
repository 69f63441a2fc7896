#pragma once

#include "dnls/grid.hpp"

#include <cstdint>

namespace dnls {

/// Sum of a few modulated Gaussian bumps centred in [-5, 5].
///
/// Bump parameters are drawn from the seed alone, so the same seed gives the
/// same continuous function on every grid (used for resolution studies).
ComplexField random_smooth_field(const Grid& grid, std::uint64_t seed, int bumps = 4);
RealField random_smooth_real_field(const Grid& grid, std::uint64_t seed, int bumps = 4);

} // namespace dnls
