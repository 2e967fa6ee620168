#pragma once

#include <span>
#include <vector>

#include "helab/torus.hpp"

namespace helab::detail {

/// Unnormalised forward DFT over all 2n axes of the grid.
std::vector<cplx> forward_fft(const TorusGrid& grid, std::span<const cplx> values);
/// Inverse DFT including the 1/size normalisation.
std::vector<cplx> inverse_fft(const TorusGrid& grid, std::span<const cplx> spectrum);

}  // namespace helab::detail
