#pragma once

#include "shiftlog/field.hpp"

namespace shiftlog::detail {

/// Unnormalised DFT, sign -1 (forward) or +1 (backward). in and out must be
/// distinct buffers of length grid.size() obtained from AlignedAllocator.
void dft(const GridSpec& grid, const cplx* in, cplx* out, int sign);

}  // namespace shiftlog::detail
