#pragma once

#include "bf/kernels.hpp"

namespace bf::kernels::detail {

// Defined in avx2.cpp, which is compiled with -mavx2. Callers must check
// CPU support before dereferencing anything in the returned table.
const KernelTable& avx2_table_unchecked() noexcept;

}  // namespace bf::kernels::detail
