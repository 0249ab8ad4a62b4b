#pragma once

#include <cstdint>
#include <vector>

namespace gbkmv {

using ElementId = std::uint32_t;

// A record is a strictly increasing, duplicate-free list of element ids.
using Record = std::vector<ElementId>;

} // namespace gbkmv
