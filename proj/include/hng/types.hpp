#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace hng {

// Binary attribute storage: class-specific matrices are M x L, image-specific
// ones M x N. Entries are validated to {0, 1} at the operation boundaries.
using BinaryMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

}  // namespace hng
