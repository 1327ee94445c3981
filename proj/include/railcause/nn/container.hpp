#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "railcause/nn/tensor.hpp"

namespace railcause::nn {

/// Named-tensor container file.
///
/// Layout (all integers little-endian):
///   magic "RCNT" | u32 version | u32 entry count
///   per entry: u32 name length | name bytes | u8 dtype (0 = f64) |
///              u32 rank | u64 dims[rank]
///   then every entry's data, in table order, as little-endian f64.
inline constexpr std::uint32_t kContainerVersion = 1;

using NamedTensor = std::pair<std::string, Tensor>;

void write_container(std::ostream& out, const std::vector<NamedTensor>& tensors);

/// Throws DataError on a bad magic, unsupported version or dtype, or a
/// truncated stream.
std::vector<NamedTensor> read_container(std::istream& in);

}  // namespace railcause::nn
