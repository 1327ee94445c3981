#include "railcause/nn/container.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>

#include "railcause/errors.hpp"

namespace railcause::nn {
namespace {

constexpr std::array<char, 4> kMagic{'R', 'C', 'N', 'T'};
constexpr std::uint8_t kDtypeF64 = 0;

template <class T>
void put(std::ostream& out, T value) {
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) {
    throw DataError("tensor container: unexpected end of stream");
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

void write_container(std::ostream& out, const std::vector<NamedTensor>& tensors) {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kContainerVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [name, t] : tensors) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put<std::uint8_t>(out, kDtypeF64);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape()) put<std::uint64_t>(out, d);
  }
  for (const auto& entry : tensors) {
    for (double v : entry.second.values()) put<double>(out, v);
  }
}

std::vector<NamedTensor> read_container(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw DataError("tensor container: bad magic");
  }
  const auto version = get<std::uint32_t>(in);
  if (version != kContainerVersion) {
    throw DataError("tensor container: unsupported version " + std::to_string(version));
  }
  const auto count = get<std::uint32_t>(in);
  std::vector<std::pair<std::string, Shape>> table;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = get<std::uint32_t>(in);
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) throw DataError("tensor container: truncated name");
    if (get<std::uint8_t>(in) != kDtypeF64) {
      throw DataError("tensor container: unsupported dtype for '" + name + "'");
    }
    const auto rank = get<std::uint32_t>(in);
    Shape shape;
    for (std::uint32_t d = 0; d < rank; ++d) {
      shape.push_back(static_cast<std::size_t>(get<std::uint64_t>(in)));
    }
    table.emplace_back(std::move(name), std::move(shape));
  }
  std::vector<NamedTensor> out;
  for (auto& [name, shape] : table) {
    Tensor t(shape);
    for (double& v : t.values()) v = get<double>(in);
    out.emplace_back(std::move(name), std::move(t));
  }
  return out;
}

}  // namespace railcause::nn
