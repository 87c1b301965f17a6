#pragma once

/**
 * @file dump.hpp
 *
 * @brief Self-describing binary dumps of grid fields.
 *
 * Layout (all integers and floats little-endian):
 *
 *   offset  size  content
 *   0       8     magic "MMELAS1\0"
 *   8       4     u32 name length N
 *   12      N     name bytes
 *   12+N    1     u8 rank (0 scalar, 1 vector, 2 tensor)
 *   13+N    1     u8 flavor (0 spectral, 1 central)
 *   14+N    8     u64 n
 *   22+N    8     f64 L
 *   30+N    8     u64 step
 *   38+N    8     u64 payload length in bytes = 3^rank * n^3 * 8
 *   46+N    ...   payload, f64 values, component outermost, x1 fastest
 *
 * Tensor components are ordered 3*i + a (row i, column a).
 */

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmelas/grid.hpp"

namespace mmelas {

inline constexpr char dump_magic[8] = {'M', 'M', 'E', 'L', 'A', 'S', '1', '\0'};

class DumpError : public std::runtime_error {
 public:
  enum class Kind { io, magic, truncated, shape };
  DumpError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  [[nodiscard]] Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct DumpHeader {
  std::string name;
  int rank = 0;
  std::size_t n = 0;
  double length = 1.0;
  Flavor flavor = Flavor::spectral;
  std::uint64_t step = 0;
  std::uint64_t payload_bytes = 0;

  [[nodiscard]] std::size_t components() const { return rank == 0 ? 1 : (rank == 1 ? 3 : 9); }
  [[nodiscard]] GridSpec grid() const { return {n, length, flavor}; }
};

struct RawDump {
  DumpHeader header;
  std::vector<double> values;
};

namespace detail {

template <class T>
void put_le(std::vector<unsigned char>& out, T x) {
  auto bits = std::bit_cast<std::array<unsigned char, sizeof(T)>>(x);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  out.insert(out.end(), bits.begin(), bits.end());
}

class ByteReader {
 public:
  explicit ByteReader(std::span<const unsigned char> bytes) : bytes_(bytes) {}

  template <class T>
  T get(const char* what) {
    if (pos_ + sizeof(T) > bytes_.size())
      throw DumpError(DumpError::Kind::truncated, std::string("dump truncated while reading ") + what);
    std::array<unsigned char, sizeof(T)> bits;
    std::memcpy(bits.data(), bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
    pos_ += sizeof(T);
    return std::bit_cast<T>(bits);
  }

  std::span<const unsigned char> take(std::size_t count, const char* what) {
    if (pos_ + count > bytes_.size() || pos_ + count < pos_)
      throw DumpError(DumpError::Kind::truncated, std::string("dump truncated while reading ") + what);
    auto s = bytes_.subspan(pos_, count);
    pos_ += count;
    return s;
  }

  [[nodiscard]] std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const unsigned char> bytes_;
  std::size_t pos_ = 0;
};

inline int rank_of(std::size_t components) {
  switch (components) {
    case 1: return 0;
    case 3: return 1;
    case 9: return 2;
  }
  throw ShapeError("dumpable fields have 1, 3 or 9 components");
}

}  // namespace detail

inline std::vector<unsigned char> encode_dump(const DumpHeader& meta, std::span<const double> values) {
  const std::size_t cells = meta.n * meta.n * meta.n;
  if (values.size() != meta.components() * cells)
    throw DumpError(DumpError::Kind::shape, "value count " + std::to_string(values.size()) +
                                                " does not match rank " + std::to_string(meta.rank) +
                                                " on an n=" + std::to_string(meta.n) + " grid");
  std::vector<unsigned char> out(dump_magic, dump_magic + 8);
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(meta.name.size()));
  out.insert(out.end(), meta.name.begin(), meta.name.end());
  out.push_back(static_cast<unsigned char>(meta.rank));
  out.push_back(meta.flavor == Flavor::spectral ? 0 : 1);
  detail::put_le<std::uint64_t>(out, meta.n);
  detail::put_le<double>(out, meta.length);
  detail::put_le<std::uint64_t>(out, meta.step);
  detail::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(values.size() * sizeof(double)));
  out.reserve(out.size() + values.size() * sizeof(double));
  for (double x : values) detail::put_le<double>(out, x);
  return out;
}

template <std::size_t N>
std::vector<unsigned char> write_dump(const Field<N>& field, const std::string& name, std::uint64_t step) {
  const GridSpec& g = field.grid()->spec();
  DumpHeader h{name, detail::rank_of(N), g.n, g.length, g.flavor, step, 0};
  return encode_dump(h, field.values());
}

inline RawDump read_dump(std::span<const unsigned char> bytes) {
  detail::ByteReader in(bytes);
  const auto magic = in.take(8, "magic");
  if (std::memcmp(magic.data(), dump_magic, 8) != 0)
    throw DumpError(DumpError::Kind::magic, "not a field dump (magic mismatch)");
  RawDump d;
  const auto name_len = in.get<std::uint32_t>("name length");
  const auto name = in.take(name_len, "name");
  d.header.name.assign(name.begin(), name.end());
  const auto rank = in.get<std::uint8_t>("rank");
  const auto flavor = in.get<std::uint8_t>("flavor");
  if (rank > 2) throw DumpError(DumpError::Kind::shape, "rank " + std::to_string(rank) + " is not 0, 1 or 2");
  if (flavor > 1) throw DumpError(DumpError::Kind::shape, "unknown flavor tag " + std::to_string(flavor));
  d.header.rank = rank;
  d.header.flavor = flavor == 0 ? Flavor::spectral : Flavor::central;
  d.header.n = static_cast<std::size_t>(in.get<std::uint64_t>("n"));
  d.header.length = in.get<double>("L");
  d.header.step = in.get<std::uint64_t>("step");
  d.header.payload_bytes = in.get<std::uint64_t>("payload length");

  const std::size_t n = d.header.n;
  if (n == 0 || n > (1u << 12)) throw DumpError(DumpError::Kind::shape, "implausible grid size n=" + std::to_string(n));
  const std::uint64_t expected = static_cast<std::uint64_t>(d.header.components()) * n * n * n * sizeof(double);
  if (d.header.payload_bytes != expected)
    throw DumpError(DumpError::Kind::shape, "payload length " + std::to_string(d.header.payload_bytes) +
                                                " does not match rank " + std::to_string(rank) + ", n=" +
                                                std::to_string(n) + " (expected " + std::to_string(expected) + ")");
  if (in.remaining() < expected)
    throw DumpError(DumpError::Kind::truncated, "payload truncated: " + std::to_string(in.remaining()) + " of " +
                                                    std::to_string(expected) + " bytes");
  if (in.remaining() > expected)
    throw DumpError(DumpError::Kind::shape, "trailing bytes after payload");
  d.values.resize(expected / sizeof(double));
  for (auto& x : d.values) x = in.get<double>("payload");
  return d;
}

/// Converts a decoded dump to a field on `grid` (or on a grid built from the header when null).
template <std::size_t N>
Field<N> dump_to_field(const RawDump& d, GridPtr grid = nullptr) {
  if (d.header.components() != N)
    throw DumpError(DumpError::Kind::shape, "dump '" + d.header.name + "' has rank " + std::to_string(d.header.rank) +
                                                ", expected rank " + std::to_string(detail::rank_of(N)));
  if (!grid) grid = Grid::make(d.header.grid());
  if (!(grid->spec() == d.header.grid()))
    throw DumpError(DumpError::Kind::shape, "dump '" + d.header.name + "' grid does not match");
  Field<N> f(grid);
  std::copy(d.values.begin(), d.values.end(), f.values().begin());
  return f;
}

inline void write_file(const std::filesystem::path& path, std::span<const unsigned char> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DumpError(DumpError::Kind::io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DumpError(DumpError::Kind::io, "write failed: " + path.string());
}

inline std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DumpError(DumpError::Kind::io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

template <std::size_t N>
void save_dump(const std::filesystem::path& path, const Field<N>& field, const std::string& name,
               std::uint64_t step) {
  write_file(path, write_dump(field, name, step));
}

inline RawDump load_dump(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  try {
    return read_dump(bytes);
  } catch (const DumpError& e) {
    throw DumpError(e.kind(), path.string() + ": " + e.what());
  }
}

/// Canonical file name of a per-step dump, e.g. "F_000003.mmd".
inline std::string dump_file_name(const std::string& field, std::uint64_t step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%06llu.mmd", static_cast<unsigned long long>(step));
  return field + buf;
}

}  // namespace mmelas
