#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phaseless/error.hpp"

namespace phaseless::io {

/// Little-endian byte sink.
class ByteWriter {
 public:
  void magic(std::string_view tag) { bytes_.insert(bytes_.end(), tag.begin(), tag.end()); }
  void u32(std::uint32_t v) { put(v); }
  void u64(std::uint64_t v) { put(v); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
  void f64s(std::span<double const> vs) {
    for (double v : vs) f64(v);
  }
  std::vector<char> const& bytes() const { return bytes_; }
  std::size_t size() const { return bytes_.size(); }

 private:
  template <class U>
  void put(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
    }
  }
  std::vector<char> bytes_;
};

/// Little-endian byte source with bounds checks; errors name the source.
class ByteReader {
 public:
  ByteReader(std::span<char const> bytes, std::string source)
      : bytes_(bytes), source_(std::move(source)) {}

  void expect_magic(std::string_view tag);
  std::uint32_t u32() { return get<std::uint32_t>(); }
  std::uint64_t u64() { return get<std::uint64_t>(); }
  double f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
  std::vector<double> f64s(std::size_t n);
  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t position() const { return pos_; }
  std::string const& source() const { return source_; }
  [[noreturn]] void fail(std::string const& what) const;

 private:
  template <class U>
  U get() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      v |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(U);
    return v;
  }
  void need(std::size_t n) const;

  std::span<char const> bytes_;
  std::string source_;
  std::size_t pos_{0};
};

std::vector<char> read_file(std::filesystem::path const& path);
void write_file(std::filesystem::path const& path, std::span<char const> bytes);
void write_text(std::filesystem::path const& path, std::string const& text);
std::string read_text(std::filesystem::path const& path);

/// Hex SHA-256 digest.
std::string sha256_hex(std::span<char const> bytes);
std::string sha256_file(std::filesystem::path const& path);

/// Sidecar path: "<file>.json".
std::filesystem::path sidecar_path(std::filesystem::path const& path);

/// Version string recorded in provenance sidecars.
std::string_view tool_version();

}  // namespace phaseless::io
