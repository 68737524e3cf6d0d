#include "phaseless/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

namespace phaseless::io {

void ByteReader::need(std::size_t n) const {
  if (pos_ + n > bytes_.size()) {
    std::ostringstream os;
    os << "truncated data at byte " << pos_ << " (need " << n << ", have "
       << bytes_.size() - pos_ << ")";
    fail(os.str());
  }
}

void ByteReader::fail(std::string const& what) const { throw IoError(source_ + ": " + what); }

void ByteReader::expect_magic(std::string_view tag) {
  need(tag.size());
  std::string_view const got(bytes_.data() + pos_, tag.size());
  if (got != tag) {
    fail("bad magic '" + std::string(got) + "', expected '" + std::string(tag) + "'");
  }
  pos_ += tag.size();
}

std::vector<double> ByteReader::f64s(std::size_t n) {
  need(n * 8);
  std::vector<double> out(n);
  for (auto& v : out) v = f64();
  return out;
}

std::vector<char> read_file(std::filesystem::path const& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(std::filesystem::path const& path, std::span<char const> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

void write_text(std::filesystem::path const& path, std::string const& text) {
  write_file(path, std::span<char const>(text.data(), text.size()));
}

std::string read_text(std::filesystem::path const& path) {
  auto bytes = read_file(path);
  return {bytes.begin(), bytes.end()};
}

std::string sha256_hex(std::span<char const> bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr);
  std::string hex;
  hex.reserve(2 * len);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string sha256_file(std::filesystem::path const& path) {
  auto const bytes = read_file(path);
  return sha256_hex(bytes);
}

std::filesystem::path sidecar_path(std::filesystem::path const& path) {
  auto p = path;
  p += ".json";
  return p;
}

std::string_view tool_version() { return "phaseless 0.1.0"; }

}  // namespace phaseless::io
