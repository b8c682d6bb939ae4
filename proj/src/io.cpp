#include "textrap/io.hpp"

#include "textrap/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

namespace textrap {

namespace {

template <typename U>
void put_le(std::ostream& out, U value) {
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xffu);
  out.write(bytes.data(), bytes.size());
}

template <typename U>
U get_le(std::istream& in, const char* what) {
  std::array<unsigned char, sizeof(U)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
    throw TruncatedPayloadError(std::string("truncated header while reading ") + what);
  }
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
  return value;
}

void put_payload(std::ostream& out, std::span<const double> data) {
  for (double v : data) put_le(out, std::bit_cast<std::uint64_t>(v));
}

void get_payload(std::istream& in, std::span<double> data) {
  std::vector<unsigned char> raw(data.size() * 8);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw TruncatedPayloadError("payload ends after " + std::to_string(in.gcount()) + " of " +
                                std::to_string(raw.size()) + " bytes");
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::uint64_t bits = 0;
    for (std::size_t b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(raw[i * 8 + b]) << (8 * b);
    data[i] = std::bit_cast<double>(bits);
  }
}

void expect_magic(std::istream& in, const char (&magic)[5]) {
  std::array<char, 4> got{};
  in.read(got.data(), got.size());
  if (in.gcount() != 4) throw TruncatedPayloadError("file too short for magic bytes");
  if (std::memcmp(got.data(), magic, 4) != 0) {
    throw BadMagicError(std::string("expected magic ") + magic + ", found \"" + std::string(got.data(), 4) + "\"");
  }
  const auto version = get_le<std::uint32_t>(in, "version");
  if (version != tns_format_version) {
    throw UnsupportedVersionError("unsupported format version " + std::to_string(version));
  }
}

Dims read_dims(std::istream& in, std::uint64_t multiplier) {
  const auto n1 = get_le<std::uint64_t>(in, "n1");
  const auto n2 = get_le<std::uint64_t>(in, "n2");
  const auto n3 = get_le<std::uint64_t>(in, "n3");
  std::uint64_t total = multiplier;
  for (std::uint64_t n : {n1, n2, n3}) {
    if (n != 0 && total > tns_max_entries / n) {
      throw DimensionOverflowError("header dims " + std::to_string(n1) + "x" + std::to_string(n2) + "x" +
                                   std::to_string(n3) + " exceed the supported size");
    }
    total *= n;
  }
  if (total > tns_max_entries) throw DimensionOverflowError("header announces too many entries");
  return Dims{static_cast<std::size_t>(n1), static_cast<std::size_t>(n2), static_cast<std::size_t>(n3)};
}

void write_dims(std::ostream& out, Dims d) {
  put_le<std::uint64_t>(out, d.n1);
  put_le<std::uint64_t>(out, d.n2);
  put_le<std::uint64_t>(out, d.n3);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return in;
}

void finish(std::ostream& out, const std::string& what) {
  out.flush();
  if (!out) throw IoError("write failed: " + what);
}

}  // namespace

void write_tns3(const Tensor3& t, std::ostream& out) {
  out.write("TNS3", 4);
  put_le<std::uint32_t>(out, tns_format_version);
  write_dims(out, t.dims());
  put_payload(out, t.data());
  finish(out, "TNS3 stream");
}

void write_tns3(const Tensor3& t, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_tns3(t, out);
}

Tensor3 read_tns3(std::istream& in) {
  expect_magic(in, "TNS3");
  Tensor3 t(read_dims(in, 1));
  get_payload(in, t.data());
  return t;
}

Tensor3 read_tns3(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_tns3(in);
}

void write_tns4(const Stack4& s, std::ostream& out) {
  out.write("TNS4", 4);
  put_le<std::uint32_t>(out, tns_format_version);
  put_le<std::uint64_t>(out, s.count());
  write_dims(out, s.slice_dims());
  for (const auto& t : s) put_payload(out, t.data());
  finish(out, "TNS4 stream");
}

void write_tns4(const Stack4& s, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_tns4(s, out);
}

Stack4 read_tns4(std::istream& in) {
  expect_magic(in, "TNS4");
  const auto count = get_le<std::uint64_t>(in, "count");
  if (count > tns_max_entries) throw DimensionOverflowError("stack count exceeds the supported size");
  const Dims d = read_dims(in, std::max<std::uint64_t>(count, 1));
  std::vector<Tensor3> slices;
  slices.reserve(static_cast<std::size_t>(count));
  for (std::uint64_t i = 0; i < count; ++i) {
    Tensor3 t(d);
    get_payload(in, t.data());
    slices.push_back(std::move(t));
  }
  return count == 0 ? Stack4::zeros(0, d) : Stack4(std::move(slices));
}

Stack4 read_tns4(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_tns4(in);
}

}  // namespace textrap
