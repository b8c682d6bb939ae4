#pragma once

#include "textrap/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>

namespace textrap {

/// TNS3 layout, all little-endian:
///   "TNS3" | u32 version = 1 | u64 n1 | u64 n2 | u64 n3 | n1*n2*n3 f64
/// TNS4 layout:
///   "TNS4" | u32 version = 1 | u64 count | u64 n1 | u64 n2 | u64 n3 | count*n1*n2*n3 f64
inline constexpr std::uint32_t tns_format_version = 1;
inline constexpr std::size_t tns3_header_bytes = 32;
inline constexpr std::size_t tns4_header_bytes = 40;

/// Refuses headers announcing more than this many entries.
inline constexpr std::uint64_t tns_max_entries = std::uint64_t{1} << 32;

void write_tns3(const Tensor3& t, std::ostream& out);
void write_tns3(const Tensor3& t, const std::filesystem::path& path);
[[nodiscard]] Tensor3 read_tns3(std::istream& in);
[[nodiscard]] Tensor3 read_tns3(const std::filesystem::path& path);

void write_tns4(const Stack4& s, std::ostream& out);
void write_tns4(const Stack4& s, const std::filesystem::path& path);
[[nodiscard]] Stack4 read_tns4(std::istream& in);
[[nodiscard]] Stack4 read_tns4(const std::filesystem::path& path);

}  // namespace textrap
