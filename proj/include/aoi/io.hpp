#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace aoi {

/// Shortest round-trip decimal form (what the JSON mirrors use as well),
/// so CSV and JSON agree byte-for-byte on every value.
std::string format_double(double v);

std::uint64_t fnv1a64(std::string_view text);
std::string hex64(std::uint64_t v);

/// Write-then-rename so partially written files never appear under out dirs.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace aoi
