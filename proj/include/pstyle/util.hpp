#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pstyle {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Fixed-point text with the given number of decimals.
std::string format_fixed(double value, int decimals);

std::string read_file(const std::string& path);

/// Writes a new file; throws DataError if the file already exists unless overwrite is set.
void write_file(const std::string& path, std::string_view contents, bool overwrite = false);

/// SplitMix64 step, used to derive independent seeds from a master seed.
std::uint64_t mix_seed(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

/// FNV-1a 64-bit hash rendered as 16 hex digits.
std::string fingerprint(std::string_view text);

}  // namespace pstyle
