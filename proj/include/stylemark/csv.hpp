#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace stylemark::csv {

using Row = std::vector<std::string>;

/// Parses RFC 4180 style comma-separated text. Lines starting with '#' outside
/// quotes are comments and skipped; blank lines are skipped.
std::vector<Row> parse(std::string_view text);

std::string escape(std::string_view field);
std::string join(const Row& fields);

/// Provenance line written at the top of every output file.
struct Header {
  std::uint64_t seed = 0;
  std::string config_digest;
};

void write_header(std::ostream& os, const Header& header);

/// 64-bit FNV-1a, hex encoded. Stable across platforms.
std::string fnv1a_hex(std::string_view bytes);
std::uint64_t fnv1a(std::string_view bytes);

/// Formats a double with enough digits to round-trip.
std::string format_real(double value);

}  // namespace stylemark::csv
