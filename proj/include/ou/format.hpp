#pragma once

#include <string>
#include <string_view>

namespace ou {

// Tool version embedded in every emitted report.
const char* version() noexcept;

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

// FNV-1a 64-bit hash as 16 hex characters; used for config hashes.
std::string fnv1a_hex(std::string_view s) noexcept;

}  // namespace ou
