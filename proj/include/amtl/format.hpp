#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace amtl {

// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

// Parse a double previously written by format_double. Throws ArgumentError
// with `context` in the message on malformed input.
double parse_double(std::string_view text, std::string_view context);

// Nanosecond timestamps serialized as seconds with exactly 9 decimal places.
// The fixed-point form is lossless for integer nanosecond clocks.
std::string format_ns_as_seconds(std::int64_t ns);

// Inverse of format_ns_as_seconds; exact integer arithmetic, no float parse.
std::int64_t parse_seconds_to_ns(std::string_view text, std::string_view context);

std::int64_t parse_int(std::string_view text, std::string_view context);
std::uint64_t parse_uint(std::string_view text, std::string_view context);

}  // namespace amtl
