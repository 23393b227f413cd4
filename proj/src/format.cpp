#include "amtl/format.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <cstdlib>

#include "amtl/errors.hpp"

namespace amtl {

namespace {

[[noreturn]] void bad_field(std::string_view text, std::string_view context) {
  throw ArgumentError("cannot parse '" + std::string(text) + "' in " +
                      std::string(context));
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf;
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view text, std::string_view context) {
  double v = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    bad_field(text, context);
  }
  return v;
}

std::string format_ns_as_seconds(std::int64_t ns) {
  const bool neg = ns < 0;
  const std::uint64_t mag = neg ? static_cast<std::uint64_t>(-(ns + 1)) + 1
                                : static_cast<std::uint64_t>(ns);
  std::array<char, 48> buf;
  const int len = std::snprintf(buf.data(), buf.size(), "%s%llu.%09llu",
                                neg ? "-" : "",
                                static_cast<unsigned long long>(mag / 1000000000ULL),
                                static_cast<unsigned long long>(mag % 1000000000ULL));
  return std::string(buf.data(), static_cast<std::size_t>(len));
}

std::int64_t parse_seconds_to_ns(std::string_view text, std::string_view context) {
  bool neg = false;
  std::string_view rest = text;
  if (!rest.empty() && rest.front() == '-') {
    neg = true;
    rest.remove_prefix(1);
  }
  const auto dot = rest.find('.');
  std::string_view whole = rest.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? "" : rest.substr(dot + 1);
  if (whole.empty() || frac.size() > 9) bad_field(text, context);
  std::uint64_t sec = 0;
  auto res = std::from_chars(whole.data(), whole.data() + whole.size(), sec);
  if (res.ec != std::errc() || res.ptr != whole.data() + whole.size()) {
    bad_field(text, context);
  }
  std::uint64_t nanos = 0;
  if (!frac.empty()) {
    auto fres = std::from_chars(frac.data(), frac.data() + frac.size(), nanos);
    if (fres.ec != std::errc() || fres.ptr != frac.data() + frac.size()) {
      bad_field(text, context);
    }
    for (std::size_t i = frac.size(); i < 9; ++i) nanos *= 10;
  }
  const std::int64_t mag = static_cast<std::int64_t>(sec * 1000000000ULL + nanos);
  return neg ? -mag : mag;
}

std::int64_t parse_int(std::string_view text, std::string_view context) {
  std::int64_t v = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    bad_field(text, context);
  }
  return v;
}

std::uint64_t parse_uint(std::string_view text, std::string_view context) {
  std::uint64_t v = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    bad_field(text, context);
  }
  return v;
}

}  // namespace amtl
