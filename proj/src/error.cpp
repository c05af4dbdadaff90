#include "calibrex/error.hpp"

namespace calibrex {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::io: return "io";
    case Errc::bad_magic: return "bad_magic";
    case Errc::unsupported_version: return "unsupported_version";
    case Errc::truncated: return "truncated";
    case Errc::label_out_of_range: return "label_out_of_range";
    case Errc::ragged_row: return "ragged_row";
    case Errc::non_numeric: return "non_numeric";
    case Errc::schema: return "schema";
    case Errc::non_finite: return "non_finite";
    case Errc::degenerate: return "degenerate";
    case Errc::exhausted: return "exhausted";
  }
  return "unknown";
}

}  // namespace calibrex
