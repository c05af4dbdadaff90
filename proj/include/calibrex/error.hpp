#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace calibrex {

enum class Errc {
  invalid_argument,
  io,
  bad_magic,
  unsupported_version,
  truncated,
  label_out_of_range,
  ragged_row,
  non_numeric,
  schema,
  non_finite,
  degenerate,
  exhausted,
};

std::string_view errc_name(Errc code) noexcept;

//! Every failure surfaced by the library carries one of the codes above so
//! the CLI can print a machine-parsable diagnostic.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace calibrex
