#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace calibrex {

std::vector<unsigned char> read_file_bytes(const std::filesystem::path& path);
std::string read_file_text(const std::filesystem::path& path);

//! Writes to a sibling temp file and renames over `path`, so a failure never
//! leaves a partial file behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

//! Shortest text that parses back to the same double.
std::string format_double(double v);

//! Strict decimal parse of the whole field (surrounding blanks allowed).
bool parse_double(std::string_view text, double& out);

std::vector<std::string_view> split_fields(std::string_view line, char sep);

}  // namespace calibrex
