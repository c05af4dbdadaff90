#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "calibrex/predictions.hpp"

namespace calibrex {

// Binary layout, little-endian throughout:
//   "CLBX" | u16 version (=1) | u8 kind (0 logits, 1 probabilities) | u32 N | u32 K
//   then N records of K float32 scores followed by one int32 label.
inline constexpr char kLogitsMagic[4] = {'C', 'L', 'B', 'X'};
inline constexpr std::uint16_t kLogitsVersion = 1;
inline constexpr std::size_t kLogitsHeaderSize = 15;

std::vector<unsigned char> encode_logits(const PredictionSet& preds);
PredictionSet decode_logits(const std::vector<unsigned char>& bytes);

PredictionSet read_logits_file(const std::filesystem::path& path);
void write_logits_file(const PredictionSet& preds, const std::filesystem::path& path);

//! CSV with header `label,s0,...,s{K-1}`. Without an explicit kind a file is
//! flagged as probabilities exactly when every row is a distribution
//! (entries in [0,1], sum within the row tolerance).
PredictionSet read_csv_predictions(const std::filesystem::path& path,
                                   std::optional<ScoreKind> kind = std::nullopt);
PredictionSet parse_csv_predictions(const std::string& text,
                                    std::optional<ScoreKind> kind = std::nullopt);
std::string format_csv_predictions(const PredictionSet& preds);
void write_csv_predictions(const PredictionSet& preds, const std::filesystem::path& path);

}  // namespace calibrex
