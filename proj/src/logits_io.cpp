#include "calibrex/logits_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "calibrex/error.hpp"
#include "calibrex/fileutil.hpp"

namespace calibrex {

namespace {

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<unsigned char>(v >> shift));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

std::vector<unsigned char> encode_logits(const PredictionSet& preds) {
  if (preds.n_samples() > std::numeric_limits<std::uint32_t>::max() ||
      preds.n_classes() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(Errc::invalid_argument, "prediction set too large for the binary format");
  }
  std::vector<unsigned char> out;
  out.reserve(kLogitsHeaderSize + preds.n_samples() * (preds.n_classes() + 1) * 4);
  out.insert(out.end(), std::begin(kLogitsMagic), std::end(kLogitsMagic));
  put_u16(out, kLogitsVersion);
  out.push_back(static_cast<unsigned char>(preds.kind()));
  put_u32(out, static_cast<std::uint32_t>(preds.n_samples()));
  put_u32(out, static_cast<std::uint32_t>(preds.n_classes()));
  for (std::size_t i = 0; i < preds.n_samples(); ++i) {
    for (double s : preds.row(i)) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(s)));
    put_u32(out, static_cast<std::uint32_t>(preds.label(i)));
  }
  return out;
}

PredictionSet decode_logits(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kLogitsMagic, 4) != 0) {
    throw Error(Errc::bad_magic, "not a CLBX logits file (magic mismatch)");
  }
  if (bytes.size() < kLogitsHeaderSize) {
    throw Error(Errc::truncated, "header truncated: " + std::to_string(bytes.size()) + " bytes");
  }
  const auto version = static_cast<std::uint16_t>(bytes[4] | (bytes[5] << 8));
  if (version != kLogitsVersion) {
    throw Error(Errc::unsupported_version, "unsupported CLBX version " + std::to_string(version));
  }
  const unsigned char flag = bytes[6];
  if (flag > 1) throw Error(Errc::schema, "unknown score-kind flag " + std::to_string(flag));
  const std::uint64_t n = get_u32(&bytes[7]);
  const std::uint64_t k = get_u32(&bytes[11]);
  const std::uint64_t record = (k + 1) * 4;
  const std::uint64_t body = bytes.size() - kLogitsHeaderSize;
  if (body < n * record) {
    throw Error(Errc::truncated, "body truncated: header declares " + std::to_string(n) +
                                     " rows, body holds " + std::to_string(body / record));
  }
  if (body > n * record) {
    throw Error(Errc::schema, "trailing bytes after " + std::to_string(n) + " declared rows");
  }

  std::vector<double> scores;
  std::vector<std::int32_t> labels;
  scores.reserve(n * k);
  labels.reserve(n);
  const unsigned char* p = bytes.data() + kLogitsHeaderSize;
  for (std::uint64_t i = 0; i < n; ++i) {
    for (std::uint64_t c = 0; c < k; ++c, p += 4) {
      scores.push_back(static_cast<double>(std::bit_cast<float>(get_u32(p))));
    }
    const auto label = static_cast<std::int32_t>(get_u32(p));
    p += 4;
    if (label < 0 || static_cast<std::uint64_t>(label) >= k) {
      throw Error(Errc::label_out_of_range, "row " + std::to_string(i) + ": label " +
                                                std::to_string(label) + " outside [0, " +
                                                std::to_string(k) + ")");
    }
    labels.push_back(label);
  }
  return {std::move(scores), std::move(labels), static_cast<std::size_t>(k),
          static_cast<ScoreKind>(flag)};
}

PredictionSet read_logits_file(const std::filesystem::path& path) {
  return decode_logits(read_file_bytes(path));
}

void write_logits_file(const PredictionSet& preds, const std::filesystem::path& path) {
  const auto bytes = encode_logits(preds);
  write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

PredictionSet parse_csv_predictions(const std::string& text, std::optional<ScoreKind> kind) {
  std::vector<std::string_view> lines;
  {
    std::string_view rest(text);
    while (!rest.empty()) {
      const std::size_t nl = rest.find('\n');
      std::string_view line = rest.substr(0, nl);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.push_back(line);
      if (nl == std::string_view::npos) break;
      rest.remove_prefix(nl + 1);
    }
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw Error(Errc::schema, "line 1: missing CSV header");

  const auto header = split_fields(lines[0], ',');
  if (header.size() < 3 || header[0] != "label") {
    throw Error(Errc::schema, "line 1: header must be label,s0,...,s{K-1}");
  }
  const std::size_t k = header.size() - 1;
  for (std::size_t c = 0; c < k; ++c) {
    if (header[c + 1] != "s" + std::to_string(c)) {
      throw Error(Errc::schema, "line 1: expected column s" + std::to_string(c));
    }
  }

  std::vector<double> scores;
  std::vector<std::int32_t> labels;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::string line_no = std::to_string(li + 1);
    const auto fields = split_fields(lines[li], ',');
    if (fields.size() != k + 1) {
      throw Error(Errc::ragged_row, "line " + line_no + ": expected " + std::to_string(k + 1) +
                                        " cells, found " + std::to_string(fields.size()));
    }
    double label = 0.0;
    if (!parse_double(fields[0], label) || label != std::floor(label)) {
      throw Error(Errc::non_numeric, "line " + line_no + ": label is not an integer");
    }
    if (label < 0 || label >= static_cast<double>(k)) {
      throw Error(Errc::label_out_of_range, "line " + line_no + " (row " + std::to_string(li - 1) +
                                                "): label outside [0, " + std::to_string(k) + ")");
    }
    labels.push_back(static_cast<std::int32_t>(label));
    for (std::size_t c = 0; c < k; ++c) {
      double v = 0.0;
      if (!parse_double(fields[c + 1], v)) {
        throw Error(Errc::non_numeric, "line " + line_no + ": cell s" + std::to_string(c) +
                                           " is not a number");
      }
      scores.push_back(v);
    }
  }
  if (labels.empty()) throw Error(Errc::schema, "CSV holds no data rows");

  if (!kind) {
    const double tol = probability_row_tolerance(k);
    bool rows_are_distributions = true;
    for (std::size_t i = 0; i < labels.size() && rows_are_distributions; ++i) {
      double sum = 0.0;
      for (std::size_t c = 0; c < k; ++c) {
        const double p = scores[i * k + c];
        if (p < 0.0 || p > 1.0) rows_are_distributions = false;
        sum += p;
      }
      if (std::abs(sum - 1.0) > tol) rows_are_distributions = false;
    }
    kind = rows_are_distributions ? ScoreKind::probabilities : ScoreKind::logits;
  }
  return {std::move(scores), std::move(labels), k, *kind};
}

PredictionSet read_csv_predictions(const std::filesystem::path& path, std::optional<ScoreKind> kind) {
  return parse_csv_predictions(read_file_text(path), kind);
}

std::string format_csv_predictions(const PredictionSet& preds) {
  std::string out = "label";
  for (std::size_t c = 0; c < preds.n_classes(); ++c) out += ",s" + std::to_string(c);
  out += '\n';
  for (std::size_t i = 0; i < preds.n_samples(); ++i) {
    out += std::to_string(preds.label(i));
    for (double s : preds.row(i)) {
      out += ',';
      out += format_double(s);
    }
    out += '\n';
  }
  return out;
}

void write_csv_predictions(const PredictionSet& preds, const std::filesystem::path& path) {
  write_file_atomic(path, format_csv_predictions(preds));
}

}  // namespace calibrex
