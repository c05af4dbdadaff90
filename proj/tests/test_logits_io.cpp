#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <random>

#include "calibrex/binning.hpp"
#include "calibrex/continuous_metrics.hpp"
#include "calibrex/error.hpp"
#include "calibrex/fileutil.hpp"
#include "calibrex/logits_io.hpp"
#include "oracles.hpp"

using namespace calibrex;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "calibrex_test_logits_io";
  fs::create_directories(dir);
  return dir / name;
}

Error error_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected an Error");
  return Error(Errc::invalid_argument, "");
}

void put_u32(std::vector<unsigned char>& b, std::size_t at, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b[at + i] = static_cast<unsigned char>(v >> (8 * i));
}

const PredictionSet three_by_two({0.5, -1.25, 2.0, 0.0, -3.5, 0.125}, {0, 1, 1}, 2, ScoreKind::logits);

}  // namespace

TEST_CASE("header layout") {
  const auto b = encode_logits(three_by_two);
  REQUIRE(b.size() == kLogitsHeaderSize + 3 * (2 * 4 + 4));
  CHECK(std::memcmp(b.data(), "CLBX", 4) == 0);
  CHECK(b[4] == 1);
  CHECK(b[5] == 0);
  CHECK(b[6] == 0);
  CHECK(b[7] == 3);
  CHECK(b[11] == 2);
  // First score 0.5f = 0x3F000000, little-endian.
  CHECK(b[15] == 0x00);
  CHECK(b[18] == 0x3F);
}

TEST_CASE("write then read a 3x2 set") {
  const auto path = scratch("three.clbx");
  write_logits_file(three_by_two, path);
  CHECK(read_logits_file(path) == three_by_two);
}

TEST_CASE("binary round trip is bit exact for float payloads") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = gen::random_logits(rng, 1 + trial * 7, 2 + trial % 5, 10.0);
    const auto q = decode_logits(encode_logits(p));
    CHECK(q == p);
    CHECK(encode_logits(q) == encode_logits(p));
  }
  const auto probs = gen::random_probabilities(rng, 10, 4);
  std::vector<double> narrowed;
  for (double v : probs.scores()) narrowed.push_back(static_cast<float>(v));
  const PredictionSet f(narrowed, {probs.labels().begin(), probs.labels().end()}, 4, ScoreKind::probabilities);
  CHECK(decode_logits(encode_logits(f)) == f);
}

TEST_CASE("truncated body is reported") {
  auto b = encode_logits(three_by_two);
  put_u32(b, 7, 4);
  CHECK(error_of([&] { (void)decode_logits(b); }).code() == Errc::truncated);
  CHECK(error_of([] { (void)decode_logits({'C', 'L', 'B', 'X', 1}); }).code() == Errc::truncated);
}

TEST_CASE("bad magic, version, flag and trailing bytes are distinct errors") {
  auto b = encode_logits(three_by_two);
  auto magic = b;
  magic[0] = 'X';
  CHECK(error_of([&] { (void)decode_logits(magic); }).code() == Errc::bad_magic);
  auto version = b;
  version[4] = 2;
  CHECK(error_of([&] { (void)decode_logits(version); }).code() == Errc::unsupported_version);
  auto flag = b;
  flag[6] = 7;
  CHECK(error_of([&] { (void)decode_logits(flag); }).code() == Errc::schema);
  auto trailing = b;
  trailing.push_back(0);
  CHECK(error_of([&] { (void)decode_logits(trailing); }).code() == Errc::schema);
}

TEST_CASE("label equal to K names the row") {
  auto b = encode_logits(three_by_two);
  put_u32(b, kLogitsHeaderSize + 2 * 12 + 8, 2);
  const Error e = error_of([&] { (void)decode_logits(b); });
  CHECK(e.code() == Errc::label_out_of_range);
  CHECK(std::string(e.what()).find("row 2") != std::string::npos);
}

TEST_CASE("missing file is an io error naming the path") {
  const Error e = error_of([] { (void)read_logits_file("/nonexistent/dir/x.clbx"); });
  CHECK(e.code() == Errc::io);
  CHECK(std::string(e.what()).find("/nonexistent/dir/x.clbx") != std::string::npos);
}

TEST_CASE("CSV rows summing to one are flagged as probabilities") {
  const auto p = parse_csv_predictions("label,s0,s1\n0,0.25,0.75\n1,0.5,0.5\n");
  CHECK(p.is_probabilities());
  CHECK(p.n_samples() == 2);
  CHECK(p.label(1) == 1);
  CHECK_FALSE(parse_csv_predictions("label,s0,s1\n0,2.0,-1\n").is_probabilities());
  CHECK_FALSE(parse_csv_predictions("label,s0,s1\n0,0.25,0.75\n", ScoreKind::logits).is_probabilities());
}

TEST_CASE("CSV ragged row reports its line") {
  const Error e = error_of([] { (void)parse_csv_predictions("label,s0,s1,s2\n0,1,2,3\n1,1,2\n"); });
  CHECK(e.code() == Errc::ragged_row);
  CHECK(std::string(e.what()).find("line 3") != std::string::npos);
}

TEST_CASE("CSV non-numeric cell and bad header") {
  CHECK(error_of([] { (void)parse_csv_predictions("label,s0,s1\n0,abc,1\n"); }).code() == Errc::non_numeric);
  CHECK(error_of([] { (void)parse_csv_predictions("y,a,b\n0,1,1\n"); }).code() == Errc::schema);
  CHECK(error_of([] { (void)parse_csv_predictions("label,s0,s1\n5,1,1\n"); }).code() == Errc::label_out_of_range);
}

TEST_CASE("CSV emitted from a binary file agrees on metrics") {
  std::mt19937_64 rng(4);
  const auto p = decode_logits(encode_logits(gen::random_logits(rng, 300, 5)));
  const auto path = scratch("from_bin.csv");
  write_csv_predictions(p, path);
  const auto q = read_csv_predictions(path, ScoreKind::logits);
  CHECK(q == p);
  CHECK(std::abs(ece(q, 15) - ece(p, 15)) < 1e-6);
  CHECK(std::abs(nll(q) - nll(p)) < 1e-6);
  CHECK(std::abs(brier(q) - brier(p)) < 1e-6);
}

TEST_CASE("atomic writes leave no temporary behind") {
  const auto path = scratch("atomic.txt");
  write_file_atomic(path, "hello\n");
  CHECK(read_file_text(path) == "hello\n");
  for (const auto& entry : fs::directory_iterator(path.parent_path())) {
    CHECK(entry.path().filename().string().find(".tmp.") == std::string::npos);
  }
  CHECK(error_of([] { write_file_atomic("/nonexistent/dir/out.txt", "x"); }).code() == Errc::io);
}
