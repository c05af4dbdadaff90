// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "calibrex/analysis.hpp"
#include "calibrex/arch.hpp"
#include "calibrex/benchmark.hpp"
#include "calibrex/binning.hpp"
#include "calibrex/continuous_metrics.hpp"
#include "calibrex/error.hpp"
#include "calibrex/logits_io.hpp"
#include "calibrex/predictions.hpp"
#include "calibrex/search.hpp"
#include "calibrex/suite.hpp"
#include "calibrex/temperature.hpp"
#include "oracles.hpp"

using namespace calibrex;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Failures {
 public:
  void note(bool ok, const std::string& what) {
    if (ok) return;
    ++count_;
    if (first_.empty()) first_ = what;
  }
  [[nodiscard]] std::size_t count() const { return count_; }
  [[nodiscard]] Outcome outcome(const std::string& summary) const {
    if (count_ == 0) return {true, summary};
    return {false, summary + "; " + std::to_string(count_) + " failure(s), first: " + first_};
  }

 private:
  std::size_t count_ = 0;
  std::string first_;
};

std::string fmt(long double v) {
  std::ostringstream s;
  s.precision(17);
  s << static_cast<double>(v);
  return s.str();
}

std::vector<long double> as_ld(const std::vector<double>& v) { return {v.begin(), v.end()}; }
std::vector<int> as_int(const std::vector<std::uint8_t>& v) { return {v.begin(), v.end()}; }

// ---------------------------------------------------------------------------

Outcome hcs_table() {
  struct Row {
    double acc, ece, h1, h2, h3;
  };
  const Row rows[] = {
      {93.91, 4.20, 94.84, 95.16, 95.32}, {94.01, 4.25, 94.87, 95.16, 95.31},
      {93.52, 4.15, 94.67, 95.06, 95.26}, {93.94, 4.17, 94.88, 95.19, 95.35},
      {93.98, 4.09, 94.94, 95.26, 95.42}, {93.59, 4.21, 94.68, 95.05, 95.23},
      {93.80, 4.14, 94.82, 95.17, 95.34}, {93.73, 4.05, 94.83, 95.20, 95.39},
      {93.06, 4.12, 94.45, 94.92, 95.16}, {93.62, 3.90, 94.84, 95.26, 95.47},
      {93.57, 3.91, 94.81, 95.24, 95.45}, {93.55, 4.23, 94.65, 95.02, 95.21},
  };
  Failures f;
  double worst = 0;
  for (const auto& r : rows) {
    const double want[] = {r.h1, r.h2, r.h3};
    for (int b = 1; b <= 3; ++b) {
      const double got = 100.0 * hcs(r.acc / 100.0, r.ece / 100.0, {static_cast<double>(b)});
      const double err = std::fabs(got - want[b - 1]);
      worst = std::max(worst, err);
      f.note(err <= 0.01 + 1e-9, "(" + fmt(r.acc) + ", " + fmt(r.ece) + ") beta " + std::to_string(b) + " gave " +
                                     fmt(got));
    }
  }
  return f.outcome("12 rows x 3 betas, max |err| " + fmt(worst));
}

Outcome suite_cardinality() {
  std::mt19937_64 rng(11);
  const auto preds = gen::random_logits(rng, 10000, 10);
  const auto near = to_probabilities(gen::random_logits(rng, 3000, 10, 1.0));
  const auto far = to_probabilities(gen::random_logits(rng, 3000, 10, 0.5));
  SuiteConfig cfg;
  cfg.ood_inputs = {{"ood_in", top_label(near).confidence}, {"ood_out", top_label(far).confidence}};
  const auto t0 = std::chrono::steady_clock::now();
  const auto records = run_suite(preds, cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::size_t binned = 0;
  for (const auto& r : records) binned += r.bin_count.has_value();
  Failures f;
  f.note(records.size() == 102, std::to_string(records.size()) + " records");
  f.note(binned == 90, std::to_string(binned) + " binned records");
  f.note(records.size() - binned == 12, std::to_string(records.size() - binned) + " unbinned records");
  f.note(expected_record_count(cfg) == 102, "expected_record_count disagrees");
  f.note(secs < 5.0, "runtime " + fmt(secs) + " s");
  return f.outcome(std::to_string(records.size()) + " records (" + std::to_string(binned) + " binned), " + fmt(secs) +
                   " s at N=10000");
}

Outcome space_counts() {
  const auto tss = enumerate_tss();
  const auto sss = enumerate_sss();
  std::map<std::string, std::size_t> canon;
  std::map<std::string, std::size_t> sem;
  std::vector<std::string> cfp(tss.size());
  std::vector<std::string> sfp(tss.size());
  for (std::size_t i = 0; i < tss.size(); ++i) {
    cfp[i] = canonical_fingerprint(tss[i]);
    sfp[i] = semantic_fingerprint(tss[i]);
    canon.emplace(cfp[i], i);
    sem.emplace(sfp[i], i);
  }
  Failures f;
  f.note(tss.size() == 15625, "tss " + std::to_string(tss.size()));
  f.note(sss.size() == 32768, "sss " + std::to_string(sss.size()));
  f.note(canon.size() == 6466, "classes " + std::to_string(canon.size()));
  if (canon.size() != 6466) {
    // Smallest pair on which the two fingerprints disagree, preferring a
    // pair merged canonically but split semantically.
    std::string pair;
    for (int pass = 0; pass < 2 && pair.empty(); ++pass) {
      for (std::size_t j = 0; j < tss.size() && pair.empty(); ++j) {
        const std::size_t i = pass == 0 ? canon[cfp[j]] : sem[sfp[j]];
        if (i == j) continue;
        if ((pass == 0 && sfp[i] != sfp[j]) || (pass == 1 && cfp[i] != cfp[j])) {
          pair = to_string(tss[i]) + " vs " + to_string(tss[j]);
        }
      }
    }
    std::cout << "  diagnostic: smallest disagreeing pair " << (pair.empty() ? "(none)" : pair) << "\n";
  }
  return f.outcome("tss " + std::to_string(tss.size()) + ", sss " + std::to_string(sss.size()) + ", canonical classes " +
                   std::to_string(canon.size()) + ", semantic classes " + std::to_string(sem.size()));
}

Outcome metric_oracles() {
  std::mt19937_64 rng(2024);
  const std::size_t ks[] = {2, 10, 100};
  Failures f;
  std::size_t compared = 0;
  auto check = [&](const std::string& what, long double got, long double want) {
    ++compared;
    f.note(gen::close(got, want), what + " " + fmt(got) + " vs " + fmt(want));
  };
  for (int c = 0; c < 100; ++c) {
    const std::size_t k = ks[c % 3];
    const std::size_t n = std::uniform_int_distribution<std::size_t>(5, 500)(rng);
    const auto p = c % 2 ? gen::random_logits(rng, n, k) : gen::random_probabilities(rng, n, k);
    const std::string tag = "case " + std::to_string(c) + " N=" + std::to_string(n) + " K=" + std::to_string(k);
    for (std::size_t m : kDefaultBinSizes) {
      if (m > n) continue;
      const std::string tm = tag + " m=" + std::to_string(m);
      check(tm + " ece", ece(p, m), oracle::ece(p, m, false));
      check(tm + " ece_em", ece_em(p, m), oracle::ece(p, m, true));
      check(tm + " mce", mce(p, m), oracle::mce(p, m, false));
      check(tm + " mce_em", mce(p, m, BinScheme::equal_mass), oracle::mce(p, m, true));
      check(tm + " cwce", cwce(p, m), oracle::cwce(p, m, false));
      check(tm + " cwce_em", cwce_em(p, m), oracle::cwce(p, m, true));
      check(tm + " lp_ce", lp_ce(p, 2.0, m), oracle::lp_ce(p, 2.0L, m));
    }
    const auto top = top_label(p);
    check(tag + " ksce", ksce(p), oracle::ksce(as_ld(top.confidence), as_int(top.correct)));
    check(tag + " mmce", mmce(p), oracle::mmce(as_ld(top.confidence), as_int(top.correct)));
    check(tag + " brier", brier(p), oracle::brier(p));
    check(tag + " nll", nll(p), oracle::nll(p));
    const auto other = top_label(gen::random_probabilities(rng, std::uniform_int_distribution<std::size_t>(5, 500)(rng),
                                                           k, 1.0))
                           .confidence;
    check(tag + " auroc", auroc(top.confidence, other), oracle::auroc(top.confidence, other));
    // Rounded columns so ties occur in x, y and both.
    std::vector<double> x(n);
    std::vector<double> y(n);
    std::uniform_int_distribution<int> level(0, 12);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = level(rng);
      y[i] = x[i] + level(rng) - 6;
    }
    const auto tau = kendall_tau(x, y);
    f.note(tau.has_value(), tag + " kendall_tau undefined");
    if (tau) check(tag + " kendall_tau", *tau, oracle::kendall_tau_b(x, y));
  }
  return f.outcome(std::to_string(compared) + " comparisons over 100 sets at 1e-10 relative");
}

Outcome invariants() {
  std::mt19937_64 rng(77);
  Failures f;
  std::size_t cases_failed = 0;
  for (int c = 0; c < 1000; ++c) {
    const std::size_t before = f.count();
    const std::size_t k = std::uniform_int_distribution<std::size_t>(2, 10)(rng);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(20, 400)(rng);
    const auto p = c % 2 ? gen::random_logits(rng, n, k) : gen::random_probabilities(rng, n, k);
    const std::size_t m = std::uniform_int_distribution<std::size_t>(1, n)(rng);
    const std::string tag = "case " + std::to_string(c) + " ";

    for (auto scheme : {BinScheme::equal_width, BinScheme::equal_mass}) {
      f.note(ece(p, m, scheme) <= mce(p, m, scheme) + 1e-15, tag + "ece > mce");
    }
    f.note(gen::close(ece(p, 1), ece_em(p, 1), 1e-12L), tag + "m=1 schemes differ");

    const auto perfect = gen::perfect(rng, n, k);
    const double zeros[] = {ece(perfect, m),    ece_em(perfect, m), cwce(perfect, m), cwce_em(perfect, m),
                            mce(perfect, m),    nll(perfect),       brier(perfect),   ksce(perfect),
                            mmce(perfect),      lp_ce(perfect, 2.0, m)};
    for (double z : zeros) f.note(std::fabs(z) <= 1e-12, tag + "perfect predictor gave " + fmt(z));
    f.note(kdece(perfect) <= 1e-3, tag + "perfect predictor kdece " + fmt(kdece(perfect)));

    const auto top = top_label(p);
    std::vector<double> sorted = top.confidence;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end()) {
      const auto stats = top_label_bins(top, m, BinScheme::equal_mass);
      std::size_t lo = n;
      std::size_t hi = 0;
      for (const auto& b : stats.bins) lo = std::min(lo, b.count), hi = std::max(hi, b.count);
      f.note(hi - lo <= 1, tag + "equal-mass spread " + std::to_string(hi - lo));
    }

    std::vector<double> scores(p.scores().begin(), p.scores().end());
    scores.insert(scores.end(), p.scores().begin(), p.scores().end());
    std::vector<std::int32_t> labels(p.labels().begin(), p.labels().end());
    labels.insert(labels.end(), p.labels().begin(), p.labels().end());
    const PredictionSet twice(scores, labels, k, p.kind());
    const std::size_t mm = std::min<std::size_t>(m, 500);
    const std::pair<double, double> dup[] = {
        {ece(p, mm), ece(twice, mm)},   {ece_em(p, mm), ece_em(twice, mm)}, {mce(p, mm), mce(twice, mm)},
        {cwce(p, mm), cwce(twice, mm)}, {cwce_em(p, mm), cwce_em(twice, mm)}, {ksce(p), ksce(twice)},
        {mmce(p), mmce(twice)},         {nll(p), nll(twice)},               {brier(p), brier(twice)}};
    for (const auto& [a, b] : dup) f.note(gen::close(a, b, 1e-9L), tag + "duplication changed " + fmt(a) + " to " + fmt(b));

    double last = 0;
    for (double q : {1.0, 1.25, 1.5, 1.75, 2.0}) {
      const double v = lp_ce(p, q, mm);
      f.note(v >= last - 1e-12, tag + "lp_ce decreased at p=" + fmt(q));
      last = v;
    }

    const auto other = top_label(gen::random_logits(rng, n / 2 + 3, k, 1.5)).confidence;
    const std::vector<double> in(top.confidence.begin(), top.confidence.end());
    f.note(std::fabs(auroc(in, other) + auroc(other, in) - 1.0) <= 1e-12, tag + "auroc not antisymmetric");

    cases_failed += f.count() != before;
  }
  return f.outcome(std::to_string(1000 - cases_failed) + "/1000 cases clean");
}

Outcome temperature() {
  Failures f;
  std::ostringstream summary;
  std::mt19937_64 rng(31);
  for (double c : {0.5, 2.0, 4.0}) {
    const auto big = gen::calibrated_logits(rng, 200000, 10, c);
    const double t = fit_temperature(big).value;
    f.note(std::fabs(t - c) <= 1e-2, "c=" + fmt(c) + " fitted " + fmt(t));
    const auto small = gen::calibrated_logits(rng, 10000, 10, c);
    const double ts = fit_temperature(small).value;
    const long double grid = oracle::grid_temperature(small, kTemperatureMin, kTemperatureMax, 0.05L);
    f.note(std::fabs(ts - grid) <= 1e-3, "c=" + fmt(c) + " optimiser " + fmt(ts) + " vs grid " + fmt(grid));
    summary << "c=" << c << " T=" << t << " (grid " << static_cast<double>(grid) << " vs " << ts << "); ";
  }
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(10, 400)(rng);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(2, 20)(rng);
    const double scale = std::uniform_real_distribution<double>(0.1, 8.0)(rng);
    const auto p = i % 2 ? gen::random_logits(rng, n, k, scale) : gen::calibrated_logits(rng, n, k, scale);
    const auto fit = fit_temperature(p);
    f.note(temperature_nll(p, fit.value) <= temperature_nll(p, 1.0), "instance " + std::to_string(i) + " NLL rose");
    f.note(accuracy(apply_temperature(p, fit.value)) == accuracy(p), "instance " + std::to_string(i) + " accuracy moved");
  }
  summary << "200 random instances";
  return f.outcome(summary.str());
}

Outcome kdece_consistency() {
  Failures f;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> conf(50000);
  std::vector<std::uint8_t> correct(conf.size());
  for (std::size_t i = 0; i < conf.size(); ++i) {
    conf[i] = 0.5 + 0.5 * u(rng);
    correct[i] = u(rng) < conf[i];
  }
  const double big = kdece(conf, correct);
  f.note(big <= 0.02, "N=50000 gave " + fmt(big));
  double worst = 0;
  for (int c = 0; c < 20; ++c) {
    std::vector<double> x(20);
    std::vector<std::uint8_t> y(20);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = 0.3 + 0.7 * u(rng);
      y[i] = u(rng) < 0.7;
    }
    const double h = silverman_bandwidth(x);
    const double got = kdece(x, y);
    const long double want = oracle::kdece(as_ld(x), as_int(y), h, 10240);
    worst = std::max(worst, static_cast<double>(std::fabs(got - want)));
    f.note(std::fabs(got - want) <= 1e-3, "N=20 case " + std::to_string(c) + " " + fmt(got) + " vs " + fmt(want));
  }
  return f.outcome("N=50000 KDECE " + fmt(big) + ", N=20 max |diff| vs refined oracle " + fmt(worst));
}

SynthSpec synth(SearchSpace space, std::optional<Architecture> planted = std::nullopt) {
  SynthSpec s;
  s.space = space;
  s.planted = std::move(planted);
  return s;
}

SearchConfig config(SearchAlgorithm algo, const Objective& objective, std::size_t budget, std::uint64_t seed) {
  SearchConfig c;
  c.algorithm = algo;
  c.objective = objective;
  c.budget = budget;
  c.seed = seed;
  c.population_size = 20;
  c.sample_size = 5;
  return c;
}

bool monotone(const SearchResult& r, std::size_t budget) {
  for (std::size_t i = 1; i < r.trajectory.size(); ++i) {
    if (r.trajectory[i].value < r.trajectory[i - 1].value) return false;
  }
  return r.evaluations <= budget && r.trajectory.size() == r.evaluations;
}

Outcome search() {
  Failures f;
  const Objective acc{.kind = Objective::Kind::accuracy};
  std::size_t runs = 0;
  auto audit = [&](const SearchResult& r, std::size_t budget, const std::string& what) {
    ++runs;
    f.note(monotone(r, budget), what + " trajectory not monotone or over budget");
  };

  for (auto space : {SearchSpace::tss, SearchSpace::sss}) {
    const auto bench = synth_benchmark(synth(space), 17);
    double best = -1;
    for (std::size_t i = 0; i < bench.size(); ++i) best = std::max(best, bench.entry(i).accuracy);
    const auto cfg = config(SearchAlgorithm::random_search, acc, bench.size(), 3);
    const auto r = random_search(bench, cfg);
    audit(r, cfg.budget, "rs");
    f.note(r.best_value == best, "rs full budget missed the argmax in " + to_string(space));

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto ls = config(SearchAlgorithm::local_search, acc, 100000, seed);
      const auto l = local_search(bench, ls);
      audit(l, ls.budget, "ls");
      const double v = acc(bench.lookup(l.best));
      for (const auto& nb : neighbors(l.best)) {
        f.note(acc(bench.lookup(nb)) <= v, "ls seed " + std::to_string(seed) + " result has a better neighbour");
      }
    }
  }

  std::ostringstream summary;
  for (auto space : {SearchSpace::tss, SearchSpace::sss}) {
    const Architecture planted = space == SearchSpace::tss ? Architecture{parse_tss(
                                                                 "|nor_conv_3x3~0|+|nor_conv_3x3~0|avg_pool_3x3~1|+|"
                                                                 "skip_connect~0|nor_conv_3x3~1|skip_connect~2|")}
                                                           : Architecture{parse_sss("24:40:64:8:56")};
    const auto bench = synth_benchmark(synth(space, planted), 9);
    std::size_t found = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto cfg = config(SearchAlgorithm::regularized_evolution, acc, 500, seed);
      const auto r = regularized_evolution(bench, cfg);
      audit(r, cfg.budget, "re");
      found += r.best == planted;
    }
    f.note(found >= 95, "re found the planted optimum in " + std::to_string(found) + "/100 " + to_string(space) + " seeds");
    summary << "re planted " << to_string(space) << " " << found << "/100; ";
  }
  summary << runs << " runs audited";
  return f.outcome(summary.str());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism(const fs::path& dir) {
  Failures f;
  std::mt19937_64 rng(8);
  fs::create_directories(dir);

  for (int c = 0; c < 50; ++c) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 300)(rng);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(2, 30)(rng);
    auto p = gen::random_logits(rng, n, k, 20.0);
    if (c % 2) {
      // Probabilities that are exact in float32.
      const auto q = gen::random_probabilities(rng, n, k);
      std::vector<double> scores(q.scores().begin(), q.scores().end());
      for (auto& v : scores) v = static_cast<float>(v);
      p = PredictionSet(scores, {q.labels().begin(), q.labels().end()}, k, ScoreKind::probabilities);
    }
    const fs::path file = dir / "rt.bin";
    write_logits_file(p, file);
    f.note(read_logits_file(file) == p, "binary round trip " + std::to_string(c));
    f.note(decode_logits(encode_logits(p)) == p, "in-memory round trip " + std::to_string(c));
  }

  const auto preds = gen::random_logits(rng, 2000, 10);
  write_logits_file(preds, dir / "a.bin");
  write_logits_file(gen::random_logits(rng, 2000, 10, 2.0), dir / "b.bin");
  write_logits_file(gen::random_logits(rng, 500, 10, 1.0), dir / "near.bin");
  write_logits_file(gen::random_logits(rng, 500, 10, 0.5), dir / "far.bin");

  SuiteConfig cfg;
  cfg.include_accuracy = true;
  const auto records = run_suite(preds, cfg);
  f.note(parse_records(format_records(records)) == records, "JSONL round trip");
  for (const auto& r : records) f.note(record_from_json(record_to_json(r)) == r, "single record round trip");

  const std::string cli = CALIBREX_CLI_PATH;
  const std::string d = dir.string() + "/";
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"eval", "eval --logits " + d + "a.bin --logits " + d + "b.bin --ood-in " + d + "near.bin --ood-out " + d +
                   "far.bin --seed 4 --jobs 2 --with-accuracy --out OUT"},
      {"correlate", "correlate --table " + d + "eval_1.jsonl --out OUT"},
      {"search re", "search --benchmark synthetic --algo re --seed 5 --budget 300 --out OUT"},
      {"search ls", "search --benchmark synthetic --space sss --algo ls --seed 5 --budget 300 --out OUT"},
      {"search rs", "search --benchmark synthetic --algo rs --objective hcs --beta 2 --seed 5 --budget 300 --out OUT"},
      {"enumerate", "enumerate --space tss --dedupe --out OUT"},
      {"report", "report --records " + d + "eval_1.jsonl --group-by bin_count --stat boxplot --out OUT"},
  };
  std::size_t identical = 0;
  for (const auto& [name, args] : commands) {
    std::string outs[2];
    for (int run = 1; run <= 2; ++run) {
      std::string tag = name.substr(0, name.find(' '));
      if (name.find(' ') != std::string::npos) tag += "_" + name.substr(name.find(' ') + 1);
      const fs::path out = dir / (tag + "_" + std::to_string(run) + (tag == "eval" ? ".jsonl" : ".out"));
      std::string line = args;
      line.replace(line.find("OUT"), 3, out.string());
      const int status = std::system((cli + " " + line + " > /dev/null 2>&1").c_str());
      f.note(status == 0, name + " exited with " + std::to_string(status));
      outs[run - 1] = slurp(out);
    }
    const bool same = !outs[0].empty() && outs[0] == outs[1];
    identical += same;
    f.note(same, name + " output differs between runs");
  }
  return f.outcome("50 binary round trips, " + std::to_string(records.size()) + " JSONL records, " +
                   std::to_string(identical) + "/" + std::to_string(commands.size()) + " CLI commands byte-identical");
}

}  // namespace

int main() {
  const fs::path dir = fs::temp_directory_path() / ("calibrex_acceptance_" + std::to_string(::getpid()));
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"HCS reproduces the published accuracy/ECE table", hcs_table},
      {"suite emits 102 records in under 5 s", suite_cardinality},
      {"space sizes and isomorphism classes", space_counts},
      {"metrics match brute-force oracles", metric_oracles},
      {"calibration invariants over 1000 cases", invariants},
      {"temperature scaling recovers the scale", temperature},
      {"KDECE consistency", kdece_consistency},
      {"search correctness", search},
      {"determinism and IO round trips", [&] { return determinism(dir); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s [%zu] %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::error_code ec;
  fs::remove_all(dir, ec);
  return failed;
}
