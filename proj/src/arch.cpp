#include "calibrex/arch.hpp"

#include <algorithm>
#include <numeric>

#include "calibrex/error.hpp"

namespace calibrex {

namespace {

struct OpAlias {
  std::string_view token;
  TssOp op;
};

constexpr std::array<OpAlias, 10> kOpAliases = {{
    {"none", TssOp::none},
    {"zero", TssOp::none},
    {"skip_connect", TssOp::skip_connect},
    {"skip", TssOp::skip_connect},
    {"nor_conv_1x1", TssOp::nor_conv_1x1},
    {"conv1x1", TssOp::nor_conv_1x1},
    {"nor_conv_3x3", TssOp::nor_conv_3x3},
    {"conv3x3", TssOp::nor_conv_3x3},
    {"avg_pool_3x3", TssOp::avg_pool_3x3},
    {"avgpool3x3", TssOp::avg_pool_3x3},
}};

[[noreturn]] void parse_fail(std::size_t pos, const std::string& what) {
  throw Error(Errc::invalid_argument,
              "architecture parse error at position " + std::to_string(pos) + ": " + what);
}

std::string join_sorted(std::vector<std::string> terms) {
  std::sort(terms.begin(), terms.end());
  std::string out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) out += '+';
    out += terms[i];
  }
  return out;
}

// Incoming edge positions for each non-input node, in string order.
constexpr std::array<std::array<int, 3>, 3> kIncoming = {{{0, -1, -1}, {1, 2, -1}, {3, 4, 5}}};

}  // namespace

std::string_view op_name(TssOp op) noexcept {
  switch (op) {
    case TssOp::none: return "none";
    case TssOp::skip_connect: return "skip_connect";
    case TssOp::nor_conv_1x1: return "nor_conv_1x1";
    case TssOp::nor_conv_3x3: return "nor_conv_3x3";
    case TssOp::avg_pool_3x3: return "avg_pool_3x3";
  }
  return "?";
}

std::string to_string(const TssArch& arch) {
  std::string out;
  for (std::size_t node = 0; node < 3; ++node) {
    if (node) out += '+';
    out += '|';
    for (int e : kIncoming[node]) {
      if (e < 0) break;
      const auto& edge = kTssEdges[static_cast<std::size_t>(e)];
      out += op_name(arch.ops[static_cast<std::size_t>(e)]);
      out += '~';
      out += std::to_string(edge.first);
      out += '|';
    }
  }
  return out;
}

std::string to_string(const SssArch& arch) {
  std::string out;
  for (std::size_t i = 0; i < kSssLayerCount; ++i) {
    if (i) out += ':';
    out += std::to_string(arch.channels[i]);
  }
  return out;
}

std::string to_string(const Architecture& arch) {
  return std::visit([](const auto& a) { return to_string(a); }, arch);
}

TssArch parse_tss(std::string_view text) {
  TssArch arch;
  std::size_t pos = 0;
  auto expect = [&](char c) {
    if (pos >= text.size() || text[pos] != c) {
      parse_fail(pos, std::string("expected '") + c + "'");
    }
    ++pos;
  };
  for (std::size_t node = 0; node < 3; ++node) {
    if (node) expect('+');
    expect('|');
    for (int e : kIncoming[node]) {
      if (e < 0) break;
      const std::size_t start = pos;
      while (pos < text.size() && text[pos] != '~' && text[pos] != '|') ++pos;
      const std::string_view token = text.substr(start, pos - start);
      const auto alias = std::find_if(kOpAliases.begin(), kOpAliases.end(),
                                      [&](const OpAlias& a) { return a.token == token; });
      if (alias == kOpAliases.end()) parse_fail(start, "unknown operation '" + std::string(token) + "'");
      expect('~');
      const int source = kTssEdges[static_cast<std::size_t>(e)].first;
      if (pos >= text.size() || text[pos] != static_cast<char>('0' + source)) {
        parse_fail(pos, "expected source node " + std::to_string(source));
      }
      ++pos;
      expect('|');
      arch.ops[static_cast<std::size_t>(e)] = alias->op;
    }
  }
  if (pos != text.size()) parse_fail(pos, "trailing characters");
  return arch;
}

SssArch parse_sss(std::string_view text) {
  SssArch arch;
  std::size_t pos = 0;
  for (std::size_t layer = 0; layer < kSssLayerCount; ++layer) {
    if (layer) {
      if (pos >= text.size() || text[pos] != ':') parse_fail(pos, "expected ':'");
      ++pos;
    }
    const std::size_t start = pos;
    int value = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9' && pos - start < 4) {
      value = value * 10 + (text[pos] - '0');
      ++pos;
    }
    if (pos == start) parse_fail(pos, "expected a channel count");
    if (std::find(kSssChannels.begin(), kSssChannels.end(), value) == kSssChannels.end()) {
      parse_fail(start, "channel count " + std::to_string(value) + " not in {8,16,...,64}");
    }
    arch.channels[layer] = value;
  }
  if (pos != text.size()) parse_fail(pos, "trailing characters");
  return arch;
}

Architecture parse_arch(std::string_view text) {
  if (!text.empty() && text.front() == '|') return parse_tss(text);
  return parse_sss(text);
}

std::vector<TssArch> enumerate_tss() {
  std::vector<TssArch> out;
  out.reserve(kTssSpaceSize);
  for (std::size_t code = 0; code < kTssSpaceSize; ++code) {
    TssArch a;
    std::size_t rest = code;
    for (std::size_t e = kTssEdgeCount; e-- > 0;) {
      a.ops[e] = static_cast<TssOp>(rest % kTssOpCount);
      rest /= kTssOpCount;
    }
    out.push_back(a);
  }
  return out;
}

std::vector<SssArch> enumerate_sss() {
  std::vector<SssArch> out;
  out.reserve(kSssSpaceSize);
  for (std::size_t code = 0; code < kSssSpaceSize; ++code) {
    SssArch a;
    std::size_t rest = code;
    for (std::size_t l = kSssLayerCount; l-- > 0;) {
      a.channels[l] = kSssChannels[rest % kSssChannels.size()];
      rest /= kSssChannels.size();
    }
    out.push_back(a);
  }
  return out;
}

std::size_t lexicographic_index(const TssArch& arch) {
  std::size_t idx = 0;
  for (TssOp op : arch.ops) idx = idx * kTssOpCount + static_cast<std::size_t>(op);
  return idx;
}

std::size_t lexicographic_index(const SssArch& arch) {
  std::size_t idx = 0;
  for (int c : arch.channels) idx = idx * kSssChannels.size() + static_cast<std::size_t>(c / 8 - 1);
  return idx;
}

std::string canonical_fingerprint(const TssArch& arch) {
  std::array<std::string, 4> node;
  node[0] = "0";
  for (std::size_t target = 1; target < 4; ++target) {
    std::vector<std::string> terms;
    for (int e : kIncoming[target - 1]) {
      if (e < 0) break;
      const TssOp op = arch.ops[static_cast<std::size_t>(e)];
      const std::string& src = node[static_cast<std::size_t>(kTssEdges[static_cast<std::size_t>(e)].first)];
      if (op == TssOp::none || src == "#") {
        terms.emplace_back("#");
      } else if (op == TssOp::skip_connect) {
        terms.push_back(src);
      } else {
        terms.push_back("(" + src + ")@" + std::string(op_name(op)));
      }
    }
    node[target] = join_sorted(std::move(terms));
  }
  return node[3];
}

std::string semantic_fingerprint(const TssArch& arch) {
  // Each node is a sorted multiset of terms; the empty multiset is zero.
  std::array<std::vector<std::string>, 4> node;
  node[0] = {"x"};
  for (std::size_t target = 1; target < 4; ++target) {
    std::vector<std::string> terms;
    for (int e : kIncoming[target - 1]) {
      if (e < 0) break;
      const TssOp op = arch.ops[static_cast<std::size_t>(e)];
      const auto& src = node[static_cast<std::size_t>(kTssEdges[static_cast<std::size_t>(e)].first)];
      if (op == TssOp::none || src.empty()) continue;
      if (op == TssOp::skip_connect) {
        terms.insert(terms.end(), src.begin(), src.end());
      } else {
        terms.push_back(std::string(op_name(op)) + "(" + join_sorted(src) + ")");
      }
    }
    std::sort(terms.begin(), terms.end());
    node[target] = std::move(terms);
  }
  return node[3].empty() ? "0" : join_sorted(node[3]);
}

std::size_t hamming(const TssArch& a, const TssArch& b) {
  std::size_t d = 0;
  for (std::size_t e = 0; e < kTssEdgeCount; ++e) d += a.ops[e] != b.ops[e];
  return d;
}

std::size_t hamming(const SssArch& a, const SssArch& b) {
  std::size_t d = 0;
  for (std::size_t l = 0; l < kSssLayerCount; ++l) d += a.channels[l] != b.channels[l];
  return d;
}

std::size_t hamming(const Architecture& a, const Architecture& b) {
  if (a.index() != b.index()) throw Error(Errc::invalid_argument, "architectures from different spaces");
  if (const auto* t = std::get_if<TssArch>(&a)) return hamming(*t, std::get<TssArch>(b));
  return hamming(std::get<SssArch>(a), std::get<SssArch>(b));
}

std::vector<Architecture> neighbors(const Architecture& arch) {
  std::vector<Architecture> out;
  if (const auto* t = std::get_if<TssArch>(&arch)) {
    for (std::size_t e = 0; e < kTssEdgeCount; ++e) {
      for (std::size_t op = 0; op < kTssOpCount; ++op) {
        if (static_cast<std::size_t>(t->ops[e]) == op) continue;
        TssArch n = *t;
        n.ops[e] = static_cast<TssOp>(op);
        out.emplace_back(n);
      }
    }
  } else {
    const auto& s = std::get<SssArch>(arch);
    for (std::size_t l = 0; l < kSssLayerCount; ++l) {
      for (int c : kSssChannels) {
        if (s.channels[l] == c) continue;
        SssArch n = s;
        n.channels[l] = c;
        out.emplace_back(n);
      }
    }
  }
  return out;
}

Architecture mutate(const Architecture& arch, Rng& rng) {
  if (const auto* t = std::get_if<TssArch>(&arch)) {
    TssArch n = *t;
    const std::size_t e = uniform_index(rng, kTssEdgeCount);
    auto op = static_cast<std::size_t>(uniform_index(rng, kTssOpCount - 1));
    if (op >= static_cast<std::size_t>(n.ops[e])) ++op;
    n.ops[e] = static_cast<TssOp>(op);
    return n;
  }
  SssArch n = std::get<SssArch>(arch);
  const std::size_t l = uniform_index(rng, kSssLayerCount);
  const auto current = static_cast<std::size_t>(
      std::find(kSssChannels.begin(), kSssChannels.end(), n.channels[l]) - kSssChannels.begin());
  auto pick = static_cast<std::size_t>(uniform_index(rng, kSssChannels.size() - 1));
  if (pick >= current) ++pick;
  n.channels[l] = kSssChannels[pick];
  return n;
}

int model_size(const SssArch& arch) {
  return std::accumulate(arch.channels.begin(), arch.channels.end(), 0);
}

}  // namespace calibrex
