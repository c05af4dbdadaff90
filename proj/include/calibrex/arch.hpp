#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "calibrex/rng.hpp"

namespace calibrex {

// Topology search space: a 4-node cell whose 6 edges each carry one of 5
// operations. Codes follow the NATS-Bench operation order.
enum class TssOp : std::uint8_t {
  none = 0,
  skip_connect = 1,
  nor_conv_1x1 = 2,
  nor_conv_3x3 = 3,
  avg_pool_3x3 = 4,
};

inline constexpr std::size_t kTssOpCount = 5;
inline constexpr std::size_t kTssEdgeCount = 6;
inline constexpr std::size_t kTssSpaceSize = 15625;

//! (source, target) per edge, in NATS string order.
inline constexpr std::array<std::pair<int, int>, kTssEdgeCount> kTssEdges = {
    {{0, 1}, {0, 2}, {1, 2}, {0, 3}, {1, 3}, {2, 3}}};

std::string_view op_name(TssOp op) noexcept;

struct TssArch {
  std::array<TssOp, kTssEdgeCount> ops{};

  friend auto operator<=>(const TssArch&, const TssArch&) = default;
};

// Size search space: 5 layer widths drawn from 8 channel counts.
inline constexpr std::array<int, 8> kSssChannels = {8, 16, 24, 32, 40, 48, 56, 64};
inline constexpr std::size_t kSssLayerCount = 5;
inline constexpr std::size_t kSssSpaceSize = 32768;

struct SssArch {
  std::array<int, kSssLayerCount> channels{8, 8, 8, 8, 8};

  friend auto operator<=>(const SssArch&, const SssArch&) = default;
};

using Architecture = std::variant<TssArch, SssArch>;

std::string to_string(const TssArch& arch);
std::string to_string(const SssArch& arch);
std::string to_string(const Architecture& arch);

//! NATS notation `|op~0|+|op~0|op~1|+|op~0|op~1|op~2|`. Short aliases
//! (zero, skip, conv1x1, conv3x3, avgpool3x3) are accepted on input.
TssArch parse_tss(std::string_view text);
//! `c0:c1:c2:c3:c4`.
SssArch parse_sss(std::string_view text);
//! Dispatches on the leading '|'.
Architecture parse_arch(std::string_view text);

//! Lexicographic on op codes, edge 0 most significant.
std::vector<TssArch> enumerate_tss();
//! Lexicographic on channels, layer 0 most significant.
std::vector<SssArch> enumerate_sss();

//! Position in the lexicographic enumeration.
std::size_t lexicographic_index(const TssArch& arch);
std::size_t lexicographic_index(const SssArch& arch);

/// Isomorphism fingerprint in the NATS-Bench convention.
///
/// Each node's value is a '+'-joined sorted list of incoming terms: a zero
/// edge, or any edge out of a node whose value is exactly "#", gives "#"; a
/// skip edge forwards the source's string; any other operation wraps the
/// source as "(src)@op". The fingerprint is the output node's string. This
/// partitions the 15,625 cells into 6,466 classes.
std::string canonical_fingerprint(const TssArch& arch);

/// Fingerprint of the computation itself: zero edges and zero-valued sources
/// vanish, skips splice the source's terms into the target's sum, and a node
/// with no surviving inputs is zero. Coarser than canonical_fingerprint
/// (4,930 classes); equal canonical fingerprints always imply equal semantic
/// ones.
std::string semantic_fingerprint(const TssArch& arch);

std::size_t hamming(const TssArch& a, const TssArch& b);
std::size_t hamming(const SssArch& a, const SssArch& b);
std::size_t hamming(const Architecture& a, const Architecture& b);

//! Every architecture differing in exactly one edge op / one layer width,
//! ordered by position then value.
std::vector<Architecture> neighbors(const Architecture& arch);

//! One uniformly chosen single-position change.
Architecture mutate(const Architecture& arch, Rng& rng);

//! Total kernel count, the sum of layer widths.
int model_size(const SssArch& arch);

}  // namespace calibrex
