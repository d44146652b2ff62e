#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "adteager/frontend.h"
#include "adteager/verdict.h"

namespace adteager::blocks {

/// Blocks of one tower, bottom first. Blocks are numbered from 0 and named
/// B1, B2, ... in generated queries.
using Tower = std::vector<int>;

struct Config
{
  std::array<Tower, 3> towers;  // left, centre, right

  friend bool operator==(const Config&, const Config&) = default;
  friend auto operator<=>(const Config&, const Config&) = default;
};

struct BlocksSetup
{
  std::size_t block_count = 0;
  Config initial;
  Config target;
  std::uint64_t seed = 0;
};

/// Move the top block of tower `from` onto tower `to`.
struct Move
{
  int from = 0;
  int to = 0;
};

struct BlocksQuery
{
  BlocksSetup setup;
  std::size_t steps = 0;
  bool at_most = false;
  std::string text;  // SMT-LIB

  Script script() const { return parse_script(text); }
};

inline constexpr std::size_t kMinBlocks = 2;
inline constexpr std::size_t kMaxBlocks = 26;

std::string block_name(int block);

/// 64-bit Mersenne Twister (std::mt19937_64) with a rejection-sampled
/// bounded draw, so results do not depend on the standard library's
/// distribution implementations.
class Prng
{
 public:
  explicit Prng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

/// Each block, in a shuffled order, is put on top of one of the three
/// towers; done once for the initial and once for the target configuration.
/// Deterministic in (block_count, seed).
BlocksSetup generate_setup(std::size_t block_count, std::uint64_t seed);

/// Bounded-model-checking query: configuration variables cfg_0..cfg_steps,
/// per-step source/destination choices, cfg_0 = initial and cfg_steps =
/// target (with `at_most`, any cfg_j = target).
BlocksQuery encode_query(const BlocksSetup& setup, std::size_t steps, bool at_most = false);

/// Whether `target` is reachable in exactly `steps` moves (at most, with
/// `at_most`), by breadth-first search. Throws Error(ResourceLimit) above
/// `max_blocks` blocks.
Verdict search_oracle(const BlocksSetup& setup, std::size_t steps, bool at_most = false,
                      std::size_t max_blocks = 6);

/// Applies `moves` to the initial configuration; false on an illegal move
/// or when the result differs from the target.
bool replay(const BlocksSetup& setup, const std::vector<Move>& moves);

std::vector<Move> legal_moves(const Config& config);
Config apply(const Config& config, const Move& move);

/// `count` queries; block counts uniform in [2, 26], steps uniform in
/// [1, 2 * blocks]. Deterministic in `seed`.
std::vector<BlocksQuery> generate_suite(std::size_t count, std::uint64_t seed);

/// Writes qNNNN.smt2 files and manifest.json (file, blocks, steps, seed)
/// into `dir`, creating it if needed.
void write_suite(const std::vector<BlocksQuery>& suite, const std::filesystem::path& dir);

}  // namespace adteager::blocks
