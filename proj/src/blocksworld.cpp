#include "adteager/blocksworld.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>

#include <json.hpp>

#include "adteager/error.h"

namespace adteager::blocks {

namespace {

constexpr const char* kPlaces[3] = {"PlaceL", "PlaceC", "PlaceR"};
constexpr const char* kSelectors[3] = {"l", "c", "r"};

std::string tower_term(const Tower& tower)
{
  std::string out = "Empty";
  for (int block : tower)
  {
    out = "(Stack " + block_name(block) + " " + out + ")";
  }
  return out;
}

std::string config_term(const Config& config)
{
  return "(table " + tower_term(config.towers[0]) + " " + tower_term(config.towers[1]) + " " +
         tower_term(config.towers[2]) + ")";
}

std::string cfg(std::size_t i) { return "cfg_" + std::to_string(i); }

Config random_config(Prng& rng, std::size_t blocks)
{
  std::vector<int> order(blocks);
  for (std::size_t i = 0; i < blocks; ++i)
  {
    order[i] = static_cast<int>(i);
  }
  for (std::size_t i = blocks; i > 1; --i)
  {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  Config config;
  for (int block : order)
  {
    config.towers[rng.below(3)].push_back(block);
  }
  return config;
}

}  // namespace

std::uint64_t Prng::below(std::uint64_t bound)
{
  if (bound == 0)
  {
    throw Error(ErrorKind::Invalid, "blocksworld", "empty range");
  }
  // Largest multiple of bound representable; draws above it are rejected.
  std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                        std::numeric_limits<std::uint64_t>::max() % bound;
  while (true)
  {
    std::uint64_t x = engine_();
    if (x < limit)
    {
      return x % bound;
    }
  }
}

std::string block_name(int block) { return "B" + std::to_string(block + 1); }

BlocksSetup generate_setup(std::size_t block_count, std::uint64_t seed)
{
  if (block_count < kMinBlocks || block_count > kMaxBlocks)
  {
    throw Error(ErrorKind::Invalid, "blocksworld",
                "block count must be in [2, 26], got " + std::to_string(block_count));
  }
  Prng rng(seed ^ (0x9e3779b97f4a7c15ULL * block_count));
  BlocksSetup setup;
  setup.block_count = block_count;
  setup.seed = seed;
  setup.initial = random_config(rng, block_count);
  setup.target = random_config(rng, block_count);
  return setup;
}

BlocksQuery encode_query(const BlocksSetup& setup, std::size_t steps, bool at_most)
{
  if (steps == 0)
  {
    throw Error(ErrorKind::Invalid, "blocksworld", "steps must be at least 1");
  }
  std::string s;
  s += "; blocks world: " + std::to_string(setup.block_count) + " blocks, " +
       std::to_string(steps) + (at_most ? " steps at most" : " steps") + ", seed " +
       std::to_string(setup.seed) + "\n";
  s += "(set-logic QF_DT)\n";
  s += "(declare-datatypes ((block 0) (tower 0) (config 0) (place 0))\n  ((";
  for (std::size_t b = 0; b < setup.block_count; ++b)
  {
    s += (b > 0 ? " (" : "(") + block_name(static_cast<int>(b)) + ")";
  }
  s += ")\n   ((Empty) (Stack (top block) (rest tower)))\n";
  s += "   ((table (l tower) (c tower) (r tower)))\n";
  s += "   ((PlaceL) (PlaceC) (PlaceR))))\n";
  for (std::size_t i = 0; i <= steps; ++i)
  {
    s += "(declare-const " + cfg(i) + " config)\n";
  }
  for (std::size_t i = 0; i < steps; ++i)
  {
    s += "(declare-const src_" + std::to_string(i) + " place)\n";
    s += "(declare-const dst_" + std::to_string(i) + " place)\n";
  }
  s += "(assert (= " + cfg(0) + " " + config_term(setup.initial) + "))\n";
  for (std::size_t i = 0; i < steps; ++i)
  {
    std::string src = "src_" + std::to_string(i);
    std::string dst = "dst_" + std::to_string(i);
    s += "(assert (not (= " + src + " " + dst + ")))\n";
    for (int from = 0; from < 3; ++from)
    {
      for (int to = 0; to < 3; ++to)
      {
        if (from == to)
        {
          continue;
        }
        std::string source = "(" + std::string(kSelectors[from]) + " " + cfg(i) + ")";
        std::string towers[3];
        for (int t = 0; t < 3; ++t)
        {
          towers[t] = "(" + std::string(kSelectors[t]) + " " + cfg(i) + ")";
        }
        towers[from] = "(rest " + source + ")";
        towers[to] = "(Stack (top " + source + ") (" + kSelectors[to] + " " + cfg(i) + "))";
        s += "(assert (=> (and (= " + src + " " + kPlaces[from] + ") (= " + dst + " " +
             kPlaces[to] + "))\n  (and ((_ is Stack) " + source + ")\n       (= " + cfg(i + 1) +
             " (table " + towers[0] + " " + towers[1] + " " + towers[2] + ")))))\n";
      }
    }
  }
  std::string target = config_term(setup.target);
  if (at_most)
  {
    s += "(assert (or";
    for (std::size_t i = 0; i <= steps; ++i)
    {
      s += " (= " + cfg(i) + " " + target + ")";
    }
    s += "))\n";
  }
  else
  {
    s += "(assert (= " + cfg(steps) + " " + target + "))\n";
  }
  s += "(check-sat)\n";
  return BlocksQuery{setup, steps, at_most, std::move(s)};
}

std::vector<Move> legal_moves(const Config& config)
{
  std::vector<Move> out;
  for (int from = 0; from < 3; ++from)
  {
    if (config.towers[from].empty())
    {
      continue;
    }
    for (int to = 0; to < 3; ++to)
    {
      if (to != from)
      {
        out.push_back(Move{from, to});
      }
    }
  }
  return out;
}

Config apply(const Config& config, const Move& move)
{
  Config next = config;
  next.towers[move.to].push_back(next.towers[move.from].back());
  next.towers[move.from].pop_back();
  return next;
}

Verdict search_oracle(const BlocksSetup& setup, std::size_t steps, bool at_most,
                      std::size_t max_blocks)
{
  if (setup.block_count > max_blocks)
  {
    throw Error(ErrorKind::ResourceLimit, "blocksworld",
                "search oracle limited to " + std::to_string(max_blocks) + " blocks");
  }
  Verdict v;
  v.source = "search";
  std::set<Config> frontier{setup.initial};
  bool reached = setup.initial == setup.target;
  for (std::size_t j = 0; j < steps; ++j)
  {
    std::set<Config> next;
    for (const Config& c : frontier)
    {
      for (const Move& m : legal_moves(c))
      {
        next.insert(apply(c, m));
      }
    }
    frontier = std::move(next);
    reached = (at_most && reached) || frontier.count(setup.target) != 0;
  }
  v.answer = reached ? Answer::Sat : Answer::Unsat;
  return v;
}

bool replay(const BlocksSetup& setup, const std::vector<Move>& moves)
{
  Config c = setup.initial;
  for (const Move& m : moves)
  {
    if (m.from < 0 || m.from > 2 || m.to < 0 || m.to > 2 || m.from == m.to ||
        c.towers[m.from].empty())
    {
      return false;
    }
    c = apply(c, m);
  }
  return c == setup.target;
}

std::vector<BlocksQuery> generate_suite(std::size_t count, std::uint64_t seed)
{
  Prng rng(seed);
  std::vector<BlocksQuery> suite;
  suite.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
  {
    std::size_t blocks = kMinBlocks + rng.below(kMaxBlocks - kMinBlocks + 1);
    std::size_t steps = 1 + rng.below(2 * blocks);
    std::uint64_t setup_seed = rng.next();
    suite.push_back(encode_query(generate_setup(blocks, setup_seed), steps));
  }
  return suite;
}

void write_suite(const std::vector<BlocksQuery>& suite, const std::filesystem::path& dir)
{
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
  {
    throw Error(ErrorKind::Io, "blocksworld", "cannot create " + dir.string() + ": " + ec.message());
  }
  nlohmann::ordered_json manifest = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < suite.size(); ++i)
  {
    char name[32];
    std::snprintf(name, sizeof name, "q%04zu.smt2", i);
    std::ofstream out(dir / name, std::ios::binary);
    out << suite[i].text;
    if (!out)
    {
      throw Error(ErrorKind::Io, "blocksworld", "cannot write " + (dir / name).string());
    }
    nlohmann::ordered_json entry;
    entry["file"] = name;
    entry["blocks"] = suite[i].setup.block_count;
    entry["steps"] = suite[i].steps;
    entry["seed"] = suite[i].setup.seed;
    manifest.push_back(std::move(entry));
  }
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  out << manifest.dump(2) << "\n";
  if (!out)
  {
    throw Error(ErrorKind::Io, "blocksworld", "cannot write manifest.json");
  }
}

}  // namespace adteager::blocks
