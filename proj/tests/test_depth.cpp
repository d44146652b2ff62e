#include <gtest/gtest.h>

#include <set>
#include <string>
#include <utility>

#include "adteager/depth.h"
#include "adteager/error.h"
#include "adteager/frontend.h"
#include "adteager/reduce.h"
#include "support.h"

using namespace adteager;

namespace {

const std::string kBlocksDecl =
    "(declare-datatypes ((block 0) (tower 0) (config 0))\n"
    "  (((A) (B))\n"
    "   ((Empty) (Stack (top block) (rest tower)))\n"
    "   ((table (l tower) (c tower) (r tower)))))\n";

const std::string kForestDecl =
    "(declare-datatypes ((tree 0) (forest 0))\n"
    "  (((tleaf) (tnode (kids forest)))\n"
    "   ((fnil) (fcons (head tree) (tail forest)))))\n";

std::set<std::pair<std::string, std::string>> edges(const AdtGraph& g)
{
  std::set<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < g.size(); ++i)
  {
    for (std::size_t j : g.successors(i))
    {
      out.emplace(g.name(i), g.name(j));
    }
  }
  return out;
}

AdtGraph graph_of(const std::string& decl)
{
  Script s = parse_script(decl);
  return build_graph(s.terms->signature().adts());
}

}  // namespace

TEST(Graph, BlocksWorldEdges)
{
  AdtGraph g = graph_of(kBlocksDecl);
  std::set<std::pair<std::string, std::string>> expected{
      {"tower", "block"}, {"tower", "tower"}, {"config", "tower"}};
  EXPECT_EQ(edges(g), expected);
}

TEST(Graph, EnumHasNoEdges)
{
  AdtGraph g = graph_of("(declare-datatype block ((A) (B)))");
  EXPECT_TRUE(edges(g).empty());
  EXPECT_FALSE(g.on_cycle(0));
}

TEST(Graph, FiniteChain)
{
  AdtGraph g = graph_of(std::string(adteager::testing::kFiniteDecl));
  std::set<std::pair<std::string, std::string>> expected{{"rec2", "rec1"}, {"rec1", "enum"}};
  EXPECT_EQ(edges(g), expected);
  for (std::size_t i = 0; i < g.size(); ++i)
  {
    EXPECT_FALSE(g.on_cycle(i)) << g.name(i);
  }
  EXPECT_TRUE(g.reaches(g.index("rec2"), g.index("enum")));
}

TEST(MutualRecursion, Cases)
{
  AdtGraph blocks = graph_of(kBlocksDecl);
  EXPECT_FALSE(mutually_recursive(blocks, "tower", "block"));
  EXPECT_FALSE(mutually_recursive(blocks, "tower", "config"));
  EXPECT_THROW(mutually_recursive(blocks, "tower", "tower"), Error);
  AdtGraph forest = graph_of(kForestDecl);
  EXPECT_TRUE(mutually_recursive(forest, "tree", "forest"));
  EXPECT_TRUE(mutually_recursive(forest, "forest", "tree"));
}

TEST(Depths, CycleQueryAfterSkolemization)
{
  UfQuery uf = reduce(adteager::testing::flat(adteager::testing::kCycleQuery));
  EXPECT_EQ(uf.depths.at("tower"), 4u);
  EXPECT_EQ(uf.depths.at("block"), 2u);
  EXPECT_EQ(uf.stats.skolems, 4u);
}

TEST(Depths, SingleEnumVariable)
{
  AdtGraph g = graph_of("(declare-datatype block ((A) (B)))");
  DepthMap d = compute_depths(std::vector<Sort>{Sort::adt("block")}, g);
  EXPECT_EQ(d.at("block"), 1u);
}

TEST(Depths, MutualPairAddsPartnerVariables)
{
  AdtGraph g = graph_of(kForestDecl);
  std::vector<Sort> vars{Sort::adt("tree"),   Sort::adt("tree"),   Sort::adt("forest"),
                         Sort::adt("forest"), Sort::adt("forest"), Sort::boolean()};
  DepthMap d = compute_depths(vars, g);
  EXPECT_EQ(d.at("tree"), 5u);
  EXPECT_EQ(d.at("forest"), 5u);
}

TEST(Depths, SelfRecursionGetsNoBonusAndFloorIsOne)
{
  AdtGraph g = graph_of(kBlocksDecl);
  DepthMap d = compute_depths(
      std::vector<Sort>{Sort::adt("tower"), Sort::adt("tower"), Sort::adt("config")}, g);
  EXPECT_EQ(d.at("tower"), 2u);
  EXPECT_EQ(d.at("config"), 1u);
  EXPECT_EQ(d.at("block"), 1u);
  EXPECT_EQ(d.max(), 2u);
  EXPECT_EQ(format_depths(d), "block=1\ntower=2\nconfig=1\n");
}

TEST(Depths, Monotone)
{
  AdtGraph g = graph_of(kForestDecl);
  std::vector<Sort> vars;
  DepthMap before = compute_depths(vars, g);
  for (int i = 0; i < 6; ++i)
  {
    vars.push_back(Sort::adt(i % 3 == 0 ? "tree" : "forest"));
    DepthMap after = compute_depths(vars, g);
    for (const std::string& adt : after.adts)
    {
      EXPECT_GE(after.at(adt), before.at(adt));
    }
    before = after;
  }
}
