#include <gtest/gtest.h>

#include <algorithm>
#include <string>

#include "adteager/backend.h"
#include "adteager/error.h"
#include "adteager/frontend.h"
#include "adteager/harness.h"
#include "adteager/reduce.h"
#include "support.h"

using namespace adteager;
using adteager::testing::flat;
using adteager::testing::kCycleQuery;
using adteager::testing::kFiniteDecl;
using adteager::testing::kTowerDecl;
using adteager::testing::kTreeDecl;

namespace {

std::vector<std::string> texts(const std::vector<Term>& terms)
{
  std::vector<std::string> out;
  for (Term t : terms)
  {
    out.push_back(to_smtlib(t));
  }
  return out;
}

const FlatLiteral& find_literal(const FlatQuery& fq, std::string_view text)
{
  for (const FlatLiteral& l : fq.literals)
  {
    if (to_smtlib(literal_term(*fq.terms, l)) == text)
    {
      return l;
    }
  }
  throw std::runtime_error("no literal " + std::string(text));
}

Term uf_var(Reducer& r, const FlatQuery& fq, std::string_view name)
{
  return r.translate(fq.terms->mk_var(name));
}

Answer z3_answer(std::string_view smt, const ReduceOptions& options = {})
{
  return solve_text(smt, adteager::testing::z3_backend(), options).verdict.answer;
}

/// |universe| by the product-of-sums formula, written out for the
/// enum/rec1/rec2 declaration.
std::uint64_t expected_size(const std::string& adt)
{
  const std::uint64_t e = 1 + 1;  // a | b
  const std::uint64_t r1 = e * e;  // j(enum, enum)
  const std::uint64_t r2 = r1 * r1;  // k(rec1, rec1)
  return adt == "enum" ? e : adt == "rec1" ? r1 : r2;
}

std::string tower_header()
{
  return std::string(kTowerDecl) +
         "(declare-const x tower)(declare-const y tower)(declare-const r tower)"
         "(declare-const a block)";
}

}  // namespace

TEST(RuleA, StackConstructor)
{
  FlatQuery fq = flat(tower_header() + "(assert (= x (Stack a r)))");
  Reducer red(fq);
  EXPECT_EQ(texts(red.rule_a(find_literal(fq, "(= x (Stack a r))"))),
            (std::vector<std::string>{"(= (Stack a r) x)", "(algb!is-Stack x)", "(= (top x) a)",
                                      "(= (rest x) r)"}));
}

TEST(RuleA, ConstantConstructor)
{
  FlatQuery fq = flat(tower_header() + "(assert (= x Empty))");
  Reducer red(fq);
  EXPECT_EQ(texts(red.rule_a(find_literal(fq, "(= x Empty)"))),
            (std::vector<std::string>{"(= Empty x)", "(algb!is-Empty x)"}));
}

TEST(RuleA, RecordConstructor)
{
  FlatQuery fq = flat(std::string(kFiniteDecl) +
                      "(declare-const t rec1)(declare-const e1 enum)(declare-const e2 enum)"
                      "(assert (= t (j e1 e2)))");
  Reducer red(fq);
  EXPECT_EQ(texts(red.rule_a(find_literal(fq, "(= t (j e1 e2))"))),
            (std::vector<std::string>{"(= (j e1 e2) t)", "(algb!is-j t)", "(= (l t) e1)",
                                      "(= (r t) e2)"}));
}

TEST(RuleB, RestSelector)
{
  FlatQuery fq = flat(tower_header() + "(assert (= y (rest x)))");
  Reducer red(fq);
  RuleB b = red.rule_b(find_literal(fq, "(= y (rest x))"));
  EXPECT_EQ(to_smtlib(b.literal), "(= y (rest x))");
  EXPECT_EQ(to_smtlib(b.expansion),
            "(=> (algb!is-Stack x) (and (= (Stack algb!sk!0 algb!sk!1) x) "
            "(= (top x) algb!sk!0) (= (rest x) algb!sk!1)))");
  ASSERT_EQ(b.skolems.size(), 2u);
  EXPECT_EQ(b.skolems[0].sort(), Sort::uninterpreted("block"));
  EXPECT_EQ(b.skolems[1].sort(), Sort::uninterpreted("tower"));
}

TEST(RuleB, UnarySelectorHasOneSkolem)
{
  FlatQuery fq = flat(
      "(declare-datatype nat ((zero) (succ (pred nat))))"
      "(declare-const n nat)(declare-const m nat)(assert (= m (pred n)))");
  Reducer red(fq);
  RuleB b = red.rule_b(find_literal(fq, "(= m (pred n))"));
  EXPECT_EQ(b.skolems.size(), 1u);
}

TEST(RuleB, SkolemsSharedPerVariableAndConstructor)
{
  FlatQuery fq = flat(tower_header() + "(assert (= y (rest x)))(assert (= a (top x)))");
  Reducer red(fq);
  RuleB first = red.rule_b(find_literal(fq, "(= y (rest x))"));
  RuleB second = red.rule_b(find_literal(fq, "(= a (top x))"));
  EXPECT_EQ(first.expansion, second.expansion);
  EXPECT_EQ(first.skolems, second.skolems);
  UfQuery uf = reduce(fq);
  EXPECT_EQ(uf.stats.skolems, 2u);
}

TEST(Axiom1, Tower)
{
  FlatQuery fq = flat(tower_header() + "(assert (and (= x x) (= a a)))");
  Reducer red(fq);
  EXPECT_EQ(to_smtlib(red.axiom1(uf_var(red, fq, "x"))),
            "(or (and (algb!is-Empty x) (not (algb!is-Stack x))) "
            "(and (algb!is-Stack x) (not (algb!is-Empty x))))");
  EXPECT_EQ(to_smtlib(red.axiom1(uf_var(red, fq, "a"))),
            "(or (and (algb!is-A a) (not (algb!is-B a))) (and (algb!is-B a) (not (algb!is-A a))))");
}

TEST(Axiom1, SingleConstructor)
{
  FlatQuery fq = flat(std::string(kFiniteDecl) + "(declare-const t rec1)(assert (= t t))");
  Reducer red(fq);
  EXPECT_EQ(to_smtlib(red.axiom1(uf_var(red, fq, "t"))), "(algb!is-j t)");
}

TEST(Axiom2, Constants)
{
  FlatQuery tq = flat(tower_header() +
                      "(declare-datatype pair ((mkpair (fst block) (snd block))))"
                      "(declare-const p pair)(assert (and (= x x) (= a a) (= p p)))");
  Reducer red(tq);
  EXPECT_EQ(texts(red.axiom2(uf_var(red, tq, "x"))),
            std::vector<std::string>{"(= (algb!is-Empty x) (= Empty x))"});
  EXPECT_EQ(texts(red.axiom2(uf_var(red, tq, "a"))),
            (std::vector<std::string>{"(= (algb!is-A a) (= A a))", "(= (algb!is-B a) (= B a))"}));
  EXPECT_TRUE(red.axiom2(uf_var(red, tq, "p")).empty());
}

TEST(Axiom3, TowerDepthOne)
{
  FlatQuery fq = flat(tower_header() + "(assert (and (= x x) (= a a)))");
  Reducer red(fq);
  EXPECT_EQ(texts(red.axiom3(uf_var(red, fq, "x"), 1)),
            std::vector<std::string>{"(=> (algb!is-Stack x) (not (= (rest x) x)))"});
  EXPECT_TRUE(red.axiom3(uf_var(red, fq, "a"), 5).empty());
}

TEST(Axiom3, BinaryTreeCount)
{
  FlatQuery fq = flat(std::string(kTreeDecl) + "(declare-const t tree)(assert (= t t))");
  Reducer red(fq);
  Term t = uf_var(red, fq, "t");
  for (std::size_t k = 1; k <= 10; ++k)
  {
    EXPECT_EQ(red.axiom3(t, k).size(), (std::size_t{1} << (k + 1)) - 2) << "k=" << k;
  }
}

TEST(Axiom3, CapIsEnforced)
{
  ReduceOptions opts;
  opts.axiom3_cap = 10;
  FlatQuery fq = flat(std::string(kTreeDecl) +
                      "(declare-const t tree)(declare-const u tree)(declare-const v tree)"
                      "(declare-const w tree)(assert (distinct t u v w))");
  try
  {
    reduce(fq, opts);
    FAIL();
  }
  catch (const Error& e)
  {
    EXPECT_EQ(e.kind(), ErrorKind::ResourceLimit);
  }
}

TEST(Universe, PaperSizes)
{
  Script s = parse_script(std::string(kFiniteDecl) + std::string(kTowerDecl));
  const AdtSignature& adts = s.terms->signature().adts();
  UniverseInfo info = universe_info(adts, build_graph(adts));
  for (const char* adt : {"enum", "rec1", "rec2"})
  {
    const UniverseEntry& e = info.at(adt);
    EXPECT_TRUE(e.finite) << adt;
    EXPECT_EQ(e.size, expected_size(adt)) << adt;
    EXPECT_TRUE(e.enumerated);
    EXPECT_EQ(e.enumeration.size(), e.size);
    std::vector<NormalTerm> sorted = e.enumeration;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(std::adjacent_find(sorted.begin(), sorted.end()), sorted.end());
  }
  EXPECT_EQ(info.at("enum").size, 2u);
  EXPECT_EQ(info.at("rec1").size, 4u);
  EXPECT_EQ(info.at("rec2").size, 16u);
  EXPECT_FALSE(info.at("tower").finite);
  EXPECT_TRUE(info.at("block").finite);
}

TEST(Universe, BoolFieldsAndUninterpretedSorts)
{
  Script s = parse_script(
      "(declare-sort U 0)"
      "(declare-datatypes ((flags 0) (wrap 0)) (((fl (f1 Bool) (f2 Bool) (f3 Bool))) ((w (un U)))))");
  const AdtSignature& adts = s.terms->signature().adts();
  UniverseInfo info = universe_info(adts, build_graph(adts));
  EXPECT_EQ(info.at("flags").size, 8u);
  EXPECT_FALSE(info.at("wrap").finite);
}

TEST(Universe, EnumInstantiation)
{
  FlatQuery fq = flat(std::string(kFiniteDecl) +
                      "(declare-const e enum)(declare-const f enum)(assert (= e f))");
  Reducer red(fq);
  Reducer::Universe u = red.instantiate_universe("enum", {uf_var(red, fq, "e"), uf_var(red, fq, "f")});
  ASSERT_EQ(u.constants.size(), 2u);
  std::vector<std::string> a = texts(u.assertions);
  EXPECT_EQ(a.front(), "(distinct algb!u!enum!0 algb!u!enum!1)");
  EXPECT_NE(std::find(a.begin(), a.end(), "(or (= e algb!u!enum!0) (= e algb!u!enum!1))"), a.end());
  EXPECT_NE(std::find(a.begin(), a.end(), "(or (= f algb!u!enum!0) (= f algb!u!enum!1))"), a.end());
}

TEST(Universe, Rec1Instantiation)
{
  FlatQuery fq = flat(std::string(kFiniteDecl) + "(declare-const t rec1)(assert (= t t))");
  Reducer red(fq);
  Reducer::Universe u = red.instantiate_universe("rec1", {});
  EXPECT_EQ(u.constants.size(), 4u);
  std::vector<std::string> a = texts(u.assertions);
  for (Term c : u.constants)
  {
    std::string name = to_smtlib(c);
    auto mentions = [&](const std::string& needle) {
      return std::any_of(a.begin(), a.end(), [&](const std::string& s) {
        return s.find(needle) != std::string::npos;
      });
    };
    EXPECT_TRUE(mentions("(l " + name + ")")) << name;
    EXPECT_TRUE(mentions("(r " + name + ")")) << name;
  }
  EXPECT_NE(std::find(a.begin(), a.end(),
                      "(distinct algb!u!rec1!0 algb!u!rec1!1 algb!u!rec1!2 algb!u!rec1!3)"),
            a.end());
}

TEST(Universe, NoVariablesMeansNoMembership)
{
  FlatQuery fq = flat(std::string(kFiniteDecl) + "(declare-const t rec1)(assert (= t t))");
  Reducer red(fq);
  Reducer::Universe u = red.instantiate_universe("enum", {});
  std::vector<std::string> a = texts(u.assertions);
  EXPECT_EQ(u.constants.size(), 2u);
  EXPECT_TRUE(std::none_of(a.begin(), a.end(),
                           [](const std::string& s) { return s.rfind("(or", 0) == 0; }));
}

TEST(Universe, CapExceededIsResourceLimit)
{
  std::string fields;
  for (int i = 0; i < 13; ++i)
  {
    fields += " (g" + std::to_string(i) + " Bool)";
  }
  FlatQuery fq = flat("(declare-datatype big ((mk" + fields + ")))(declare-const v big)(assert (= v v))");
  try
  {
    reduce(fq);
    FAIL();
  }
  catch (const Error& e)
  {
    EXPECT_EQ(e.kind(), ErrorKind::ResourceLimit);
  }
  ReduceOptions opts;
  opts.universe_cap = 10000;
  EXPECT_NO_THROW(reduce(fq, opts));
}

TEST(Reduce, Invariants)
{
  for (std::string q : {std::string(kCycleQuery),
                        tower_header() + "(assert (or (= x (Stack a (rest y))) ((_ is Empty) (rest x))))",
                        std::string(kTreeDecl) + "(declare-const t tree)(declare-const u tree)"
                                                 "(assert (= t (node (lc u) (rc (rc t)))))"})
  {
    FlatQuery fq = flat(q);
    UfQuery uf = reduce(fq);
    std::size_t adt_vars = fq.adt_vars().size() + uf.stats.skolems;
    EXPECT_EQ(uf.stats.axiom1, adt_vars) << q;
    EXPECT_GE(uf.stats.variables, fq.adt_vars().size());
    EXPECT_EQ(print_uf_script(uf.script), print_uf_script(reduce(fq).script));
    EXPECT_TRUE(uf.script.terms->signature().adts().empty());
  }
}

class ReduceWithZ3 : public ::testing::Test
{
 protected:
  void SetUp() override
  {
    if (!adteager::testing::have_z3())
    {
      GTEST_SKIP() << "z3 not available";
    }
  }
};

TEST_F(ReduceWithZ3, CycleQueryIsUnsat)
{
  EXPECT_EQ(z3_answer(kCycleQuery), Answer::Unsat);
}

TEST_F(ReduceWithZ3, CycleQuerySatWithoutAcyclicity)
{
  ReduceOptions opts;
  opts.acyclicality = false;
  EXPECT_EQ(z3_answer(kCycleQuery, opts), Answer::Sat);
}

TEST_F(ReduceWithZ3, Reflexivity)
{
  EXPECT_EQ(z3_answer(tower_header() + "(assert (= x x))"), Answer::Sat);
}

TEST_F(ReduceWithZ3, TestersExclusive)
{
  EXPECT_EQ(z3_answer(tower_header() + "(assert (and ((_ is Empty) x) ((_ is Stack) x)))"),
            Answer::Unsat);
}

TEST_F(ReduceWithZ3, FiniteUniverseForcesCollision)
{
  EXPECT_EQ(z3_answer(std::string(kFiniteDecl) +
                      "(declare-const p enum)(declare-const q enum)(declare-const s enum)"
                      "(assert (distinct p q s))"),
            Answer::Unsat);
  EXPECT_EQ(z3_answer(std::string(kFiniteDecl) +
                      "(declare-const p enum)(declare-const q enum)(assert (distinct p q))"),
            Answer::Sat);
}

TEST_F(ReduceWithZ3, MisappliedSelectorStaysInFiniteUniverse)
{
  // s of a non-k value is still one of the two enum values.
  const std::string decl =
      "(declare-datatypes ((e 0) (w 0)) (((ea) (eb)) ((k (s e)) (none))))"
      "(declare-const x w)(declare-const p e)(declare-const q e)";
  EXPECT_EQ(z3_answer(decl + "(assert ((_ is none) x))(assert (distinct p q))"
                             "(assert (not (= (s x) p)))(assert (not (= (s x) q)))"),
            Answer::Unsat);
  EXPECT_EQ(z3_answer(decl + "(assert ((_ is none) x))(assert (not (= (s x) p)))"), Answer::Sat);
}
