#include "testkit.h"

#include <algorithm>
#include <string_view>

#include "adteager/backend.h"
#include "adteager/error.h"
#include "adteager/frontend.h"
#include "adteager/harness.h"
#include "adteager/preprocess.h"
#include "support.h"

namespace adteager::testing {

namespace {

struct GenCtor
{
  std::string name;
  std::vector<std::pair<std::string, std::string>> fields;  // selector, sort
};

struct GenAdt
{
  std::string name;
  std::vector<GenCtor> ctors;
};

class Generator
{
 public:
  Generator(blocks::Prng& rng, const RandomQueryOptions& o) : rng_(rng), o_(o) {}

  std::string run()
  {
    while (true)
    {
      make_signature();
      if (inhabited())
      {
        break;
      }
    }
    std::size_t nv = 1 + pick(o_.max_vars);
    for (std::size_t i = 0; i < nv; ++i)
    {
      std::string sort = chance(8) ? "Bool" : adts_[pick(adts_.size())].name;
      vars_.emplace_back("v" + std::to_string(i), sort);
    }
    std::string out = "(set-logic QF_DT)\n(declare-datatypes (";
    for (const GenAdt& a : adts_)
    {
      out += "(" + a.name + " 0)";
    }
    out += ") (";
    for (const GenAdt& a : adts_)
    {
      out += "(";
      for (const GenCtor& c : a.ctors)
      {
        out += "(" + c.name;
        for (const auto& [sel, sort] : c.fields)
        {
          out += " (" + sel + " " + sort + ")";
        }
        out += ")";
      }
      out += ")";
    }
    out += "))\n";
    for (const auto& [name, sort] : vars_)
    {
      out += "(declare-const " + name + " " + sort + ")\n";
    }
    std::size_t asserts = 1 + pick(3);
    for (std::size_t i = 0; i < asserts; ++i)
    {
      atoms_left_ = 1 + pick(o_.max_atoms);
      out += "(assert " + formula(3) + ")\n";
    }
    out += "(check-sat)\n";
    return out;
  }

 private:
  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(rng_.below(n)); }
  bool chance(std::size_t one_in) { return rng_.below(one_in) == 0; }

  void make_signature()
  {
    adts_.clear();
    std::size_t n = 1 + pick(o_.max_adts);
    for (std::size_t a = 0; a < n; ++a)
    {
      adts_.push_back(GenAdt{"d" + std::to_string(a), {}});
    }
    for (std::size_t a = 0; a < n; ++a)
    {
      std::size_t nc = 1 + pick(o_.max_constructors);
      for (std::size_t c = 0; c < nc; ++c)
      {
        GenCtor ctor{"c" + std::to_string(a) + "_" + std::to_string(c), {}};
        std::size_t arity = pick(o_.max_arity + 1);
        for (std::size_t f = 0; f < arity; ++f)
        {
          std::string sort = chance(4) ? "Bool" : adts_[pick(n)].name;
          ctor.fields.emplace_back("s" + std::to_string(a) + "_" + std::to_string(c) + "_" +
                                       std::to_string(f),
                                   sort);
        }
        adts_[a].ctors.push_back(std::move(ctor));
      }
    }
  }

  bool inhabited() const
  {
    std::vector<bool> ok(adts_.size(), false);
    bool changed = true;
    while (changed)
    {
      changed = false;
      for (std::size_t a = 0; a < adts_.size(); ++a)
      {
        if (ok[a])
        {
          continue;
        }
        for (const GenCtor& c : adts_[a].ctors)
        {
          bool all = std::all_of(c.fields.begin(), c.fields.end(), [&](const auto& f) {
            return f.second == "Bool" || ok[std::stoul(f.second.substr(1))];
          });
          if (all)
          {
            ok[a] = changed = true;
            break;
          }
        }
      }
    }
    return std::all_of(ok.begin(), ok.end(), [](bool b) { return b; });
  }

  const GenAdt& adt(const std::string& name) const { return adts_[std::stoul(name.substr(1))]; }

  std::vector<std::string> vars_of(const std::string& sort) const
  {
    std::vector<std::string> out;
    for (const auto& [name, s] : vars_)
    {
      if (s == sort)
      {
        out.push_back(name);
      }
    }
    return out;
  }

  /// A term of `sort`: a variable, or (nested mode / no variable) an
  /// application.
  std::optional<std::string> term(const std::string& sort, int depth)
  {
    std::vector<std::string> vs = vars_of(sort);
    bool nest = o_.nested && depth > 0 && chance(3);
    if (!vs.empty() && !nest)
    {
      return vs[pick(vs.size())];
    }
    if (sort == "Bool" && o_.nested)
    {
      return chance(2) ? "true" : "false";
    }
    if (!o_.nested || sort == "Bool")
    {
      return std::nullopt;
    }
    if (depth <= 0)
    {
      for (const GenCtor& c : adt(sort).ctors)
      {
        if (c.fields.empty())
        {
          return c.name;
        }
      }
      return std::nullopt;
    }
    if (chance(2))
    {
      const GenCtor& c = adt(sort).ctors[pick(adt(sort).ctors.size())];
      return application(c, depth);
    }
    // selector whose result has `sort`
    std::vector<std::pair<std::string, std::string>> sels;  // selector, owning adt
    for (const GenAdt& a : adts_)
    {
      for (const GenCtor& c : a.ctors)
      {
        for (const auto& [sel, s] : c.fields)
        {
          if (s == sort)
          {
            sels.emplace_back(sel, a.name);
          }
        }
      }
    }
    if (sels.empty())
    {
      return term(sort, 0);
    }
    const auto& [sel, owner] = sels[pick(sels.size())];
    auto arg = term(owner, depth - 1);
    if (!arg)
    {
      return std::nullopt;
    }
    return "(" + sel + " " + *arg + ")";
  }

  std::optional<std::string> application(const GenCtor& c, int depth)
  {
    if (c.fields.empty())
    {
      return c.name;
    }
    std::string out = "(" + c.name;
    for (const auto& f : c.fields)
    {
      auto arg = term(f.second, depth - 1);
      if (!arg)
      {
        return std::nullopt;
      }
      out += " " + *arg;
    }
    return out + ")";
  }

  std::string atom()
  {
    for (int attempt = 0; attempt < 20; ++attempt)
    {
      const auto& [x, sort] = vars_[pick(vars_.size())];
      if (sort == "Bool")
      {
        if (chance(2))
        {
          return x;
        }
        continue;
      }
      const GenAdt& a = adt(sort);
      switch (pick(5))
      {
        case 0:
        case 1:
        {
          auto other = term(sort, 2);
          if (other)
          {
            return chance(2) ? "(= " + x + " " + *other + ")"
                             : "(not (= " + x + " " + *other + "))";
          }
          break;
        }
        case 2:
        {
          auto app = application(a.ctors[pick(a.ctors.size())], 2);
          if (app)
          {
            return "(= " + x + " " + *app + ")";
          }
          break;
        }
        case 3:
        {
          const GenCtor& c = a.ctors[pick(a.ctors.size())];
          if (c.fields.empty())
          {
            break;
          }
          const auto& [sel, fsort] = c.fields[pick(c.fields.size())];
          if (fsort == "Bool")
          {
            return "(" + sel + " " + x + ")";
          }
          auto lhs = term(fsort, 1);
          if (lhs)
          {
            return "(= " + *lhs + " (" + sel + " " + x + "))";
          }
          break;
        }
        default:
          return "((_ is " + a.ctors[pick(a.ctors.size())].name + ") " + x + ")";
      }
    }
    return "true";
  }

  std::string formula(int depth)
  {
    if (depth == 0 || atoms_left_ <= 1 || chance(3))
    {
      if (atoms_left_ > 0)
      {
        --atoms_left_;
      }
      return atom();
    }
    switch (pick(4))
    {
      case 0: return "(not " + formula(depth - 1) + ")";
      case 1: return "(and " + formula(depth - 1) + " " + formula(depth - 1) + ")";
      case 2: return "(or " + formula(depth - 1) + " " + formula(depth - 1) + ")";
      default: return "(=> " + formula(depth - 1) + " " + formula(depth - 1) + ")";
    }
  }

  blocks::Prng& rng_;
  const RandomQueryOptions& o_;
  std::vector<GenAdt> adts_;
  std::vector<std::pair<std::string, std::string>> vars_;
  std::size_t atoms_left_ = 0;
};

}  // namespace

std::string random_query(blocks::Prng& rng, const RandomQueryOptions& options)
{
  return Generator(rng, options).run();
}

DifferentialOutcome differential(const std::string& query, const std::string& backend_command,
                                 std::size_t max_bound, bool run_native, std::size_t max_axioms)
{
  DifferentialOutcome out;
  FlatQuery fq = flatten(desugar_ite(parse_script(query)));
  OracleResult probe = oracle_solve(fq, 0);
  out.bound = probe.required_bound;
  if (probe.verdict.answer == Answer::Sat)
  {
    out.oracle = Answer::Sat;
  }
  else if (out.bound <= max_bound)
  {
    out.oracle = oracle_solve(fq, out.bound).verdict.answer;
  }
  BackendConfig cfg{"backend", backend_command, 60.0};
  ReduceOptions options;
  options.axiom3_cap = max_axioms;
  try
  {
    out.reduced = solve_text(query, cfg, options).verdict.answer;
  }
  catch (const Error& e)
  {
    if (e.kind() != ErrorKind::ResourceLimit)
    {
      throw;
    }
    out.too_large = true;
  }
  if (run_native)
  {
    out.native = run_backend(cfg, query).answer;
  }
  return out;
}

std::vector<std::string> fuzz_seeds()
{
  std::vector<std::string> seeds{
      std::string(kCycleQuery),
      std::string(kFiniteDecl) +
          "(declare-const p rec2)(declare-const e enum)"
          "(assert (or (= (l (left p)) e) ((_ is a) (r (right p)))))(check-sat)",
      std::string(kTreeDecl) +
          "(declare-const t tree)(define-fun twice ((u tree)) tree (node u u))"
          "(assert (let ((w (twice t))) (not (= (lc w) (ite ((_ is leaf) t) t (rc t))))))"
          "(check-sat)",
      std::string(kTowerDecl) +
          "(declare-const x tower)(declare-fun f (tower) Bool)"
          "(assert (! (match x ((Empty (f x)) ((Stack h r) (= h A)))) :named m))(check-sat)",
      "(set-logic QF_UF)(declare-sort U 0)(declare-fun g (U U) U)(declare-const a U)"
      "(assert (distinct a (g a a) (g (g a a) a)))(check-sat)(exit)",
  };
  seeds.push_back(blocks::encode_query(blocks::generate_setup(3, 1), 2).text);
  return seeds;
}

std::string mutate(blocks::Prng& rng, const std::string& seed_text)
{
  static const char* kTokens[] = {"(", ")", "((", "))", "_", "is", "!", "as", "let", "match",
                                  "declare-datatypes", "declare-fun", "define-fun", "assert",
                                  "check-sat", "Bool", "Int", "par", "forall", ":named", "|a b|",
                                  "\"str\"", "#b101", "42", "-1", "=", "distinct", "ite", "=>",
                                  "algb!x", "(_ is Stack)", "(as Empty tower)", ";", "\n", " ",
                                  "((x 0))", "(declare-const z tower)"};
  std::string s = seed_text;
  std::size_t edits = 1 + rng.below(4);
  for (std::size_t e = 0; e < edits; ++e)
  {
    std::size_t pos = s.empty() ? 0 : rng.below(s.size() + 1);
    switch (rng.below(8))
    {
      case 0:  // delete a span
        if (!s.empty() && pos < s.size())
        {
          s.erase(pos, 1 + rng.below(std::min<std::size_t>(20, s.size() - pos)));
        }
        break;
      case 1:  // random byte
        s.insert(s.begin() + static_cast<std::ptrdiff_t>(pos), static_cast<char>(rng.below(256)));
        break;
      case 2:  // replace a byte
        if (pos < s.size())
        {
          s[pos] = static_cast<char>(rng.below(128));
        }
        break;
      case 3:
      case 4:  // token insertion
        s.insert(pos, std::string(" ") + kTokens[rng.below(std::size(kTokens))] + " ");
        break;
      case 5:  // duplicate a span
        if (pos < s.size())
        {
          std::size_t len = 1 + rng.below(std::min<std::size_t>(60, s.size() - pos));
          s.insert(pos, s.substr(pos, len));
        }
        break;
      case 6:  // truncate
        s.resize(pos);
        break;
      default:  // deep nesting
      {
        std::size_t depth = 1 + rng.below(3000);
        s.insert(pos, std::string(depth, '(') + "and" + std::string(rng.below(2) ? depth : 0, ')'));
        break;
      }
    }
  }
  return s;
}

}  // namespace adteager::testing
