#include "adteager/depth.h"

#include <algorithm>

#include "adteager/error.h"

namespace adteager {

std::size_t AdtGraph::index(std::string_view name) const
{
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end())
  {
    throw Error(ErrorKind::Invalid, "depth", "unknown datatype '" + std::string(name) + "'");
  }
  return static_cast<std::size_t>(it - names_.begin());
}

bool AdtGraph::has_edge(std::size_t from, std::size_t to) const
{
  const auto& out = edges_.at(from);
  return std::binary_search(out.begin(), out.end(), to);
}

AdtGraph build_graph(const AdtSignature& adts)
{
  AdtGraph g;
  std::size_t n = adts.datatypes().size();
  g.edges_.resize(n);
  for (std::size_t a = 0; a < n; ++a)
  {
    const Datatype& dt = adts.datatype(a);
    g.names_.push_back(dt.name);
    for (const Constructor& c : dt.constructors)
    {
      for (const Selector& s : c.selectors)
      {
        if (s.sort.is_adt())
        {
          g.edges_[a].push_back(*adts.find(s.sort.name()));
        }
      }
    }
    std::sort(g.edges_[a].begin(), g.edges_[a].end());
    g.edges_[a].erase(std::unique(g.edges_[a].begin(), g.edges_[a].end()), g.edges_[a].end());
  }
  g.reach_.assign(n, std::vector<bool>(n, false));
  for (std::size_t a = 0; a < n; ++a)
  {
    std::vector<std::size_t> stack = g.edges_[a];
    while (!stack.empty())
    {
      std::size_t b = stack.back();
      stack.pop_back();
      if (g.reach_[a][b])
      {
        continue;
      }
      g.reach_[a][b] = true;
      for (std::size_t c : g.edges_[b])
      {
        stack.push_back(c);
      }
    }
  }
  return g;
}

bool mutually_recursive(const AdtGraph& graph, std::string_view a, std::string_view b)
{
  std::size_t i = graph.index(a);
  std::size_t j = graph.index(b);
  if (i == j)
  {
    throw Error(ErrorKind::Invalid, "depth", "mutually_recursive: identical datatypes");
  }
  return graph.reaches(i, j) && graph.reaches(j, i);
}

std::size_t DepthMap::at(std::string_view adt) const
{
  for (std::size_t i = 0; i < adts.size(); ++i)
  {
    if (adts[i] == adt)
    {
      return k[i];
    }
  }
  throw Error(ErrorKind::Invalid, "depth", "no depth for '" + std::string(adt) + "'");
}

std::size_t DepthMap::max() const
{
  return k.empty() ? 0 : *std::max_element(k.begin(), k.end());
}

DepthMap compute_depths(const std::vector<Term>& vars, const AdtGraph& graph)
{
  std::vector<Sort> sorts;
  sorts.reserve(vars.size());
  for (Term v : vars)
  {
    sorts.push_back(v.sort());
  }
  return compute_depths(sorts, graph);
}

DepthMap compute_depths(const std::vector<Sort>& var_sorts, const AdtGraph& graph)
{
  std::size_t n = graph.size();
  std::vector<std::size_t> count(n, 0);
  for (const Sort& s : var_sorts)
  {
    if (s.is_adt())
    {
      ++count[graph.index(s.name())];
    }
  }
  DepthMap depths;
  for (std::size_t a = 0; a < n; ++a)
  {
    std::size_t k = count[a];
    for (std::size_t b = 0; b < n; ++b)
    {
      if (b != a && graph.reaches(a, b) && graph.reaches(b, a))
      {
        k += count[b];
      }
    }
    depths.adts.push_back(graph.name(a));
    depths.k.push_back(std::max<std::size_t>(k, 1));
  }
  return depths;
}

std::string format_depths(const DepthMap& depths)
{
  std::string out;
  for (std::size_t i = 0; i < depths.adts.size(); ++i)
  {
    out += depths.adts[i] + "=" + std::to_string(depths.k[i]) + "\n";
  }
  return out;
}

}  // namespace adteager
