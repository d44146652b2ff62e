#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "adteager/ir.h"

namespace adteager {

/// Datatype reference graph: A -> B iff a constructor of A has a selector of
/// sort B. Nodes are numbered in declaration order.
class AdtGraph
{
 public:
  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t node) const { return names_.at(node); }
  std::size_t index(std::string_view name) const;

  const std::vector<std::size_t>& successors(std::size_t node) const { return edges_.at(node); }
  bool has_edge(std::size_t from, std::size_t to) const;
  /// Reachability through at least one edge.
  bool reaches(std::size_t from, std::size_t to) const { return reach_.at(from).at(to); }
  bool on_cycle(std::size_t node) const { return reaches(node, node); }

 private:
  friend AdtGraph build_graph(const AdtSignature& adts);

  std::vector<std::string> names_;
  std::vector<std::vector<std::size_t>> edges_;
  std::vector<std::vector<bool>> reach_;
};

AdtGraph build_graph(const AdtSignature& adts);

/// True iff `a` and `b` reach each other. Requires a != b.
bool mutually_recursive(const AdtGraph& graph, std::string_view a, std::string_view b);

/// Per-datatype acyclicality depth, indexed like the graph.
struct DepthMap
{
  std::vector<std::string> adts;
  std::vector<std::size_t> k;

  std::size_t at(std::string_view adt) const;
  std::size_t max() const;
};

/// k_A = number of variables of sort A plus the variables of every sort
/// mutually recursive with A; at least 1.
DepthMap compute_depths(const std::vector<Term>& vars, const AdtGraph& graph);
DepthMap compute_depths(const std::vector<Sort>& var_sorts, const AdtGraph& graph);

/// One "adt=k" line per datatype.
std::string format_depths(const DepthMap& depths);

}  // namespace adteager
