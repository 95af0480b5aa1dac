#pragma once

#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace causalkit {

// Directed acyclic graph over named variables. Immutable after construction;
// acyclicity is checked in the constructor, so downstream code never sees a
// cyclic Dag.
class Dag {
  public:
    Dag(std::vector<std::string> nodes,
        const std::vector<std::pair<std::string, std::string>>& edges);

    std::size_t node_count() const { return nodes_.size(); }
    const std::vector<std::string>& nodes() const { return nodes_; }
    const std::string& name(int index) const { return nodes_.at(static_cast<std::size_t>(index)); }

    // Throws std::invalid_argument for unknown names.
    int index_of(const std::string& name) const;
    bool contains(const std::string& name) const;

    // Parent/child index lists, sorted by declaration order.
    const std::vector<int>& parents(int node) const { return parents_.at(static_cast<std::size_t>(node)); }
    const std::vector<int>& children(int node) const { return children_.at(static_cast<std::size_t>(node)); }
    bool has_edge(int parent, int child) const;
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }

    std::vector<std::pair<std::string, std::string>> named_edges() const;

  private:
    std::vector<std::string> nodes_;
    std::unordered_map<std::string, int> index_;
    std::vector<std::vector<int>> parents_;
    std::vector<std::vector<int>> children_;
    std::vector<std::pair<int, int>> edges_;
};

// Deterministic topological order: every edge points forward, ties broken by
// declaration order.
std::vector<int> topo_order_indices(const Dag& g);
std::vector<std::string> topo_order(const Dag& g);

// d-separation of A from B given Z, via reachability over active trails.
// Sets must be disjoint; names must exist.
bool d_separated(const Dag& g, const std::set<std::string>& a, const std::set<std::string>& b,
                 const std::set<std::string>& z);
bool d_separated_indices(const Dag& g, const std::vector<int>& a, const std::vector<int>& b,
                         const std::vector<int>& z);

// Directed graph that may contain cycles; produced by ODE-structure
// extraction only and not accepted by the SCM layer.
struct DirectedGraph {
    std::vector<std::string> nodes;
    std::vector<std::pair<int, int>> edges;  // (parent, child) indices

    bool has_edge(int parent, int child) const;
};

// Sparsity pattern of an ODE right-hand side: depends_on[i] lists the
// components j that f_i reads. Indices are 0-based and validated against the
// dimension.
struct OdeMask {
    int dimension = 0;
    std::vector<std::vector<int>> depends_on;
};

struct OdeStructure {
    DirectedGraph graph;
    std::vector<bool> self_dependent;  // diagonal dependencies, kept off the edge set
};

// Reads the causal structure off an Euler-discretised ODE: x_j -> x_i for
// every j in mask(i), j != i. Self-dependencies become per-node flags because
// the Dag consumers reject cycles.
OdeStructure from_ode_mask(const OdeMask& mask);

}  // namespace causalkit
