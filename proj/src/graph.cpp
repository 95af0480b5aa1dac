#include "causalkit/graph.hpp"

#include <algorithm>
#include <array>
#include <queue>
#include <stdexcept>

namespace causalkit {

namespace {

void check_disjoint(const std::set<std::string>& a, const std::set<std::string>& b,
                    const char* label) {
    for (const auto& name : a) {
        if (b.count(name)) {
            throw std::invalid_argument(std::string("d_separated: overlapping sets (") + label +
                                        "): " + name);
        }
    }
}

}  // namespace

Dag::Dag(std::vector<std::string> nodes,
         const std::vector<std::pair<std::string, std::string>>& edges)
    : nodes_(std::move(nodes)) {
    index_.reserve(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].empty()) {
            throw std::invalid_argument("Dag: empty node name");
        }
        if (!index_.emplace(nodes_[i], static_cast<int>(i)).second) {
            throw std::invalid_argument("Dag: duplicate node name: " + nodes_[i]);
        }
    }
    parents_.assign(nodes_.size(), {});
    children_.assign(nodes_.size(), {});

    std::set<std::pair<int, int>> seen;
    for (const auto& [from, to] : edges) {
        const int a = index_of(from);
        const int b = index_of(to);
        if (a == b) {
            throw std::invalid_argument("Dag: self-loop on " + from);
        }
        if (!seen.insert({a, b}).second) {
            continue;  // duplicate edge, keep one
        }
        edges_.push_back({a, b});
        parents_[static_cast<std::size_t>(b)].push_back(a);
        children_[static_cast<std::size_t>(a)].push_back(b);
    }
    for (auto& p : parents_) std::sort(p.begin(), p.end());
    for (auto& c : children_) std::sort(c.begin(), c.end());
    std::sort(edges_.begin(), edges_.end());

    // Kahn's algorithm; anything left with positive in-degree sits on a cycle.
    std::vector<int> in_degree(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        in_degree[i] = static_cast<int>(parents_[i].size());
    }
    std::vector<int> stack;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (in_degree[i] == 0) stack.push_back(static_cast<int>(i));
    }
    std::size_t removed = 0;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        ++removed;
        for (int c : children_[static_cast<std::size_t>(v)]) {
            if (--in_degree[static_cast<std::size_t>(c)] == 0) stack.push_back(c);
        }
    }
    if (removed != nodes_.size()) {
        throw std::invalid_argument("Dag: edge set contains a cycle");
    }
}

int Dag::index_of(const std::string& name) const {
    const auto it = index_.find(name);
    if (it == index_.end()) {
        throw std::invalid_argument("unknown node name: " + name);
    }
    return it->second;
}

bool Dag::contains(const std::string& name) const { return index_.count(name) > 0; }

bool Dag::has_edge(int parent, int child) const {
    const auto& p = parents_.at(static_cast<std::size_t>(child));
    return std::binary_search(p.begin(), p.end(), parent);
}

std::vector<std::pair<std::string, std::string>> Dag::named_edges() const {
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(edges_.size());
    for (const auto& [a, b] : edges_) {
        out.push_back({name(a), name(b)});
    }
    return out;
}

std::vector<int> topo_order_indices(const Dag& g) {
    const std::size_t n = g.node_count();
    std::vector<int> in_degree(n);
    for (std::size_t i = 0; i < n; ++i) {
        in_degree[i] = static_cast<int>(g.parents(static_cast<int>(i)).size());
    }
    // Min-heap on declaration index gives the stable tie-break.
    std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
    for (std::size_t i = 0; i < n; ++i) {
        if (in_degree[i] == 0) ready.push(static_cast<int>(i));
    }
    std::vector<int> order;
    order.reserve(n);
    while (!ready.empty()) {
        const int v = ready.top();
        ready.pop();
        order.push_back(v);
        for (int c : g.children(v)) {
            if (--in_degree[static_cast<std::size_t>(c)] == 0) ready.push(c);
        }
    }
    return order;
}

std::vector<std::string> topo_order(const Dag& g) {
    std::vector<std::string> out;
    out.reserve(g.node_count());
    for (int i : topo_order_indices(g)) out.push_back(g.name(i));
    return out;
}

bool d_separated_indices(const Dag& g, const std::vector<int>& a, const std::vector<int>& b,
                         const std::vector<int>& z) {
    const std::size_t n = g.node_count();
    std::vector<bool> in_b(n, false);
    for (int v : b) in_b[static_cast<std::size_t>(v)] = true;
    std::vector<bool> in_z(n, false);
    for (int v : z) in_z[static_cast<std::size_t>(v)] = true;

    // Ancestors of Z (including Z): colliders are active exactly there.
    std::vector<bool> anc_z(n, false);
    {
        std::vector<int> stack(z.begin(), z.end());
        for (int v : z) anc_z[static_cast<std::size_t>(v)] = true;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int p : g.parents(v)) {
                if (!anc_z[static_cast<std::size_t>(p)]) {
                    anc_z[static_cast<std::size_t>(p)] = true;
                    stack.push_back(p);
                }
            }
        }
    }

    // Reachability over (node, arrival direction) states. "up" = reached from
    // a child or as a source, "down" = reached from a parent.
    enum { kUp = 0, kDown = 1 };
    std::vector<std::array<bool, 2>> visited(n, {false, false});
    std::vector<std::pair<int, int>> stack;
    for (int v : a) {
        stack.push_back({v, kUp});
        visited[static_cast<std::size_t>(v)][kUp] = true;
    }
    while (!stack.empty()) {
        const auto [v, dir] = stack.back();
        stack.pop_back();
        if (in_b[static_cast<std::size_t>(v)]) return false;

        auto push = [&](int w, int d) {
            if (!visited[static_cast<std::size_t>(w)][d]) {
                visited[static_cast<std::size_t>(w)][d] = true;
                stack.push_back({w, d});
            }
        };

        if (dir == kUp) {
            if (!in_z[static_cast<std::size_t>(v)]) {
                for (int p : g.parents(v)) push(p, kUp);
                for (int c : g.children(v)) push(c, kDown);
            }
        } else {
            if (!in_z[static_cast<std::size_t>(v)]) {
                for (int c : g.children(v)) push(c, kDown);
            }
            if (anc_z[static_cast<std::size_t>(v)]) {
                for (int p : g.parents(v)) push(p, kUp);
            }
        }
    }
    return true;
}

bool d_separated(const Dag& g, const std::set<std::string>& a, const std::set<std::string>& b,
                 const std::set<std::string>& z) {
    check_disjoint(a, b, "A,B");
    check_disjoint(a, z, "A,Z");
    check_disjoint(b, z, "B,Z");
    auto to_indices = [&](const std::set<std::string>& names) {
        std::vector<int> out;
        out.reserve(names.size());
        for (const auto& name : names) out.push_back(g.index_of(name));
        return out;
    };
    return d_separated_indices(g, to_indices(a), to_indices(b), to_indices(z));
}

bool DirectedGraph::has_edge(int parent, int child) const {
    return std::find(edges.begin(), edges.end(), std::make_pair(parent, child)) != edges.end();
}

OdeStructure from_ode_mask(const OdeMask& mask) {
    if (mask.dimension <= 0) {
        throw std::invalid_argument("OdeMask: dimension must be positive");
    }
    if (mask.depends_on.size() != static_cast<std::size_t>(mask.dimension)) {
        throw std::invalid_argument("OdeMask: one dependency set per component required");
    }

    OdeStructure out;
    out.self_dependent.assign(static_cast<std::size_t>(mask.dimension), false);
    out.graph.nodes.reserve(static_cast<std::size_t>(mask.dimension));
    for (int i = 0; i < mask.dimension; ++i) {
        out.graph.nodes.push_back("x" + std::to_string(i + 1));
    }
    std::set<std::pair<int, int>> edges;
    for (int i = 0; i < mask.dimension; ++i) {
        for (int j : mask.depends_on[static_cast<std::size_t>(i)]) {
            if (j < 0 || j >= mask.dimension) {
                throw std::invalid_argument("OdeMask: index out of range");
            }
            if (j == i) {
                out.self_dependent[static_cast<std::size_t>(i)] = true;
            } else {
                edges.insert({j, i});  // x_j drives the future of x_i
            }
        }
    }
    out.graph.edges.assign(edges.begin(), edges.end());
    return out;
}

}  // namespace causalkit
