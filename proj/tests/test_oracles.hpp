#pragma once

// Independent test oracles. Everything here is deliberately brute-force and
// kept away from the implementation paths it checks.

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "causalkit/graph.hpp"
#include "causalkit/rng.hpp"
#include "causalkit/scm.hpp"

namespace oracle {

// Path-enumeration d-separation: enumerate every simple undirected path
// between the sets and test blocking by the textbook rules. Exponential, fine
// for <= 7 nodes.
class DsepBruteForce {
  public:
    explicit DsepBruteForce(const causalkit::Dag& g) : g_(g) {
        const std::size_t n = g.node_count();
        descendants_.assign(n, std::vector<bool>(n, false));
        for (std::size_t v = 0; v < n; ++v) {
            std::vector<int> stack{static_cast<int>(v)};
            descendants_[v][v] = true;
            while (!stack.empty()) {
                const int u = stack.back();
                stack.pop_back();
                for (int c : g.children(u)) {
                    if (!descendants_[v][static_cast<std::size_t>(c)]) {
                        descendants_[v][static_cast<std::size_t>(c)] = true;
                        stack.push_back(c);
                    }
                }
            }
        }
    }

    bool d_separated(const std::vector<int>& a, const std::vector<int>& b,
                     const std::vector<int>& z) const {
        std::set<int> zs(z.begin(), z.end());
        for (int s : a) {
            for (int t : b) {
                std::vector<int> path{s};
                std::vector<bool> on_path(g_.node_count(), false);
                on_path[static_cast<std::size_t>(s)] = true;
                if (exists_active_path(s, t, zs, path, on_path)) return false;
            }
        }
        return true;
    }

  private:
    bool blocked(const std::vector<int>& path, const std::set<int>& z) const {
        for (std::size_t i = 1; i + 1 < path.size(); ++i) {
            const int prev = path[i - 1];
            const int mid = path[i];
            const int next = path[i + 1];
            const bool collider = g_.has_edge(prev, mid) && g_.has_edge(next, mid);
            if (collider) {
                bool opened = false;
                for (int zv : z) {
                    if (descendants_[static_cast<std::size_t>(mid)][static_cast<std::size_t>(zv)]) {
                        opened = true;
                        break;
                    }
                }
                if (!opened) return true;
            } else if (z.count(mid)) {
                return true;
            }
        }
        return false;
    }

    bool exists_active_path(int current, int target, const std::set<int>& z, std::vector<int>& path,
                            std::vector<bool>& on_path) const {
        if (current == target) {
            return !blocked(path, z);
        }
        std::vector<int> neighbours = g_.parents(current);
        neighbours.insert(neighbours.end(), g_.children(current).begin(),
                          g_.children(current).end());
        for (int next : neighbours) {
            if (on_path[static_cast<std::size_t>(next)]) continue;
            path.push_back(next);
            on_path[static_cast<std::size_t>(next)] = true;
            if (exists_active_path(next, target, z, path, on_path)) return true;
            on_path[static_cast<std::size_t>(next)] = false;
            path.pop_back();
        }
        return false;
    }

    const causalkit::Dag& g_;
    std::vector<std::vector<bool>> descendants_;
};

// Random DAG over the named nodes: each forward pair (i, j), i < j in a random
// permutation, gets an edge with the given probability.
inline causalkit::Dag random_dag(const std::vector<std::string>& names, double edge_prob,
                                 causalkit::StreamCursor& cursor) {
    std::vector<std::size_t> perm(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) perm[i] = i;
    causalkit::shuffle(perm, cursor);
    std::vector<std::pair<std::string, std::string>> edges;
    for (std::size_t i = 0; i < names.size(); ++i) {
        for (std::size_t j = i + 1; j < names.size(); ++j) {
            if (cursor.uniform01() < edge_prob) {
                edges.push_back({names[perm[i]], names[perm[j]]});
            }
        }
    }
    return causalkit::Dag(names, edges);
}

// Every DAG on three labelled nodes; there are exactly 25.
inline std::vector<causalkit::Dag> all_three_node_dags(const std::vector<std::string>& names) {
    std::vector<causalkit::Dag> dags;
    const std::pair<int, int> pairs[3] = {{0, 1}, {0, 2}, {1, 2}};
    for (int s0 = 0; s0 < 3; ++s0) {
        for (int s1 = 0; s1 < 3; ++s1) {
            for (int s2 = 0; s2 < 3; ++s2) {
                const int states[3] = {s0, s1, s2};
                std::vector<std::pair<std::string, std::string>> edges;
                for (int k = 0; k < 3; ++k) {
                    if (states[k] == 1) {
                        edges.push_back({names[static_cast<std::size_t>(pairs[k].first)],
                                         names[static_cast<std::size_t>(pairs[k].second)]});
                    } else if (states[k] == 2) {
                        edges.push_back({names[static_cast<std::size_t>(pairs[k].second)],
                                         names[static_cast<std::size_t>(pairs[k].first)]});
                    }
                }
                try {
                    dags.push_back(causalkit::Dag(names, edges));
                } catch (const std::invalid_argument&) {
                    // cyclic triple, skip
                }
            }
        }
    }
    return dags;
}

// Random binary SCM on a DAG: bernoulli noises with probabilities inside
// [0.2, 0.8] and random binary tables, so degenerate (zero-probability)
// configurations cannot occur.
inline causalkit::Scm random_binary_scm(const causalkit::Dag& g, causalkit::StreamCursor& cursor) {
    using namespace causalkit;
    std::vector<NoiseSpec> noises;
    std::vector<Mechanism> mechanisms;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        noises.push_back(NoiseSpec::bernoulli(0.2 + 0.6 * cursor.uniform01()));
        TableMechanism table;
        table.noise_card = 2;
        std::size_t cells = 2;
        for (std::size_t p = 0; p < g.parents(static_cast<int>(i)).size(); ++p) {
            table.parent_cards.push_back(2);
            cells *= 2;
        }
        for (std::size_t c = 0; c < cells; ++c) {
            table.outputs.push_back(cursor.uniform01() < 0.5 ? 0.0 : 1.0);
        }
        mechanisms.push_back(std::move(table));
    }
    return Scm(g, std::move(noises), std::move(mechanisms));
}

// Kolmogorov-Smirnov uniformity test: statistic plus asymptotic p-value.
inline std::pair<double, double> ks_uniform(std::vector<double> samples) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double cdf = samples[i];
        const double upper = (static_cast<double>(i) + 1.0) / n - cdf;
        const double lower = cdf - static_cast<double>(i) / n;
        d = std::max({d, upper, lower});
    }
    const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) {
        p += 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
    }
    return {d, std::clamp(p, 0.0, 1.0)};
}

}  // namespace oracle
