#include "causalkit/scm.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "causalkit/errors.hpp"

namespace causalkit {

namespace {

bool is_small_integer(double v) {
    return std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e9;
}

int table_index(const TableMechanism& t, std::span<const double> parents, double noise) {
    int idx = 0;
    for (std::size_t i = 0; i < t.parent_cards.size(); ++i) {
        const double v = parents[i];
        if (!is_small_integer(v) || v < 0 || v >= t.parent_cards[i]) {
            throw NumericError("table mechanism: parent value outside declared domain");
        }
        idx = idx * t.parent_cards[i] + static_cast<int>(v);
    }
    if (!is_small_integer(noise) || noise < 0 || noise >= t.noise_card) {
        throw NumericError("table mechanism: noise value outside declared domain");
    }
    return idx * t.noise_card + static_cast<int>(noise);
}

double interpolate(const AdditiveMechanism& m, double x) {
    const auto& xs = m.knot_x;
    const auto& ys = m.knot_y;
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    const std::size_t lo = hi - 1;
    const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return ys[lo] + t * (ys[hi] - ys[lo]);
}

std::size_t mechanism_arity(const Mechanism& mech) {
    return std::visit(
        [](const auto& m) -> std::size_t {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, TableMechanism>) {
                return m.parent_cards.size();
            } else if constexpr (std::is_same_v<T, LinearMechanism>) {
                return m.coefficients.size();
            } else if constexpr (std::is_same_v<T, AdditiveMechanism>) {
                return 1;
            } else if constexpr (std::is_same_v<T, SelectorMechanism>) {
                return 1;
            } else {
                return 0;
            }
        },
        mech);
}

void validate_mechanism_shape(const Mechanism& mech) {
    if (const auto* t = std::get_if<TableMechanism>(&mech)) {
        if (t->noise_card < 1) {
            throw std::invalid_argument("table mechanism: noise cardinality must be >= 1");
        }
        std::size_t cells = static_cast<std::size_t>(t->noise_card);
        for (int c : t->parent_cards) {
            if (c < 1) {
                throw std::invalid_argument("table mechanism: parent cardinality must be >= 1");
            }
            cells *= static_cast<std::size_t>(c);
        }
        if (t->outputs.size() != cells) {
            throw std::invalid_argument("table mechanism: output count must cover the full domain");
        }
    } else if (const auto* a = std::get_if<AdditiveMechanism>(&mech)) {
        if (a->knot_x.size() < 2 || a->knot_x.size() != a->knot_y.size()) {
            throw std::invalid_argument("additive mechanism: need >= 2 aligned knots");
        }
        for (std::size_t i = 1; i < a->knot_x.size(); ++i) {
            if (!(a->knot_x[i] > a->knot_x[i - 1])) {
                throw std::invalid_argument("additive mechanism: knots must be strictly increasing");
            }
        }
    } else if (const auto* s = std::get_if<SelectorMechanism>(&mech)) {
        if (s->family.empty()) {
            throw std::invalid_argument("selector mechanism: family must be non-empty");
        }
    }
}

// A noise feeding a table/selector must produce valid indices; reject the
// pairing at construction instead of failing on the first draw.
void validate_noise_against_mechanism(const NoiseSpec& noise, const Mechanism& mech,
                                      const std::string& node) {
    const auto check_indices = [&](int cardinality, const char* what) {
        if (!noise.finite()) {
            throw std::invalid_argument(node + ": " + what +
                                        " requires a finite-valued noise (bernoulli/categorical/constant)");
        }
        for (const auto& [value, prob] : noise.outcomes()) {
            (void)prob;
            if (!is_small_integer(value) || value < 0 || value >= cardinality) {
                throw std::invalid_argument(node + ": noise outcomes must index the " +
                                            std::string(what));
            }
        }
    };
    if (const auto* t = std::get_if<TableMechanism>(&mech)) {
        check_indices(t->noise_card, "table noise dimension");
    } else if (const auto* s = std::get_if<SelectorMechanism>(&mech)) {
        check_indices(static_cast<int>(s->family.size()), "selector family");
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// NoiseSpec
// ---------------------------------------------------------------------------

NoiseSpec NoiseSpec::bernoulli(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("bernoulli noise: p must lie in [0,1]");
    }
    NoiseSpec n;
    n.kind_ = NoiseKind::bernoulli;
    n.p_ = p;
    return n;
}

NoiseSpec NoiseSpec::uniform(double a, double b) {
    if (!(a < b)) {
        throw std::invalid_argument("uniform noise: requires a < b");
    }
    NoiseSpec n;
    n.kind_ = NoiseKind::uniform;
    n.a_ = a;
    n.b_ = b;
    return n;
}

NoiseSpec NoiseSpec::gaussian(double mu, double sigma) {
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("gaussian noise: sigma must be positive");
    }
    NoiseSpec n;
    n.kind_ = NoiseKind::gaussian;
    n.mu_ = mu;
    n.sigma_ = sigma;
    return n;
}

NoiseSpec NoiseSpec::categorical(std::vector<double> weights) {
    if (weights.empty()) {
        throw std::invalid_argument("categorical noise: weights must be non-empty");
    }
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) {
            throw std::invalid_argument("categorical noise: weights must be non-negative");
        }
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("categorical noise: weights must sum to 1");
    }
    NoiseSpec n;
    n.kind_ = NoiseKind::categorical;
    n.weights_ = std::move(weights);
    return n;
}

NoiseSpec NoiseSpec::constant(double value) {
    NoiseSpec n;
    n.kind_ = NoiseKind::constant;
    n.value_ = value;
    return n;
}

bool NoiseSpec::finite() const {
    return kind_ == NoiseKind::bernoulli || kind_ == NoiseKind::categorical ||
           kind_ == NoiseKind::constant;
}

std::vector<std::pair<double, double>> NoiseSpec::outcomes() const {
    switch (kind_) {
        case NoiseKind::bernoulli:
            return {{0.0, 1.0 - p_}, {1.0, p_}};
        case NoiseKind::categorical: {
            std::vector<std::pair<double, double>> out;
            for (std::size_t i = 0; i < weights_.size(); ++i) {
                if (weights_[i] > 0.0) out.push_back({static_cast<double>(i), weights_[i]});
            }
            return out;
        }
        case NoiseKind::constant:
            return {{value_, 1.0}};
        default:
            throw NumericError("continuous noise has no finite outcome list");
    }
}

double NoiseSpec::draw(const RandomStream& node_stream, std::uint64_t row) const {
    switch (kind_) {
        case NoiseKind::bernoulli:
            return node_stream.uniform01(2 * row) < p_ ? 1.0 : 0.0;
        case NoiseKind::uniform:
            return a_ + (b_ - a_) * node_stream.uniform01(2 * row);
        case NoiseKind::gaussian:
            return mu_ + sigma_ * node_stream.normal(row);
        case NoiseKind::categorical: {
            const double u = node_stream.uniform01(2 * row);
            double acc = 0.0;
            for (std::size_t i = 0; i < weights_.size(); ++i) {
                acc += weights_[i];
                if (u < acc) return static_cast<double>(i);
            }
            return static_cast<double>(weights_.size() - 1);
        }
        case NoiseKind::constant:
            return value_;
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Mechanisms
// ---------------------------------------------------------------------------

double SelectorFunction::eval(double x) const {
    switch (kind) {
        case Kind::identity:
            return x;
        case Kind::negation:
            return 1.0 - x;
        case Kind::constant:
            return a;
        case Kind::affine:
            return a * x + b;
    }
    return x;
}

double eval_mechanism(const Mechanism& mech, std::span<const double> parent_values, double noise) {
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, TableMechanism>) {
                return m.outputs[static_cast<std::size_t>(table_index(m, parent_values, noise))];
            } else if constexpr (std::is_same_v<T, LinearMechanism>) {
                double v = m.intercept;
                for (std::size_t i = 0; i < m.coefficients.size(); ++i) {
                    v += m.coefficients[i] * parent_values[i];
                }
                return m.add_noise ? v + noise : v;
            } else if constexpr (std::is_same_v<T, AdditiveMechanism>) {
                return interpolate(m, parent_values[0]) + noise;
            } else if constexpr (std::is_same_v<T, SelectorMechanism>) {
                if (!is_small_integer(noise) || noise < 0 ||
                    noise >= static_cast<double>(m.family.size())) {
                    throw NumericError("selector mechanism: noise value outside family range");
                }
                return m.family[static_cast<std::size_t>(noise)].eval(parent_values[0]);
            } else {
                return m.value;
            }
        },
        mech);
}

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

Dataset::Dataset(std::vector<std::string> columns, std::size_t rows)
    : columns_(std::move(columns)), rows_(rows) {
    std::set<std::string> seen(columns_.begin(), columns_.end());
    if (seen.size() != columns_.size()) {
        throw std::invalid_argument("Dataset: duplicate column names");
    }
    data_.assign(rows_ * columns_.size(), 0.0);
}

std::vector<double> Dataset::column(const std::string& name) const {
    const auto it = std::find(columns_.begin(), columns_.end(), name);
    if (it == columns_.end()) {
        throw std::invalid_argument("Dataset: unknown column: " + name);
    }
    const std::size_t c = static_cast<std::size_t>(it - columns_.begin());
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = at(r, c);
    return out;
}

// ---------------------------------------------------------------------------
// Intervention
// ---------------------------------------------------------------------------

Intervention Intervention::set_constant(std::string target, double value) {
    Intervention iv;
    iv.target = std::move(target);
    iv.action = Action::set_constant;
    iv.constant = value;
    return iv;
}

Intervention Intervention::replace_mechanism(std::string target, Mechanism mechanism,
                                             std::vector<std::string> parents) {
    Intervention iv;
    iv.target = std::move(target);
    iv.action = Action::replace_mechanism;
    iv.mechanism = std::move(mechanism);
    iv.parents = std::move(parents);
    return iv;
}

Intervention Intervention::replace_noise(std::string target, NoiseSpec noise) {
    Intervention iv;
    iv.target = std::move(target);
    iv.action = Action::replace_noise;
    iv.noise = std::move(noise);
    return iv;
}

// ---------------------------------------------------------------------------
// ExactDistribution
// ---------------------------------------------------------------------------

ExactDistribution::ExactDistribution(std::vector<std::string> variables,
                                     std::vector<std::vector<double>> domains,
                                     std::vector<double> table)
    : variables_(std::move(variables)), domains_(std::move(domains)), table_(std::move(table)) {
    if (variables_.size() != domains_.size()) {
        throw std::invalid_argument("ExactDistribution: one domain per variable required");
    }
    std::size_t cells = 1;
    for (const auto& d : domains_) {
        if (d.empty()) throw std::invalid_argument("ExactDistribution: empty domain");
        cells *= d.size();
    }
    if (table_.size() != cells) {
        throw std::invalid_argument("ExactDistribution: table size mismatch");
    }
    double total = 0.0;
    for (double p : table_) {
        if (!(p >= 0.0)) throw std::invalid_argument("ExactDistribution: negative mass");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("ExactDistribution: table must sum to 1 within 1e-12");
    }
    strides_.assign(variables_.size(), 1);
    for (std::size_t i = variables_.size(); i-- > 1;) {
        strides_[i - 1] = strides_[i] * domains_[i].size();
    }
}

int ExactDistribution::variable_index(const std::string& name) const {
    const auto it = std::find(variables_.begin(), variables_.end(), name);
    if (it == variables_.end()) {
        throw std::invalid_argument("ExactDistribution: unknown variable: " + name);
    }
    return static_cast<int>(it - variables_.begin());
}

std::size_t ExactDistribution::cell_index(std::span<const int> domain_indices) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        idx += strides_[i] * static_cast<std::size_t>(domain_indices[i]);
    }
    return idx;
}

std::vector<int> ExactDistribution::cell_assignment(std::size_t cell) const {
    std::vector<int> out(variables_.size());
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        out[i] = static_cast<int>((cell / strides_[i]) % domains_[i].size());
    }
    return out;
}

double ExactDistribution::prob(std::span<const int> domain_indices) const {
    return table_[cell_index(domain_indices)];
}

double ExactDistribution::probability(const std::map<std::string, double>& assignment) const {
    // -1 = free variable, otherwise the required domain index.
    std::vector<int> fixed(variables_.size(), -1);
    for (const auto& [name, value] : assignment) {
        const int v = variable_index(name);
        const auto& dom = domains_[static_cast<std::size_t>(v)];
        const auto it = std::find(dom.begin(), dom.end(), value);
        if (it == dom.end()) {
            throw std::invalid_argument("ExactDistribution: value not in domain of " + name);
        }
        fixed[static_cast<std::size_t>(v)] = static_cast<int>(it - dom.begin());
    }
    double total = 0.0;
    for (std::size_t cell = 0; cell < table_.size(); ++cell) {
        if (table_[cell] == 0.0) continue;
        bool match = true;
        for (std::size_t i = 0; i < variables_.size() && match; ++i) {
            if (fixed[i] >= 0 &&
                static_cast<int>((cell / strides_[i]) % domains_[i].size()) != fixed[i]) {
                match = false;
            }
        }
        if (match) total += table_[cell];
    }
    return total;
}

double ExactDistribution::conditional(const std::string& var, double value,
                                      const std::map<std::string, double>& given) const {
    const double pz = probability(given);
    if (pz <= 0.0) {
        throw NumericError("conditional on a zero-probability event");
    }
    auto joint = given;
    joint[var] = value;
    return probability(joint) / pz;
}

std::vector<double> causal_product_table(const ExactDistribution& dist, const Dag& graph) {
    const auto& vars = dist.variables();
    if (vars != graph.nodes()) {
        throw std::invalid_argument("causal_product_table: variable/graph mismatch");
    }
    std::vector<double> out(dist.cell_count(), 1.0);
    for (std::size_t cell = 0; cell < dist.cell_count(); ++cell) {
        const auto assignment = dist.cell_assignment(cell);
        double product = 1.0;
        for (std::size_t i = 0; i < vars.size() && product > 0.0; ++i) {
            std::map<std::string, double> given;
            for (int p : graph.parents(static_cast<int>(i))) {
                given[vars[static_cast<std::size_t>(p)]] =
                    dist.domains()[static_cast<std::size_t>(p)]
                                  [static_cast<std::size_t>(assignment[static_cast<std::size_t>(p)])];
            }
            const double pz = dist.probability(given);
            if (pz <= 0.0) {
                // Parent configuration never occurs; the joint cell has no mass.
                product = 0.0;
                break;
            }
            auto joint = given;
            joint[vars[i]] = dist.domains()[i][static_cast<std::size_t>(assignment[i])];
            product *= dist.probability(joint) / pz;
        }
        out[cell] = product;
    }
    return out;
}

std::vector<double> chain_product_table(const ExactDistribution& dist,
                                        const std::vector<std::string>& order) {
    if (order.size() != dist.variables().size()) {
        throw std::invalid_argument("chain_product_table: order must list every variable once");
    }
    std::set<std::string> seen(order.begin(), order.end());
    if (seen.size() != order.size()) {
        throw std::invalid_argument("chain_product_table: duplicate variable in order");
    }
    std::vector<double> out(dist.cell_count(), 1.0);
    for (std::size_t cell = 0; cell < dist.cell_count(); ++cell) {
        const auto assignment = dist.cell_assignment(cell);
        double product = 1.0;
        std::map<std::string, double> given;
        for (const auto& name : order) {
            const std::size_t v = static_cast<std::size_t>(dist.variable_index(name));
            const double value = dist.domains()[v][static_cast<std::size_t>(assignment[v])];
            const double pz = dist.probability(given);
            if (pz <= 0.0) {
                product = 0.0;
                break;
            }
            auto joint = given;
            joint[name] = value;
            product *= dist.probability(joint) / pz;
            given[name] = value;
        }
        out[cell] = product;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Scm
// ---------------------------------------------------------------------------

Scm::Scm(Dag graph, std::vector<NoiseSpec> noises, std::vector<Mechanism> mechanisms)
    : graph_(std::move(graph)), noises_(std::move(noises)), mechanisms_(std::move(mechanisms)) {
    const std::size_t n = graph_.node_count();
    if (noises_.size() != n || mechanisms_.size() != n) {
        throw std::invalid_argument("Scm: one noise and one mechanism per node required");
    }
    for (std::size_t i = 0; i < n; ++i) {
        validate_mechanism_shape(mechanisms_[i]);
        const std::size_t arity = mechanism_arity(mechanisms_[i]);
        const std::size_t parents = graph_.parents(static_cast<int>(i)).size();
        if (arity != parents) {
            throw std::invalid_argument("Scm: mechanism arity of " + graph_.name(static_cast<int>(i)) +
                                        " does not match its parent count");
        }
        validate_noise_against_mechanism(noises_[i], mechanisms_[i], graph_.name(static_cast<int>(i)));
    }
}

Dataset Scm::sample(std::size_t n, std::uint64_t seed) const {
    const std::size_t cols = graph_.node_count();
    Dataset out(graph_.nodes(), n);
    out.seed = seed;

    const RandomStream root = RandomStream::seeded(seed);
    std::vector<RandomStream> node_streams;
    node_streams.reserve(cols);
    for (std::size_t i = 0; i < cols; ++i) node_streams.push_back(root.substream(i));

    const std::vector<int> order = topo_order_indices(graph_);
    std::vector<double> parent_values;
    for (std::size_t row = 0; row < n; ++row) {
        for (int node : order) {
            const std::size_t i = static_cast<std::size_t>(node);
            const double u = noises_[i].draw(node_streams[i], row);
            const auto& parents = graph_.parents(node);
            parent_values.clear();
            for (int p : parents) parent_values.push_back(out.at(row, static_cast<std::size_t>(p)));
            out.at(row, i) = eval_mechanism(mechanisms_[i], parent_values, u);
        }
    }
    return out;
}

Scm Scm::intervene(const Intervention& iv) const {
    const int target = graph_.index_of(iv.target);
    const std::size_t t = static_cast<std::size_t>(target);

    std::vector<NoiseSpec> noises = noises_;
    std::vector<Mechanism> mechanisms = mechanisms_;

    switch (iv.action) {
        case Intervention::Action::replace_noise: {
            noises[t] = iv.noise;
            return Scm(graph_, std::move(noises), std::move(mechanisms));
        }
        case Intervention::Action::set_constant: {
            auto edges = graph_.named_edges();
            std::erase_if(edges, [&](const auto& e) { return e.second == iv.target; });
            mechanisms[t] = ConstantMechanism{iv.constant};
            return Scm(Dag(graph_.nodes(), edges), std::move(noises), std::move(mechanisms));
        }
        case Intervention::Action::replace_mechanism: {
            auto edges = graph_.named_edges();
            std::erase_if(edges, [&](const auto& e) { return e.second == iv.target; });
            for (const auto& p : iv.parents) {
                edges.push_back({p, iv.target});
            }
            mechanisms[t] = iv.mechanism;
            // Dag construction rejects cycles introduced by the new parent set.
            return Scm(Dag(graph_.nodes(), edges), std::move(noises), std::move(mechanisms));
        }
    }
    throw std::invalid_argument("Scm::intervene: unknown action");
}

std::vector<std::vector<std::pair<double, double>>> Scm::noise_outcomes_for_exact() const {
    std::vector<std::vector<std::pair<double, double>>> out;
    out.reserve(graph_.node_count());
    for (std::size_t i = 0; i < graph_.node_count(); ++i) {
        if (std::holds_alternative<ConstantMechanism>(mechanisms_[i])) {
            // The mechanism ignores its noise; a dummy point mass keeps the
            // enumeration exact even for continuous noise on the node.
            out.push_back({{0.0, 1.0}});
            continue;
        }
        if (std::holds_alternative<LinearMechanism>(mechanisms_[i]) ||
            std::holds_alternative<AdditiveMechanism>(mechanisms_[i])) {
            throw NumericError("exact queries require table/selector/constant mechanisms (node " +
                               graph_.name(static_cast<int>(i)) + ")");
        }
        if (!noises_[i].finite()) {
            throw NumericError("exact queries require finite noise (node " +
                               graph_.name(static_cast<int>(i)) + ")");
        }
        out.push_back(noises_[i].outcomes());
    }
    return out;
}

std::vector<std::vector<double>> Scm::finite_domains() const {
    const auto outcomes = noise_outcomes_for_exact();
    const std::vector<int> order = topo_order_indices(graph_);
    std::vector<std::vector<double>> domains(graph_.node_count());

    for (int node : order) {
        const std::size_t i = static_cast<std::size_t>(node);
        const auto& parents = graph_.parents(node);

        // Odometer over parent domains.
        std::size_t combos = 1;
        for (int p : parents) combos *= domains[static_cast<std::size_t>(p)].size();
        if (combos * outcomes[i].size() > (1u << 22)) {
            throw NumericError("exact enumeration bound exceeded");
        }

        std::set<double> values;
        std::vector<std::size_t> odo(parents.size(), 0);
        std::vector<double> parent_values(parents.size());
        for (std::size_t c = 0; c < combos; ++c) {
            for (std::size_t k = 0; k < parents.size(); ++k) {
                parent_values[k] = domains[static_cast<std::size_t>(parents[k])][odo[k]];
            }
            for (const auto& [u, prob] : outcomes[i]) {
                (void)prob;
                values.insert(eval_mechanism(mechanisms_[i], parent_values, u));
            }
            for (std::size_t k = parents.size(); k-- > 0;) {
                if (++odo[k] < domains[static_cast<std::size_t>(parents[k])].size()) break;
                odo[k] = 0;
            }
        }
        domains[i].assign(values.begin(), values.end());
    }
    return domains;
}

ExactDistribution Scm::exact_distribution() const {
    const auto outcomes = noise_outcomes_for_exact();
    const auto domains = finite_domains();
    const std::vector<int> order = topo_order_indices(graph_);
    const std::size_t n = graph_.node_count();

    std::size_t cells = 1;
    std::size_t configs = 1;
    for (std::size_t i = 0; i < n; ++i) {
        cells *= domains[i].size();
        configs *= outcomes[i].size();
        if (cells > (1u << 20) || configs > (1u << 22)) {
            throw NumericError("exact enumeration bound exceeded");
        }
    }

    std::vector<std::size_t> strides(n, 1);
    for (std::size_t i = n; i-- > 1;) strides[i - 1] = strides[i] * domains[i].size();

    std::vector<double> table(cells, 0.0);
    std::vector<std::size_t> odo(n, 0);
    std::vector<double> values(n, 0.0);
    std::vector<double> parent_values;
    for (std::size_t c = 0; c < configs; ++c) {
        double prob = 1.0;
        for (std::size_t i = 0; i < n; ++i) prob *= outcomes[i][odo[i]].second;

        std::size_t cell = 0;
        for (int node : order) {
            const std::size_t i = static_cast<std::size_t>(node);
            parent_values.clear();
            for (int p : graph_.parents(node)) parent_values.push_back(values[static_cast<std::size_t>(p)]);
            values[i] = eval_mechanism(mechanisms_[i], parent_values, outcomes[i][odo[i]].first);
            const auto& dom = domains[i];
            const std::size_t idx = static_cast<std::size_t>(
                std::lower_bound(dom.begin(), dom.end(), values[i]) - dom.begin());
            cell += strides[i] * idx;
        }
        table[cell] += prob;

        for (std::size_t k = n; k-- > 0;) {
            if (++odo[k] < outcomes[k].size()) break;
            odo[k] = 0;
        }
    }

    return ExactDistribution(graph_.nodes(), domains, std::move(table));
}

std::vector<CiCheck> Scm::verify_markov(double tolerance) const {
    const std::size_t n = graph_.node_count();
    if (n > 8) {
        throw NumericError("verify_markov: enumeration bound exceeded (more than 8 variables)");
    }
    const ExactDistribution dist = exact_distribution();

    std::vector<CiCheck> checks;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            std::vector<int> rest;
            for (std::size_t k = 0; k < n; ++k) {
                if (k != a && k != b) rest.push_back(static_cast<int>(k));
            }
            const std::size_t subsets = 1u << rest.size();
            for (std::size_t mask = 0; mask < subsets; ++mask) {
                std::vector<int> z;
                for (std::size_t k = 0; k < rest.size(); ++k) {
                    if (mask & (1u << k)) z.push_back(rest[k]);
                }
                if (!d_separated_indices(graph_, {static_cast<int>(a)}, {static_cast<int>(b)}, z)) {
                    continue;  // not implied; nothing to assert
                }

                // max over cells of |p(a,b|z) - p(a|z) p(b|z)| for p(z) > 0.
                double deviation = 0.0;
                const auto& dom_a = dist.domains()[a];
                const auto& dom_b = dist.domains()[b];

                std::size_t z_combos = 1;
                for (int v : z) z_combos *= dist.domains()[static_cast<std::size_t>(v)].size();
                std::vector<std::size_t> odo(z.size(), 0);
                for (std::size_t c = 0; c < z_combos; ++c) {
                    std::map<std::string, double> given;
                    for (std::size_t k = 0; k < z.size(); ++k) {
                        const std::size_t v = static_cast<std::size_t>(z[k]);
                        given[graph_.name(z[k])] = dist.domains()[v][odo[k]];
                    }
                    const double pz = dist.probability(given);
                    if (pz > 0.0) {
                        for (double va : dom_a) {
                            for (double vb : dom_b) {
                                auto ab = given;
                                ab[graph_.name(static_cast<int>(a))] = va;
                                ab[graph_.name(static_cast<int>(b))] = vb;
                                const double p_ab = dist.probability(ab) / pz;
                                auto ja = given;
                                ja[graph_.name(static_cast<int>(a))] = va;
                                auto jb = given;
                                jb[graph_.name(static_cast<int>(b))] = vb;
                                const double p_a = dist.probability(ja) / pz;
                                const double p_b = dist.probability(jb) / pz;
                                deviation = std::max(deviation, std::abs(p_ab - p_a * p_b));
                            }
                        }
                    }
                    for (std::size_t k = z.size(); k-- > 0;) {
                        if (++odo[k] < dist.domains()[static_cast<std::size_t>(z[k])].size()) break;
                        odo[k] = 0;
                    }
                }

                CiCheck check;
                check.a = graph_.name(static_cast<int>(a));
                check.b = graph_.name(static_cast<int>(b));
                for (int v : z) check.given.push_back(graph_.name(v));
                check.deviation = deviation;
                check.holds = deviation <= tolerance;
                checks.push_back(std::move(check));
            }
        }
    }
    return checks;
}

}  // namespace causalkit
