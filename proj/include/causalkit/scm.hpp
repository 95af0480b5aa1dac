#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "causalkit/graph.hpp"
#include "causalkit/rng.hpp"

namespace causalkit {

// ---------------------------------------------------------------------------
// Noise
// ---------------------------------------------------------------------------

enum class NoiseKind { bernoulli, uniform, gaussian, categorical, constant };

class NoiseSpec {
  public:
    static NoiseSpec bernoulli(double p);
    static NoiseSpec uniform(double a, double b);
    static NoiseSpec gaussian(double mu, double sigma);
    static NoiseSpec categorical(std::vector<double> weights);
    static NoiseSpec constant(double value);

    NoiseKind kind() const { return kind_; }
    double p() const { return p_; }
    double a() const { return a_; }
    double b() const { return b_; }
    double mu() const { return mu_; }
    double sigma() const { return sigma_; }
    double value() const { return value_; }
    const std::vector<double>& weights() const { return weights_; }

    bool finite() const;

    // (value, probability) pairs; throws NumericError for continuous noise.
    // Zero-weight categorical outcomes are dropped.
    std::vector<std::pair<double, double>> outcomes() const;

    // Deterministic draw for one row: consumes counters 2*row and 2*row+1 of
    // the node's stream, so every noise kind has the same counter footprint.
    double draw(const RandomStream& node_stream, std::uint64_t row) const;

  private:
    NoiseSpec() = default;

    NoiseKind kind_ = NoiseKind::constant;
    double p_ = 0, a_ = 0, b_ = 0, mu_ = 0, sigma_ = 1, value_ = 0;
    std::vector<double> weights_;
};

// ---------------------------------------------------------------------------
// Mechanisms
// ---------------------------------------------------------------------------

// Finite lookup over parent values x noise values. Parents and noise must
// evaluate to integers inside the declared cardinalities; outputs are listed
// row-major with the noise index fastest.
struct TableMechanism {
    std::vector<int> parent_cards;
    int noise_card = 1;
    std::vector<double> outputs;
};

struct LinearMechanism {
    std::vector<double> coefficients;
    double intercept = 0.0;
    bool add_noise = true;
};

// Single-parent tabulated function with linear interpolation between knots
// (clamped outside), plus additive noise.
struct AdditiveMechanism {
    std::vector<double> knot_x;
    std::vector<double> knot_y;
};

struct SelectorFunction {
    enum class Kind { identity, negation, constant, affine };
    Kind kind = Kind::identity;
    double a = 1.0;  // affine slope / constant value
    double b = 0.0;  // affine intercept

    double eval(double x) const;
};

// The noise picks one function from a finite family and applies it to the
// single parent.
struct SelectorMechanism {
    std::vector<SelectorFunction> family;
};

struct ConstantMechanism {
    double value = 0.0;
};

using Mechanism =
    std::variant<TableMechanism, LinearMechanism, AdditiveMechanism, SelectorMechanism,
                 ConstantMechanism>;

double eval_mechanism(const Mechanism& mech, std::span<const double> parent_values, double noise);

// ---------------------------------------------------------------------------
// Datasets
// ---------------------------------------------------------------------------

class Dataset {
  public:
    Dataset() = default;
    Dataset(std::vector<std::string> columns, std::size_t rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return columns_.size(); }
    const std::vector<std::string>& columns() const { return columns_; }

    double& at(std::size_t row, std::size_t col) { return data_[row * columns_.size() + col]; }
    double at(std::size_t row, std::size_t col) const { return data_[row * columns_.size() + col]; }

    std::vector<double> column(const std::string& name) const;
    const std::vector<double>& raw() const { return data_; }

    std::optional<std::uint64_t> seed;

    bool operator==(const Dataset& other) const {
        return columns_ == other.columns_ && rows_ == other.rows_ && data_ == other.data_;
    }

  private:
    std::vector<std::string> columns_;
    std::size_t rows_ = 0;
    std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Interventions
// ---------------------------------------------------------------------------

struct Intervention {
    enum class Action { set_constant, replace_mechanism, replace_noise };

    static Intervention set_constant(std::string target, double value);
    static Intervention replace_mechanism(std::string target, Mechanism mechanism,
                                          std::vector<std::string> parents);
    static Intervention replace_noise(std::string target, NoiseSpec noise);

    std::string target;
    Action action = Action::set_constant;
    double constant = 0.0;
    Mechanism mechanism = ConstantMechanism{};
    std::vector<std::string> parents;
    NoiseSpec noise = NoiseSpec::constant(0.0);
};

// ---------------------------------------------------------------------------
// Exact distributions
// ---------------------------------------------------------------------------

// Joint probability table over the finite product domain of an SCM's
// variables. Cell order is row-major in declaration order of the variables,
// with the last variable's domain index fastest.
class ExactDistribution {
  public:
    ExactDistribution(std::vector<std::string> variables, std::vector<std::vector<double>> domains,
                      std::vector<double> table);

    const std::vector<std::string>& variables() const { return variables_; }
    const std::vector<std::vector<double>>& domains() const { return domains_; }
    const std::vector<double>& table() const { return table_; }

    int variable_index(const std::string& name) const;
    std::size_t cell_count() const { return table_.size(); }

    // Flattened cell index from per-variable domain indices.
    std::size_t cell_index(std::span<const int> domain_indices) const;
    std::vector<int> cell_assignment(std::size_t cell) const;

    double prob(std::span<const int> domain_indices) const;

    // Marginal probability of a partial assignment given by variable name ->
    // value. Values must belong to the variable's domain.
    double probability(const std::map<std::string, double>& assignment) const;

    // p(var = value | given); throws NumericError if the conditioning event
    // has zero probability.
    double conditional(const std::string& var, double value,
                       const std::map<std::string, double>& given) const;

  private:
    std::vector<std::string> variables_;
    std::vector<std::vector<double>> domains_;
    std::vector<double> table_;
    std::vector<std::size_t> strides_;
};

// Joint table rebuilt as the product of causal conditionals p(X_i | PA_i)
// read off `dist` (the disentangled factorization).
std::vector<double> causal_product_table(const ExactDistribution& dist, const Dag& graph);

// Joint table rebuilt from the chain rule along an arbitrary variable order
// (an entangled factorization when the order disagrees with the graph).
std::vector<double> chain_product_table(const ExactDistribution& dist,
                                        const std::vector<std::string>& order);

// One conditional-independence check implied by d-separation.
struct CiCheck {
    std::string a;
    std::string b;
    std::vector<std::string> given;
    bool holds = false;
    double deviation = 0.0;
};

// ---------------------------------------------------------------------------
// Structural causal model
// ---------------------------------------------------------------------------

class Scm {
  public:
    // Mechanism/noise lists are aligned with the graph's node declaration
    // order; arities are validated against the graph's parent sets.
    Scm(Dag graph, std::vector<NoiseSpec> noises, std::vector<Mechanism> mechanisms);

    const Dag& graph() const { return graph_; }
    const NoiseSpec& noise(int node) const { return noises_.at(static_cast<std::size_t>(node)); }
    const Mechanism& mechanism(int node) const {
        return mechanisms_.at(static_cast<std::size_t>(node));
    }

    // Ancestral sampling: all noises drawn from per-node substreams keyed by
    // (seed, node index), assignments evaluated in topological order, columns
    // emitted in declaration order. Bit-identical for identical arguments.
    Dataset sample(std::size_t n, std::uint64_t seed) const;

    // Returns a new model; the receiver is unchanged.
    Scm intervene(const Intervention& iv) const;

    // Exact joint by summation over all noise configurations. Requires finite
    // noises and finite-domain mechanisms (table / selector / constant).
    ExactDistribution exact_distribution() const;

    // Evaluates every d-separation-implied CI over singleton pairs with all
    // conditioning subsets. Only implied statements are reported.
    std::vector<CiCheck> verify_markov(double tolerance = 1e-10) const;

    // Finite per-node value domains, in declaration order.
    std::vector<std::vector<double>> finite_domains() const;

  private:
    Dag graph_;
    std::vector<NoiseSpec> noises_;
    std::vector<Mechanism> mechanisms_;

    std::vector<std::vector<std::pair<double, double>>> noise_outcomes_for_exact() const;
};

}  // namespace causalkit
