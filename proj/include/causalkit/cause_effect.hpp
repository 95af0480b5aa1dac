#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "causalkit/stats.hpp"

namespace causalkit {

enum class Direction { x_to_y, y_to_x, undecided };

std::string direction_name(Direction d);

struct DirectionVerdict {
    Direction verdict = Direction::undecided;
    double anm_p_forward = std::numeric_limits<double>::quiet_NaN();
    double anm_p_backward = std::numeric_limits<double>::quiet_NaN();
    double igci_score = std::numeric_limits<double>::quiet_NaN();
    std::string method;
};

struct AnmConfig {
    double alpha = 0.05;            // residual-independence decision level
    double train_fraction = 0.5;    // regression fit on this share, HSIC on the rest
    double ridge_scale = 1e-3;      // ridge = ridge_scale * n_train
    int permutations = 500;
    std::size_t max_samples = 1000; // larger inputs are subsampled deterministically
    std::uint64_t seed = 1;
    KernelSpec kernel{};
};

// Fits y = f(x) + r and x = g(y) + r on a train/test split and tests the test
// residuals against the test inputs with HSIC. XtoY iff the forward fit looks
// independent (p > alpha), the backward fit does not (p < alpha), and the
// forward p dominates; symmetric for YtoX; otherwise undecided.
DirectionVerdict anm_direction(std::span<const double> x, std::span<const double> y,
                               const AnmConfig& config = {});

struct IgciConfig {
    double threshold = 0.01;            // |score| below this is undecided
    double max_skipped_fraction = 0.2;  // degenerate-increment pairs tolerated
};

// Slope-based score on min-max normalised data: mean of log(|dy|/dx) over
// consecutive sorted-by-x pairs. Negative favours x -> y.
DirectionVerdict igci_direction(std::span<const double> x, std::span<const double> y,
                                const IgciConfig& config = {});

// Raw slope score plus the fraction of skipped (zero-increment) pairs.
std::pair<double, double> igci_slope_score(std::span<const double> x, std::span<const double> y);

enum class DiscoveryMethod { anm, igci };

struct LabeledPair {
    std::string id;
    std::vector<double> x;
    std::vector<double> y;
    Direction truth = Direction::x_to_y;
};

struct DiscoverySummary {
    std::size_t total = 0;
    std::size_t decided = 0;
    std::size_t correct = 0;
    double accuracy = 0.0;       // correct / decided
    double decision_rate = 0.0;  // decided / total
    std::vector<std::pair<std::string, DirectionVerdict>> verdicts;
};

DiscoverySummary batch_discover(const std::vector<LabeledPair>& pairs, DiscoveryMethod method,
                                const AnmConfig& anm_config = {}, const IgciConfig& igci_config = {});

}  // namespace causalkit
