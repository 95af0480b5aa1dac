#pragma once

#include <cstdint>
#include <vector>

namespace causalkit {

enum class SslDirection { causal, anticausal };

struct SslConfig {
    // Anticausal generator: Y ~ Bern(0.5), X | Y ~ N(+-mu, sigma_anticausal^2).
    double mu = 2.0;
    double sigma_anticausal = 2.0;
    // Causal generator: X ~ N(0, 1), Y = 1[X > theta] flipped w.p. epsilon.
    double theta = 0.0;
    double epsilon = 0.1;
    int n_test = 2000;
    int n_labeled = 4;
    int n_unlabeled = 1000;
    int rounds = 10;
};

struct SslTask {
    SslDirection direction = SslDirection::anticausal;
    std::vector<double> labeled_x;
    std::vector<int> labeled_y;
    std::vector<double> unlabeled_x;
    std::vector<double> test_x;
    std::vector<int> test_y;
};

// Labeled, unlabeled and test sets come from disjoint substreams; labeled
// draws are patched deterministically so both classes appear.
SslTask generate_ssl_task(SslDirection direction, int n_labeled, int n_unlabeled,
                          std::uint64_t seed, const SslConfig& config = {});

struct SelfTrainOutcome {
    double supervised_accuracy = 0.0;
    double ssl_accuracy = 0.0;
};

// Baseline: nearest-class-mean on the labeled set. SSL: self-training, i.e.
// pseudo-label the unlabeled pool, refit the class means on labeled +
// pseudo-labeled, repeated `rounds` times. With an empty pool the two
// pipelines coincide exactly.
SelfTrainOutcome self_train_eval(const SslTask& task, int rounds);

struct SslGapSummary {
    int n_seeds = 0;
    std::vector<double> anticausal_gains;
    std::vector<double> causal_gains;
    double median_anticausal_gain = 0.0;
    double median_causal_gain = 0.0;
    // One-sided sign test for gain_anticausal > gain_causal across seeds;
    // ties are dropped. 1.0 and degenerate=true when every pair ties.
    double sign_test_p = 1.0;
    bool degenerate = false;
};

SslGapSummary ssl_gap_experiment(const SslConfig& config, int n_seeds, std::uint64_t master_seed);

}  // namespace causalkit
