#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "causalkit/stats.hpp"

namespace causalkit {

// One shared latent time series: smoothed noise rescaled to the requested
// amplitude. Smoothness is the Gaussian smoothing width in samples.
struct SystematicSpec {
    double amplitude = 0.05;
    double smoothness = 30.0;
};

// Periodic box dip of the given depth.
struct TransitSpec {
    double depth = 0.01;
    double duration = 25.0;
    double period = 250.0;
    double phase = 0.0;  // offset of the first dip, in samples
};

struct PanelSpec {
    int n_targets = 2;
    int n_siblings = 8;
    int n_time = 2000;
    std::vector<SystematicSpec> systematics = {{0.05, 30.0}, {0.05, 120.0}};
    double loading_min = 0.5;
    double loading_max = 1.5;
    double noise_sigma = 0.002;
    // Cycled over targets; empty means no injected signal.
    std::vector<TransitSpec> signals = {TransitSpec{}};
};

// target[k] = loadings . systematics + signal[k] + noise[k]
// sibling[m] = loadings . systematics + noise; siblings carry no signal.
struct Panel {
    std::vector<double> time;
    std::vector<std::vector<double>> targets;
    std::vector<std::vector<double>> siblings;
    std::vector<std::vector<double>> signals;       // injected ground truth per target
    std::vector<std::vector<double>> target_noise;  // idiosyncratic noise per target
    std::vector<std::vector<double>> systematics;   // latent ground truth
};

Panel simulate_panel(const PanelSpec& spec, std::uint64_t seed);

struct HsrConfig {
    double ridge = 1e-8;      // linear ridge strength; 0 = exact least squares
    bool use_kernel = false;  // kernel regression on sibling values instead
    KernelSpec kernel{};
    double kernel_ridge_scale = 1e-3;
    // Optional predictor augmentation with the target's own past/future values
    // at +/- this lag (0 = off).
    int target_lag = 0;
};

struct HsrResult {
    std::vector<double> estimate;  // target - prediction + offset
    double r_squared = 0.0;        // in-sample fit quality of the prediction
    double offset = 0.0;           // mean(target), added back to the residual
};

// Half-sibling regression: predict the target from confounder-sharing sibling
// series and subtract the prediction, cancelling the shared instrument.
HsrResult hsr_estimate(std::span<const double> target,
                       const std::vector<std::vector<double>>& siblings,
                       const HsrConfig& config = {});

struct RecoveryScore {
    double offset_free_mse = 0.0;  // min_c mean((estimate - truth - c)^2)
    double correlation = 0.0;
};

RecoveryScore recovery_score(std::span<const double> estimate, std::span<const double> truth);

}  // namespace causalkit
