#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace causalkit {

// Gaussian RBF kernel; bandwidth defaults to the median heuristic over
// nonzero pairwise distances of the data it is applied to.
struct KernelSpec {
    std::optional<double> bandwidth;  // nullopt = median heuristic
};

// Median of nonzero pairwise absolute differences; 1.0 when every distance is
// zero (constant input).
double median_heuristic(std::span<const double> x);

// Kernel ridge regression fit with centered targets, so a constant target is
// reproduced exactly everywhere.
class KernelRidgeFit {
  public:
    KernelRidgeFit(std::vector<double> x, std::vector<double> dual, double y_mean, double bandwidth,
                   double ridge);

    double predict(double x) const;
    std::vector<double> predict(std::span<const double> xs) const;

    // y - predict(x) on the training inputs.
    const std::vector<double>& residuals() const { return residuals_; }

    double bandwidth() const { return bandwidth_; }
    double ridge() const { return ridge_; }
    std::size_t train_count() const { return x_.size(); }

    void set_residuals(std::vector<double> r) { residuals_ = std::move(r); }

  private:
    std::vector<double> x_;
    std::vector<double> dual_;
    std::vector<double> residuals_;
    double y_mean_;
    double bandwidth_;
    double ridge_;
};

// Fits y ~ f(x) by kernel ridge. ridge == 0 demands distinct inputs and
// interpolates; otherwise the system is regularised. Throws
// std::invalid_argument for bad shapes / non-finite data and NumericError for
// a singular unregularised system.
KernelRidgeFit kernel_regress(std::span<const double> x, std::span<const double> y,
                              const KernelSpec& kernel, double ridge);

struct HsicResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

// Biased V-statistic HSIC with centered Gram matrices and a permutation null:
// p = (1 + #{permuted >= observed}) / (1 + permutations). Deterministic given
// the seed.
HsicResult hsic_test(std::span<const double> x, std::span<const double> y,
                     const KernelSpec& kernel, int permutations, std::uint64_t seed);

}  // namespace causalkit
