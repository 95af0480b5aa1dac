#include "causalkit/stats.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "causalkit/errors.hpp"
#include "causalkit/rng.hpp"

namespace causalkit {

namespace {

void check_finite(std::span<const double> v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw std::invalid_argument(std::string(what) + ": non-finite value");
        }
    }
}

double resolve_bandwidth(const KernelSpec& kernel, std::span<const double> x) {
    if (kernel.bandwidth) {
        if (!(*kernel.bandwidth > 0.0)) {
            throw std::invalid_argument("kernel bandwidth must be positive");
        }
        return *kernel.bandwidth;
    }
    return median_heuristic(x);
}

// Centered RBF Gram matrix: H K H with H = I - 11^T/n.
Eigen::MatrixXd centered_gram(std::span<const double> v, double bandwidth) {
    const Eigen::Index n = static_cast<Eigen::Index>(v.size());
    const double gamma = 1.0 / (2.0 * bandwidth * bandwidth);
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d = v[static_cast<std::size_t>(i)] - v[static_cast<std::size_t>(j)];
            const double val = std::exp(-gamma * d * d);
            k(i, j) = val;
            k(j, i) = val;
        }
    }
    const Eigen::VectorXd row_means = k.rowwise().mean();
    const double grand_mean = row_means.mean();
    k.colwise() -= row_means;
    k.rowwise() -= row_means.transpose();
    k.array() += grand_mean;
    return k;
}

}  // namespace

double median_heuristic(std::span<const double> x) {
    std::vector<double> dist;
    dist.reserve(x.size() * (x.size() - 1) / 2);
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const double d = std::abs(x[i] - x[j]);
            if (d > 0.0) dist.push_back(d);
        }
    }
    if (dist.empty()) return 1.0;
    const std::size_t mid = dist.size() / 2;
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid), dist.end());
    return dist[mid];
}

KernelRidgeFit::KernelRidgeFit(std::vector<double> x, std::vector<double> dual, double y_mean,
                               double bandwidth, double ridge)
    : x_(std::move(x)), dual_(std::move(dual)), y_mean_(y_mean), bandwidth_(bandwidth),
      ridge_(ridge) {}

double KernelRidgeFit::predict(double x) const {
    const double gamma = 1.0 / (2.0 * bandwidth_ * bandwidth_);
    double out = y_mean_;
    for (std::size_t i = 0; i < x_.size(); ++i) {
        const double d = x - x_[i];
        out += dual_[i] * std::exp(-gamma * d * d);
    }
    return out;
}

std::vector<double> KernelRidgeFit::predict(std::span<const double> xs) const {
    std::vector<double> out;
    out.reserve(xs.size());
    for (double x : xs) out.push_back(predict(x));
    return out;
}

KernelRidgeFit kernel_regress(std::span<const double> x, std::span<const double> y,
                              const KernelSpec& kernel, double ridge) {
    if (x.empty() || y.empty()) {
        throw std::invalid_argument("kernel_regress: empty input");
    }
    if (x.size() != y.size()) {
        throw std::invalid_argument("kernel_regress: length mismatch");
    }
    if (x.size() < 2) {
        throw std::invalid_argument("kernel_regress: need at least 2 samples");
    }
    if (ridge < 0.0) {
        throw std::invalid_argument("kernel_regress: ridge must be non-negative");
    }
    check_finite(x, "kernel_regress x");
    check_finite(y, "kernel_regress y");

    if (ridge == 0.0) {
        std::vector<double> sorted(x.begin(), x.end());
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw NumericError("kernel_regress: singular system (duplicate inputs with ridge 0)");
        }
    }

    const double bandwidth = resolve_bandwidth(kernel, x);
    const Eigen::Index n = static_cast<Eigen::Index>(x.size());
    const double gamma = 1.0 / (2.0 * bandwidth * bandwidth);

    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double d = x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)];
            k(i, j) = std::exp(-gamma * d * d);
        }
    }
    k.diagonal().array() += ridge;

    const double y_mean =
        std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) rhs(i) = y[static_cast<std::size_t>(i)] - y_mean;

    const Eigen::LDLT<Eigen::MatrixXd> solver(k);
    if (solver.info() != Eigen::Success) {
        throw NumericError("kernel_regress: factorisation failed");
    }
    const Eigen::VectorXd alpha = solver.solve(rhs);
    if (!alpha.allFinite()) {
        throw NumericError("kernel_regress: singular system");
    }

    KernelRidgeFit fit(std::vector<double>(x.begin(), x.end()),
                       std::vector<double>(alpha.data(), alpha.data() + n), y_mean, bandwidth,
                       ridge);
    std::vector<double> residuals(x.size());
    const std::vector<double> fitted = fit.predict(x);
    for (std::size_t i = 0; i < x.size(); ++i) residuals[i] = y[i] - fitted[i];
    fit.set_residuals(std::move(residuals));
    return fit;
}

HsicResult hsic_test(std::span<const double> x, std::span<const double> y,
                     const KernelSpec& kernel, int permutations, std::uint64_t seed) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("hsic_test: length mismatch");
    }
    if (x.size() < 5) {
        throw std::invalid_argument("hsic_test: need at least 5 samples");
    }
    if (permutations < 1) {
        throw std::invalid_argument("hsic_test: need at least 1 permutation");
    }
    check_finite(x, "hsic_test x");
    check_finite(y, "hsic_test y");

    const std::size_t n = x.size();
    const double bw_x = kernel.bandwidth ? *kernel.bandwidth : median_heuristic(x);
    const double bw_y = kernel.bandwidth ? *kernel.bandwidth : median_heuristic(y);

    const Eigen::MatrixXd kc = centered_gram(x, bw_x);
    const Eigen::MatrixXd lc = centered_gram(y, bw_y);

    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    const double observed = (kc.array() * lc.array()).sum() / n2;

    // Permute the row/column index map of the centered L Gram; centering
    // commutes with permutation, so this equals recomputing from permuted y.
    const RandomStream root = RandomStream::seeded(seed);
    std::vector<std::size_t> perm(n);
    int at_least = 0;
    for (int p = 0; p < permutations; ++p) {
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        StreamCursor cursor(root.substream(static_cast<std::uint64_t>(p)));
        shuffle(perm, cursor);
        double stat = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double* krow = kc.data() + static_cast<std::ptrdiff_t>(i) * kc.rows();
            const double* lrow =
                lc.data() + static_cast<std::ptrdiff_t>(perm[i]) * lc.rows();
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                acc += krow[j] * lrow[perm[j]];
            }
            stat += acc;
        }
        stat /= n2;
        if (stat >= observed) ++at_least;
    }

    HsicResult result;
    result.statistic = std::max(observed, 0.0);
    result.p_value =
        static_cast<double>(1 + at_least) / static_cast<double>(1 + permutations);
    return result;
}

}  // namespace causalkit
