#include "causalkit/half_sibling.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "causalkit/errors.hpp"
#include "causalkit/rng.hpp"

namespace causalkit {

namespace {

// Smoothed standard-normal draws, rescaled to unit standard deviation, then to
// the requested amplitude.
std::vector<double> smooth_series(int n_time, double amplitude, double smoothness,
                                  StreamCursor& cursor) {
    std::vector<double> raw(static_cast<std::size_t>(n_time));
    for (auto& v : raw) v = cursor.normal();
    if (smoothness <= 0.0) {
        for (auto& v : raw) v *= amplitude;
        return raw;
    }

    const int half = std::max(1, static_cast<int>(std::ceil(3.0 * smoothness)));
    std::vector<double> weight(static_cast<std::size_t>(2 * half + 1));
    for (int k = -half; k <= half; ++k) {
        weight[static_cast<std::size_t>(k + half)] =
            std::exp(-0.5 * (static_cast<double>(k) / smoothness) * (static_cast<double>(k) / smoothness));
    }

    std::vector<double> out(static_cast<std::size_t>(n_time), 0.0);
    for (int t = 0; t < n_time; ++t) {
        double acc = 0.0;
        double wsum = 0.0;
        for (int k = -half; k <= half; ++k) {
            const int s = t + k;
            if (s < 0 || s >= n_time) continue;
            const double w = weight[static_cast<std::size_t>(k + half)];
            acc += w * raw[static_cast<std::size_t>(s)];
            wsum += w;
        }
        out[static_cast<std::size_t>(t)] = acc / wsum;
    }

    double mean = std::accumulate(out.begin(), out.end(), 0.0) / static_cast<double>(n_time);
    double var = 0.0;
    for (double v : out) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n_time);
    const double scale = var > 0.0 ? amplitude / std::sqrt(var) : 0.0;
    for (auto& v : out) v = (v - mean) * scale;
    return out;
}

std::vector<double> box_transit(int n_time, const TransitSpec& transit) {
    std::vector<double> out(static_cast<std::size_t>(n_time), 0.0);
    if (transit.depth == 0.0 || transit.period <= 0.0 || transit.duration <= 0.0) return out;
    for (int t = 0; t < n_time; ++t) {
        const double pos = std::fmod(static_cast<double>(t) - transit.phase, transit.period);
        const double in_period = pos < 0.0 ? pos + transit.period : pos;
        if (in_period < transit.duration) {
            out[static_cast<std::size_t>(t)] = -transit.depth;
        }
    }
    return out;
}

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Linear ridge prediction of `target` from the design columns, with centered
// features and target. ridge == 0 solves the least-squares problem by QR, so
// rank-deficient designs (e.g. constant siblings) are still well defined.
std::vector<double> linear_prediction(std::span<const double> target,
                                      const std::vector<std::span<const double>>& columns,
                                      double ridge) {
    const Eigen::Index n = static_cast<Eigen::Index>(target.size());
    const Eigen::Index m = static_cast<Eigen::Index>(columns.size());

    Eigen::MatrixXd x(n, m);
    Eigen::VectorXd col_mean(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const auto& col = columns[static_cast<std::size_t>(j)];
        double mean = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) mean += col[static_cast<std::size_t>(i)];
        mean /= static_cast<double>(n);
        col_mean(j) = mean;
        for (Eigen::Index i = 0; i < n; ++i) x(i, j) = col[static_cast<std::size_t>(i)] - mean;
    }

    const double y_mean = mean_of(target);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = target[static_cast<std::size_t>(i)] - y_mean;

    Eigen::VectorXd beta;
    if (ridge > 0.0) {
        Eigen::MatrixXd gram = x.transpose() * x;
        gram.diagonal().array() += ridge;
        const Eigen::LDLT<Eigen::MatrixXd> solver(gram);
        if (solver.info() != Eigen::Success) {
            throw NumericError("hsr_estimate: ridge system factorisation failed");
        }
        beta = solver.solve(x.transpose() * y);
    } else {
        beta = x.colPivHouseholderQr().solve(y);
    }
    if (!beta.allFinite()) {
        throw NumericError("hsr_estimate: regression produced non-finite coefficients");
    }

    const Eigen::VectorXd fitted = x * beta;
    std::vector<double> out(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = y_mean + fitted(i);
    return out;
}

// Multivariate RBF kernel ridge over sibling vectors; used by the kernel
// option where the instrument enters nonlinearly.
std::vector<double> kernel_prediction(std::span<const double> target,
                                      const std::vector<std::span<const double>>& columns,
                                      const KernelSpec& kernel, double ridge_scale) {
    const Eigen::Index n = static_cast<Eigen::Index>(target.size());
    const Eigen::Index m = static_cast<Eigen::Index>(columns.size());

    Eigen::MatrixXd points(n, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            points(i, j) = columns[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
        }
    }

    Eigen::MatrixXd sq_dist(n, n);
    std::vector<double> nonzero;
    nonzero.reserve(static_cast<std::size_t>(n) * (static_cast<std::size_t>(n) - 1) / 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        sq_dist(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d2 = (points.row(i) - points.row(j)).squaredNorm();
            sq_dist(i, j) = d2;
            sq_dist(j, i) = d2;
            if (d2 > 0.0) nonzero.push_back(std::sqrt(d2));
        }
    }
    double bandwidth = 1.0;
    if (kernel.bandwidth) {
        bandwidth = *kernel.bandwidth;
    } else if (!nonzero.empty()) {
        const std::size_t mid = nonzero.size() / 2;
        std::nth_element(nonzero.begin(), nonzero.begin() + static_cast<std::ptrdiff_t>(mid),
                         nonzero.end());
        bandwidth = nonzero[mid];
    }

    const double gamma = 1.0 / (2.0 * bandwidth * bandwidth);
    Eigen::MatrixXd k = (-gamma * sq_dist.array()).exp().matrix();
    const double ridge = ridge_scale * static_cast<double>(n);
    k.diagonal().array() += ridge;

    const double y_mean = mean_of(target);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = target[static_cast<std::size_t>(i)] - y_mean;

    const Eigen::LDLT<Eigen::MatrixXd> solver(k);
    if (solver.info() != Eigen::Success) {
        throw NumericError("hsr_estimate: kernel system factorisation failed");
    }
    const Eigen::VectorXd alpha = solver.solve(y);
    k.diagonal().array() -= ridge;
    const Eigen::VectorXd fitted = k * alpha;

    std::vector<double> out(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = y_mean + fitted(i);
    return out;
}

}  // namespace

Panel simulate_panel(const PanelSpec& spec, std::uint64_t seed) {
    if (spec.n_targets < 1 || spec.n_siblings < 1 || spec.n_time < 2) {
        throw std::invalid_argument("simulate_panel: counts must be positive (n_time >= 2)");
    }
    if (spec.noise_sigma < 0.0) {
        throw std::invalid_argument("simulate_panel: noise sigma must be >= 0");
    }
    for (const auto& t : spec.signals) {
        if (t.depth < 0.0) throw std::invalid_argument("simulate_panel: transit depth must be >= 0");
    }
    if (!(spec.loading_min <= spec.loading_max)) {
        throw std::invalid_argument("simulate_panel: loading range inverted");
    }

    const RandomStream root = RandomStream::seeded(seed);
    const std::size_t n_time = static_cast<std::size_t>(spec.n_time);

    Panel panel;
    panel.time.resize(n_time);
    std::iota(panel.time.begin(), panel.time.end(), 0.0);

    // Latents first: drawn once, shared by every series.
    panel.systematics.reserve(spec.systematics.size());
    for (std::size_t s = 0; s < spec.systematics.size(); ++s) {
        StreamCursor cursor(root.substream(s).substream(0));
        panel.systematics.push_back(smooth_series(spec.n_time, spec.systematics[s].amplitude,
                                                  spec.systematics[s].smoothness, cursor));
    }

    const RandomStream series_root = root.substream(1u << 16);
    auto build_series = [&](std::size_t series_index, bool is_target, std::size_t target_index) {
        StreamCursor cursor(series_root.substream(series_index));
        std::vector<double> series(n_time, 0.0);
        for (const auto& systematic : panel.systematics) {
            const double loading = cursor.uniform(spec.loading_min, spec.loading_max);
            for (std::size_t t = 0; t < n_time; ++t) series[t] += loading * systematic[t];
        }
        std::vector<double> noise(n_time, 0.0);
        if (spec.noise_sigma > 0.0) {
            for (std::size_t t = 0; t < n_time; ++t) noise[t] = spec.noise_sigma * cursor.normal();
        }
        for (std::size_t t = 0; t < n_time; ++t) series[t] += noise[t];
        if (is_target) {
            std::vector<double> signal(n_time, 0.0);
            if (!spec.signals.empty()) {
                const auto& transit = spec.signals[target_index % spec.signals.size()];
                signal = box_transit(spec.n_time, transit);
            }
            for (std::size_t t = 0; t < n_time; ++t) series[t] += signal[t];
            panel.signals.push_back(std::move(signal));
            panel.target_noise.push_back(std::move(noise));
        }
        return series;
    };

    for (int k = 0; k < spec.n_targets; ++k) {
        panel.targets.push_back(build_series(static_cast<std::size_t>(k), true,
                                             static_cast<std::size_t>(k)));
    }
    for (int m = 0; m < spec.n_siblings; ++m) {
        panel.siblings.push_back(build_series(static_cast<std::size_t>(spec.n_targets + m), false, 0));
    }
    return panel;
}

HsrResult hsr_estimate(std::span<const double> target,
                       const std::vector<std::vector<double>>& siblings, const HsrConfig& config) {
    if (siblings.empty()) {
        throw std::invalid_argument("hsr_estimate: need at least one sibling series");
    }
    for (const auto& s : siblings) {
        if (s.size() != target.size()) {
            throw std::invalid_argument("hsr_estimate: sibling/target length mismatch");
        }
    }
    if (target.size() < 2) {
        throw std::invalid_argument("hsr_estimate: need at least 2 time points");
    }
    if (config.ridge < 0.0) {
        throw std::invalid_argument("hsr_estimate: ridge must be >= 0");
    }

    std::vector<std::span<const double>> columns;
    columns.reserve(siblings.size() + 2);
    for (const auto& s : siblings) columns.push_back(s);

    // Optional augmentation with the target's own shifted values (edge values
    // clamped); useful when events are localised in time.
    std::vector<double> lag_back, lag_fwd;
    if (config.target_lag > 0) {
        const int lag = config.target_lag;
        const int n = static_cast<int>(target.size());
        lag_back.resize(target.size());
        lag_fwd.resize(target.size());
        for (int t = 0; t < n; ++t) {
            lag_back[static_cast<std::size_t>(t)] = target[static_cast<std::size_t>(std::max(0, t - lag))];
            lag_fwd[static_cast<std::size_t>(t)] =
                target[static_cast<std::size_t>(std::min(n - 1, t + lag))];
        }
        columns.push_back(lag_back);
        columns.push_back(lag_fwd);
    }

    const std::vector<double> prediction =
        config.use_kernel ? kernel_prediction(target, columns, config.kernel, config.kernel_ridge_scale)
                          : linear_prediction(target, columns, config.ridge);

    HsrResult result;
    result.offset = mean_of(target);
    result.estimate.resize(target.size());
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t t = 0; t < target.size(); ++t) {
        const double residual = target[t] - prediction[t];
        result.estimate[t] = residual + result.offset;
        ss_res += residual * residual;
        const double centered = target[t] - result.offset;
        ss_tot += centered * centered;
    }
    result.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
    return result;
}

RecoveryScore recovery_score(std::span<const double> estimate, std::span<const double> truth) {
    if (estimate.size() != truth.size()) {
        throw std::invalid_argument("recovery_score: length mismatch");
    }
    if (estimate.empty()) {
        throw std::invalid_argument("recovery_score: empty series");
    }
    const std::size_t n = estimate.size();

    // Offset-free MSE = population variance of the difference.
    double diff_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) diff_mean += estimate[i] - truth[i];
    diff_mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = estimate[i] - truth[i] - diff_mean;
        var += d * d;
    }
    var /= static_cast<double>(n);

    const double me = mean_of(estimate);
    const double mt = mean_of(truth);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double de = estimate[i] - me;
        const double dt = truth[i] - mt;
        sxy += de * dt;
        sxx += de * de;
        syy += dt * dt;
    }
    const double denom = std::sqrt(sxx * syy);

    RecoveryScore score;
    score.offset_free_mse = var;
    score.correlation = denom > 0.0 ? sxy / denom : (var == 0.0 ? 1.0 : 0.0);
    return score;
}

}  // namespace causalkit
