#include "causalkit/ssl_bench.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "causalkit/errors.hpp"
#include "causalkit/rng.hpp"

namespace causalkit {

namespace {

std::pair<double, int> draw_pair(SslDirection direction, const SslConfig& config,
                                 StreamCursor& cursor) {
    if (direction == SslDirection::anticausal) {
        const int y = cursor.uniform01() < 0.5 ? 1 : 0;
        const double center = y == 1 ? config.mu : -config.mu;
        return {center + config.sigma_anticausal * cursor.normal(), y};
    }
    const double x = cursor.normal();
    int y = x > config.theta ? 1 : 0;
    if (cursor.uniform01() < config.epsilon) y = 1 - y;
    return {x, y};
}

struct ClassMeans {
    double mean0 = 0.0;
    double mean1 = 0.0;
};

ClassMeans fit_means(const std::vector<double>& x, const std::vector<int>& y) {
    double sum0 = 0.0, sum1 = 0.0;
    std::size_t n0 = 0, n1 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (y[i] == 1) {
            sum1 += x[i];
            ++n1;
        } else {
            sum0 += x[i];
            ++n0;
        }
    }
    if (n0 == 0 || n1 == 0) {
        throw std::invalid_argument("self_train_eval: a class is absent from the labeled data");
    }
    return {sum0 / static_cast<double>(n0), sum1 / static_cast<double>(n1)};
}

int classify(const ClassMeans& means, double x) {
    return std::abs(x - means.mean1) < std::abs(x - means.mean0) ? 1 : 0;
}

double accuracy(const ClassMeans& means, const std::vector<double>& x, const std::vector<int>& y) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (classify(means, x[i]) == y[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(x.size());
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
        m = 0.5 * (m + lower);
    }
    return m;
}

// P(Bin(n, 1/2) >= k), exact.
double binomial_tail(int n, int k) {
    double p = 0.0;
    for (int i = k; i <= n; ++i) {
        double log_c = 0.0;
        for (int j = 0; j < i; ++j) {
            log_c += std::log(static_cast<double>(n - j)) - std::log(static_cast<double>(j + 1));
        }
        p += std::exp(log_c - static_cast<double>(n) * std::log(2.0));
    }
    return std::min(1.0, p);
}

}  // namespace

SslTask generate_ssl_task(SslDirection direction, int n_labeled, int n_unlabeled,
                          std::uint64_t seed, const SslConfig& config) {
    if (n_labeled < 2) {
        throw std::invalid_argument("generate_ssl_task: need at least 2 labeled points");
    }
    if (n_unlabeled < 0) {
        throw std::invalid_argument("generate_ssl_task: unlabeled count must be >= 0");
    }
    if (config.n_test < 1) {
        throw std::invalid_argument("generate_ssl_task: test count must be positive");
    }

    const RandomStream root = RandomStream::seeded(seed);
    SslTask task;
    task.direction = direction;

    // Labeled set: draw a generous buffer and patch in the first example of a
    // missing class, so downstream fitting never sees a one-class sample.
    {
        StreamCursor cursor(root.substream(0));
        std::vector<double> xs;
        std::vector<int> ys;
        const int buffer = n_labeled + 64;
        for (int i = 0; i < buffer; ++i) {
            const auto [x, y] = draw_pair(direction, config, cursor);
            xs.push_back(x);
            ys.push_back(y);
        }
        task.labeled_x.assign(xs.begin(), xs.begin() + n_labeled);
        task.labeled_y.assign(ys.begin(), ys.begin() + n_labeled);
        for (int cls = 0; cls <= 1; ++cls) {
            if (std::find(task.labeled_y.begin(), task.labeled_y.end(), cls) !=
                task.labeled_y.end()) {
                continue;
            }
            const auto it = std::find(ys.begin() + n_labeled, ys.end(), cls);
            if (it == ys.end()) {
                throw NumericError("generate_ssl_task: could not realise both classes");
            }
            const std::size_t src = static_cast<std::size_t>(it - ys.begin());
            task.labeled_x.back() = xs[src];
            task.labeled_y.back() = cls;
        }
    }

    {
        StreamCursor cursor(root.substream(1));
        for (int i = 0; i < n_unlabeled; ++i) {
            task.unlabeled_x.push_back(draw_pair(direction, config, cursor).first);
        }
    }
    {
        StreamCursor cursor(root.substream(2));
        for (int i = 0; i < config.n_test; ++i) {
            const auto [x, y] = draw_pair(direction, config, cursor);
            task.test_x.push_back(x);
            task.test_y.push_back(y);
        }
    }
    return task;
}

SelfTrainOutcome self_train_eval(const SslTask& task, int rounds) {
    if (rounds < 0) {
        throw std::invalid_argument("self_train_eval: rounds must be >= 0");
    }
    const ClassMeans supervised = fit_means(task.labeled_x, task.labeled_y);

    SelfTrainOutcome outcome;
    outcome.supervised_accuracy = accuracy(supervised, task.test_x, task.test_y);

    ClassMeans current = supervised;
    if (!task.unlabeled_x.empty()) {
        std::vector<double> pool_x = task.labeled_x;
        std::vector<int> pool_y = task.labeled_y;
        pool_x.insert(pool_x.end(), task.unlabeled_x.begin(), task.unlabeled_x.end());
        pool_y.resize(pool_x.size(), 0);
        for (int r = 0; r < rounds; ++r) {
            for (std::size_t i = task.labeled_x.size(); i < pool_x.size(); ++i) {
                pool_y[i] = classify(current, pool_x[i]);
            }
            // If self-training empties a class, keep the previous mean for it.
            double sum0 = 0.0, sum1 = 0.0;
            std::size_t n0 = 0, n1 = 0;
            for (std::size_t i = 0; i < pool_x.size(); ++i) {
                if (pool_y[i] == 1) {
                    sum1 += pool_x[i];
                    ++n1;
                } else {
                    sum0 += pool_x[i];
                    ++n0;
                }
            }
            ClassMeans next = current;
            if (n0 > 0) next.mean0 = sum0 / static_cast<double>(n0);
            if (n1 > 0) next.mean1 = sum1 / static_cast<double>(n1);
            current = next;
        }
    }
    outcome.ssl_accuracy = accuracy(current, task.test_x, task.test_y);
    return outcome;
}

SslGapSummary ssl_gap_experiment(const SslConfig& config, int n_seeds, std::uint64_t master_seed) {
    if (n_seeds < 10) {
        throw std::invalid_argument("ssl_gap_experiment: need at least 10 seeds");
    }

    const RandomStream root = RandomStream::seeded(master_seed);
    SslGapSummary summary;
    summary.n_seeds = n_seeds;

    for (int s = 0; s < n_seeds; ++s) {
        const std::uint64_t anticausal_seed = root.substream(2 * static_cast<std::uint64_t>(s)).key();
        const std::uint64_t causal_seed = root.substream(2 * static_cast<std::uint64_t>(s) + 1).key();

        const SslTask anticausal = generate_ssl_task(SslDirection::anticausal, config.n_labeled,
                                                     config.n_unlabeled, anticausal_seed, config);
        const SslTask causal = generate_ssl_task(SslDirection::causal, config.n_labeled,
                                                 config.n_unlabeled, causal_seed, config);

        const SelfTrainOutcome a = self_train_eval(anticausal, config.rounds);
        const SelfTrainOutcome c = self_train_eval(causal, config.rounds);
        summary.anticausal_gains.push_back(a.ssl_accuracy - a.supervised_accuracy);
        summary.causal_gains.push_back(c.ssl_accuracy - c.supervised_accuracy);
    }

    summary.median_anticausal_gain = median(summary.anticausal_gains);
    summary.median_causal_gain = median(summary.causal_gains);

    int wins = 0;
    int informative = 0;
    for (int s = 0; s < n_seeds; ++s) {
        const double diff = summary.anticausal_gains[static_cast<std::size_t>(s)] -
                            summary.causal_gains[static_cast<std::size_t>(s)];
        if (diff == 0.0) continue;
        ++informative;
        if (diff > 0.0) ++wins;
    }
    if (informative == 0) {
        summary.degenerate = true;
        summary.sign_test_p = 1.0;
    } else {
        summary.sign_test_p = binomial_tail(informative, wins);
    }
    return summary;
}

}  // namespace causalkit
