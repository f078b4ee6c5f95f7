#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "awa/rng.hpp"
#include "awa/trace.hpp"

namespace awa::testing {

/// Synthetic corpus: K classes of structured burst patterns with noise.
/// Classes differ in burst count, amplitude profile and periodic structure;
/// traces start with either direction. Magnitudes are small integers.
inline TraceCorpus synth_corpus(int num_classes, int length, int per_class, uint64_t seed) {
    TraceCorpus corpus;
    corpus.num_classes = num_classes;
    Rng rng(seed);
    for (int k = 0; k < num_classes; ++k) {
        double base = 2.0 + k % 3;
        double amp = 1.5 + 0.7 * (k % 4);
        double period = 8.0 + 3.0 * (k % 5);
        double ramp = 0.08 * ((k + 1) % 4);
        double fill = 0.60 + 0.10 * (k % 3);
        for (int t = 0; t < per_class; ++t) {
            int m = static_cast<int>(std::lround(
                length * fill + rng.uniform(-length / 8.0, length / 8.0)));
            m = std::max(4, std::min(length, m));
            BurstSequence bs;
            int sign = rng.uniform() < 0.5 ? 1 : -1;
            for (int j = 0; j < m; ++j) {
                double v = base + amp * (1.0 + std::sin(2.0 * std::numbers::pi * (j + 2.0 * k) / period)) +
                           ramp * j + 0.7 * rng.gaussian();
                auto mag = static_cast<int64_t>(std::lround(std::max(1.0, v)));
                bs.bursts.push_back(mag * sign);
                sign = -sign;
            }
            corpus.traces.push_back(to_fixed(bs, length));
            corpus.labels.push_back(k);
        }
    }
    return corpus;
}

inline DirectionSequence random_ds(Rng& rng, int max_len) {
    DirectionSequence ds;
    int n = 1 + static_cast<int>(rng.uniform_int(static_cast<uint64_t>(max_len)));
    for (int i = 0; i < n; ++i) ds.dirs.push_back(rng.uniform() < 0.5 ? 1 : -1);
    return ds;
}

/// Central finite differences of a scalar function.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   Eigen::VectorXd x, double h = 1e-5) {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        double orig = x(i);
        x(i) = orig + h;
        double up = f(x);
        x(i) = orig - h;
        double down = f(x);
        x(i) = orig;
        g(i) = (up - down) / (2.0 * h);
    }
    return g;
}

/// Worst relative error between two gradients, with an absolute floor for
/// near-zero entries.
inline double max_rel_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                            double abs_floor = 1e-7) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        double denom = std::max(std::max(std::abs(a(i)), std::abs(b(i))), 1.0);
        double err = std::abs(a(i) - b(i));
        if (err > abs_floor) worst = std::max(worst, err / denom);
    }
    return worst;
}

/// Unique scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("awa_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

} // namespace awa::testing
