#include "awa/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "awa/data.hpp"

namespace awa {

namespace {

// Squared euclidean distances between all row pairs.
Eigen::MatrixXd pairwise_sq_dist(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::VectorXd an = a.rowwise().squaredNorm();
    Eigen::VectorXd bn = b.rowwise().squaredNorm();
    Eigen::MatrixXd d = (-2.0 * a * b.transpose());
    d.colwise() += an;
    d.rowwise() += bn.transpose();
    return d.cwiseMax(0.0);
}

double median_bandwidth(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    Eigen::MatrixXd all(x.rows() + y.rows(), x.cols());
    all << x, y;
    std::vector<double> dists;
    for (Eigen::Index i = 0; i < all.rows(); ++i)
        for (Eigen::Index j = i + 1; j < all.rows(); ++j)
            dists.push_back((all.row(i) - all.row(j)).norm());
    if (dists.empty()) return 1.0;
    size_t mid = dists.size() / 2;
    std::nth_element(dists.begin(), dists.begin() + static_cast<long>(mid), dists.end());
    double med = dists[mid];
    return med > 0.0 ? med : 1.0;
}

} // namespace

double mmd(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const KernelConfig& kernel) {
    if (x.rows() == 0 || y.rows() == 0) throw EmptyInput("mmd: empty sample set");
    if (x.cols() != y.cols()) throw ShapeError("mmd: dimension mismatch");

    double bw = kernel.median_heuristic() ? median_bandwidth(x, y) : kernel.bandwidth;
    double denom = 2.0 * bw * bw;
    auto mean_kernel = [&](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
        return (pairwise_sq_dist(a, b) / -denom).array().exp().mean();
    };
    double s = mean_kernel(x, x) + mean_kernel(y, y) - 2.0 * mean_kernel(x, y);
    return std::sqrt(std::max(s, 0.0));
}

IntraCDReport intra_cd(const std::vector<const TransformerSet*>& sets,
                       const TraceCorpus& corpus, const KernelConfig& kernel) {
    const int S = static_cast<int>(sets.size());
    if (S < 2) throw InsufficientSets("intra-CD needs at least two transformer sets");
    const int K = sets.front()->num_classes;
    for (const TransformerSet* s : sets)
        if (s->num_classes != K)
            throw CoverageError("transformer sets cover different class counts");
    if (corpus.num_classes != K)
        throw CoverageError("corpus classes do not match transformer sets");

    IntraCDReport report;
    report.num_classes = K;
    report.num_sets = S;

    double avg_sum = 0.0, min_sum = 0.0;
    for (int k = 0; k < K; ++k) {
        TraceCorpus slice = corpus.class_slice(k);
        if (slice.traces.empty())
            throw CoverageError("corpus has no traces for class " + std::to_string(k));

        std::vector<Eigen::MatrixXd> transformed;
        transformed.reserve(static_cast<size_t>(S));
        for (const TransformerSet* s : sets) {
            Eigen::MatrixXd m(static_cast<Eigen::Index>(slice.traces.size()),
                              slice.traces.front().length());
            for (size_t i = 0; i < slice.traces.size(); ++i) {
                FixedTrace t = s->for_website(k).apply(slice.traces[i], Phase::Test);
                for (int j = 0; j < t.length(); ++j)
                    m(static_cast<Eigen::Index>(i), j) = t.values[static_cast<size_t>(j)];
            }
            transformed.push_back(std::move(m));
        }

        Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(S, S);
        double pair_sum = 0.0, pair_min = 0.0;
        bool first = true;
        for (int i = 0; i < S; ++i)
            for (int j = i + 1; j < S; ++j) {
                double d = mmd(transformed[static_cast<size_t>(i)],
                               transformed[static_cast<size_t>(j)], kernel);
                dist(i, j) = dist(j, i) = d;
                pair_sum += d;
                pair_min = first ? d : std::min(pair_min, d);
                first = false;
            }
        report.distance.push_back(std::move(dist));
        avg_sum += pair_sum / (static_cast<double>(S) * (S - 1) / 2.0);
        min_sum += pair_min;
    }
    report.avg_intra_cd = avg_sum / K;
    report.min_intra_cd = min_sum / K;
    return report;
}

double classifier_accuracy(const NetworkModel& model, const TraceCorpus& corpus) {
    corpus.validate();
    if (corpus.traces.empty()) throw EmptyInput("classifier_accuracy: empty corpus");
    if (model.output_shape().features() != corpus.num_classes)
        throw ShapeError("classifier output width " +
                         std::to_string(model.output_shape().features()) +
                         " does not match " + std::to_string(corpus.num_classes) + " classes");

    Eigen::MatrixXd all = corpus_matrix(corpus);
    const int chunk = 256;
    int correct = 0;
    for (int start = 0; start < all.rows(); start += chunk) {
        int n = std::min<int>(chunk, static_cast<int>(all.rows()) - start);
        Tensor batch = rows_to_tensor(all.middleRows(start, n));
        ForwardResult res = model.infer(batch);
        for (int i = 0; i < n; ++i) {
            int best = 0;
            for (int c = 1; c < corpus.num_classes; ++c)
                if (res.output.m(i, c) > res.output.m(i, best)) best = c;
            if (best == corpus.labels[static_cast<size_t>(start + i)]) ++correct;
        }
    }
    return 100.0 * correct / static_cast<double>(all.rows());
}

std::vector<double> per_class_bwo(const TransformerSet& set, const TraceCorpus& corpus) {
    corpus.validate();
    if (corpus.num_classes > set.num_classes)
        throw CoverageError("transformer set does not cover all corpus classes");
    std::vector<double> out;
    for (int k = 0; k < corpus.num_classes; ++k) {
        TraceCorpus slice = corpus.class_slice(k);
        double sum = 0.0;
        for (const FixedTrace& t : slice.traces)
            sum += bandwidth_overhead(t, set.for_website(k).apply(t, Phase::Test));
        out.push_back(slice.traces.empty() ? 0.0 : sum / static_cast<double>(slice.traces.size()));
    }
    return out;
}

} // namespace awa
