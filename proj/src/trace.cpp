#include "awa/trace.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace awa {

void DirectionSequence::validate() const {
    if (dirs.empty()) throw InvalidTrace("direction sequence is empty");
    for (size_t i = 0; i < dirs.size(); ++i) {
        if (dirs[i] != 1 && dirs[i] != -1)
            throw InvalidTrace("direction at position " + std::to_string(i) +
                               " is " + std::to_string(dirs[i]) + ", expected +1 or -1");
    }
}

void BurstSequence::validate() const {
    if (bursts.empty()) throw InvalidTrace("burst sequence is empty");
    for (size_t i = 0; i < bursts.size(); ++i) {
        if (bursts[i] == 0)
            throw InvalidTrace("zero burst at position " + std::to_string(i));
        if (i > 0 && (bursts[i] > 0) == (bursts[i - 1] > 0))
            throw InvalidTrace("bursts at positions " + std::to_string(i - 1) + "," +
                               std::to_string(i) + " do not alternate signs");
    }
}

void TraceCorpus::validate() const {
    if (traces.size() != labels.size())
        throw InvalidTrace("corpus has " + std::to_string(traces.size()) + " traces but " +
                           std::to_string(labels.size()) + " labels");
    for (size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= num_classes)
            throw InvalidTrace("label " + std::to_string(labels[i]) + " at index " +
                               std::to_string(i) + " outside [0," +
                               std::to_string(num_classes) + ")");
    }
}

std::vector<size_t> TraceCorpus::class_indices(int cls) const {
    std::vector<size_t> out;
    for (size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == cls) out.push_back(i);
    return out;
}

TraceCorpus TraceCorpus::class_slice(int cls) const {
    TraceCorpus out;
    out.num_classes = num_classes;
    for (size_t i : class_indices(cls)) {
        out.traces.push_back(traces[i]);
        out.labels.push_back(labels[i]);
    }
    return out;
}

BurstSequence ds_to_bs(const DirectionSequence& ds) {
    ds.validate();
    BurstSequence bs;
    int64_t run = 0;
    int dir = 0;
    for (int d : ds.dirs) {
        if (d == dir) {
            ++run;
        } else {
            if (dir != 0) bs.bursts.push_back(run * dir);
            dir = d;
            run = 1;
        }
    }
    bs.bursts.push_back(run * dir);
    return bs;
}

DirectionSequence bs_to_ds(const BurstSequence& bs) {
    bs.validate();
    DirectionSequence ds;
    for (int64_t b : bs.bursts) {
        int dir = b > 0 ? 1 : -1;
        for (int64_t i = 0; i < std::llabs(b); ++i) ds.dirs.push_back(dir);
    }
    return ds;
}

FixedTrace to_fixed(const BurstSequence& bs, int length) {
    bs.validate();
    if (length < 1) throw InvalidTrace("fixed length must be >= 1");
    FixedTrace out;
    out.values.assign(static_cast<size_t>(length), 0.0);
    int m = static_cast<int>(bs.bursts.size());
    out.original_burst_count = std::min(m, length);
    for (int i = 0; i < out.original_burst_count; ++i)
        out.values[static_cast<size_t>(i)] = static_cast<double>(bs.bursts[static_cast<size_t>(i)]);
    return out;
}

double bandwidth_overhead(const FixedTrace& original, const FixedTrace& transformed) {
    if (original.length() != transformed.length())
        throw InvalidTrace("bandwidth_overhead: length mismatch");
    double added = 0.0;
    double base = 0.0;
    for (int i = 0; i < original.length(); ++i) {
        double o = std::abs(original.values[static_cast<size_t>(i)]);
        double t = std::abs(transformed.values[static_cast<size_t>(i)]);
        added += std::abs(t - o);
        base += o;
    }
    if (base == 0.0) throw DegenerateTrace("bandwidth_overhead: original trace has zero volume");
    return added / base * 100.0;
}

std::vector<double> average_trace(const std::vector<FixedTrace>& traces) {
    if (traces.empty()) throw EmptyInput("average_trace: empty trace set");
    size_t len = traces.front().values.size();
    std::vector<double> mean(len, 0.0);
    for (const auto& t : traces) {
        if (t.values.size() != len) throw InvalidTrace("average_trace: length mismatch");
        for (size_t i = 0; i < len; ++i) mean[i] += t.values[i];
    }
    for (double& v : mean) v /= static_cast<double>(traces.size());
    return mean;
}

CorpusSplits split_corpus(const TraceCorpus& corpus, const SplitSpec& spec, uint64_t order_seed) {
    corpus.validate();
    if (spec.awa_train < 0 || spec.adversary_train < 0 || spec.adversary_val < 0 ||
        spec.target_user < 0)
        throw SplitError("split counts must be nonnegative");

    CorpusSplits out;
    for (TraceCorpus* c : {&out.awa_train, &out.adversary_train, &out.adversary_val,
                           &out.target_user})
        c->num_classes = corpus.num_classes;

    Rng rng(order_seed);
    for (int cls = 0; cls < corpus.num_classes; ++cls) {
        auto idx = corpus.class_indices(cls);
        if (static_cast<int>(idx.size()) < spec.total())
            throw SplitError("class " + std::to_string(cls) + " has " +
                             std::to_string(idx.size()) + " traces, split needs " +
                             std::to_string(spec.total()));
        rng.shuffle(idx);
        size_t pos = 0;
        auto take = [&](TraceCorpus& dst, int n) {
            for (int i = 0; i < n; ++i, ++pos) {
                dst.traces.push_back(corpus.traces[idx[pos]]);
                dst.labels.push_back(cls);
            }
        };
        take(out.awa_train, spec.awa_train);
        take(out.adversary_train, spec.adversary_train);
        take(out.adversary_val, spec.adversary_val);
        take(out.target_user, spec.target_user);
    }
    return out;
}

} // namespace awa
