#pragma once

#include <cstdint>
#include <vector>

#include "awa/errors.hpp"
#include "awa/rng.hpp"

namespace awa {

/// Ordered packet directions of one page load; every entry is +1 or -1.
struct DirectionSequence {
    std::vector<int> dirs;

    /// Throws InvalidTrace unless nonempty and all entries are +-1.
    void validate() const;

    bool operator==(const DirectionSequence&) const = default;
};

/// A trace as signed burst sizes: each entry is the run length of a maximal
/// same-direction packet run, carrying that run's direction as its sign.
/// Canonical form: no zero entries, strictly alternating signs.
struct BurstSequence {
    std::vector<int64_t> bursts;

    /// Throws InvalidTrace unless nonempty, zero-free and sign-alternating.
    void validate() const;

    bool operator==(const BurstSequence&) const = default;
};

/// Fixed-length real-valued encoding of a burst sequence: the first
/// original_burst_count positions hold bursts, the tail is zero padding.
struct FixedTrace {
    std::vector<double> values;
    int original_burst_count = 0;

    int length() const { return static_cast<int>(values.size()); }
};

/// Labeled trace set over K websites.
struct TraceCorpus {
    std::vector<FixedTrace> traces;
    std::vector<int> labels;
    int num_classes = 0;

    size_t size() const { return traces.size(); }

    /// Throws InvalidTrace on label/trace count or range violations.
    void validate() const;

    /// Indices of all traces labeled `cls`, in corpus order.
    std::vector<size_t> class_indices(int cls) const;

    /// Sub-corpus containing only traces labeled `cls` (labels preserved).
    TraceCorpus class_slice(int cls) const;
};

/// Per-class trace counts for the four-way experimental split.
struct SplitSpec {
    int awa_train = 0;
    int adversary_train = 0;
    int adversary_val = 0;
    int target_user = 0;

    int total() const { return awa_train + adversary_train + adversary_val + target_user; }
};

struct CorpusSplits {
    TraceCorpus awa_train;
    TraceCorpus adversary_train;
    TraceCorpus adversary_val;
    TraceCorpus target_user;
};

/// Run-length encodes a direction sequence into its canonical burst sequence.
BurstSequence ds_to_bs(const DirectionSequence& ds);

/// Expands a canonical burst sequence back into packet directions.
DirectionSequence bs_to_ds(const BurstSequence& bs);

/// Copies the first min(m, L) bursts into a length-L vector, zero-padding the
/// tail. Traces longer than L are truncated.
FixedTrace to_fixed(const BurstSequence& bs, int length);

/// Added dummy-packet volume of `transformed` over `original`, as a percent
/// of the original volume. Throws DegenerateTrace when the original trace
/// has zero total magnitude.
double bandwidth_overhead(const FixedTrace& original, const FixedTrace& transformed);

/// Element-wise mean of a nonempty set of equal-length traces.
std::vector<double> average_trace(const std::vector<FixedTrace>& traces);

/// Partitions a corpus into the four disjoint per-class subsets of `spec`,
/// drawing traces in seeded shuffled order. Deterministic for a fixed seed.
CorpusSplits split_corpus(const TraceCorpus& corpus, const SplitSpec& spec, uint64_t order_seed);

} // namespace awa
