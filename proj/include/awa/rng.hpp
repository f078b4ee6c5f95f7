#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace awa {

/// 64-bit mix used for seed derivation and fingerprints (splitmix64 finalizer).
uint64_t mix64(uint64_t x);

/// Order-sensitive combine of a running hash with one value.
uint64_t hash_combine(uint64_t h, uint64_t v);

/// Combine a running hash with a domain-separation tag.
uint64_t hash_tag(uint64_t h, std::string_view tag);

/// FNV-1a over raw bytes; used for file/manifest hashes.
uint64_t hash_bytes(const void* data, size_t n);

std::string hex64(uint64_t v);

/// Deterministic RNG with platform-independent distributions.
///
/// std::mt19937_64 has a fully specified sequence, but the standard
/// distributions do not, so uniform/gaussian/shuffle are implemented here.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next_u64() { return eng_(); }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be positive.
    uint64_t uniform_int(uint64_t n);

    /// Standard Gaussian via Box-Muller.
    double gaussian();

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(uniform_int(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    /// k distinct indices drawn from [0, n), in draw order. k <= n.
    std::vector<int> sample_indices(int n, int k);

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// The four secret random elements of one training run.
struct SeedBundle {
    uint64_t param_init = 0;
    uint64_t data_order = 0;
    uint64_t pair_list = 0;
    uint64_t noise = 0;

    /// Order-sensitive digest over all four fields; any single-field change
    /// changes the fingerprint.
    uint64_t fingerprint() const;
};

/// Seeds for one website pair, derived order-free from the bundle so pairs
/// may train in parallel or in any order with identical results.
struct PairSeeds {
    uint64_t gen_a_init = 0;
    uint64_t gen_b_init = 0;
    uint64_t disc_init = 0;
    uint64_t data_order = 0;
    uint64_t noise = 0;

    static PairSeeds derive(const SeedBundle& bundle, int pair_index);
};

/// Fixed test-phase noise seed for one website.
uint64_t website_noise_seed(const SeedBundle& bundle, int website_id);

} // namespace awa
