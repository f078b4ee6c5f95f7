#include "awa/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace awa {

uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

uint64_t hash_combine(uint64_t h, uint64_t v) {
    return mix64(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

uint64_t hash_tag(uint64_t h, std::string_view tag) {
    for (unsigned char c : tag) h = hash_combine(h, c);
    return h;
}

uint64_t hash_bytes(const void* data, size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    uint64_t h = 0xcbf29ce484222325ULL;
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

uint64_t Rng::uniform_int(uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::uniform_int: n must be positive");
    // Debiased multiply-shift (Lemire).
    uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto lo = static_cast<uint64_t>(m);
    if (lo < n) {
        uint64_t t = (0 - n) % n;
        while (lo < t) {
            x = next_u64();
            m = static_cast<__uint128_t>(x) * n;
            lo = static_cast<uint64_t>(m);
        }
    }
    return static_cast<uint64_t>(m >> 64);
}

double Rng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

std::vector<int> Rng::sample_indices(int n, int k) {
    if (k > n) throw std::invalid_argument("Rng::sample_indices: k > n");
    std::vector<int> idx(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
    // Partial Fisher-Yates: the first k slots end up with the sample.
    for (int i = 0; i < k; ++i) {
        int j = i + static_cast<int>(uniform_int(static_cast<uint64_t>(n - i)));
        std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
    }
    idx.resize(static_cast<size_t>(k));
    return idx;
}

uint64_t SeedBundle::fingerprint() const {
    uint64_t h = hash_tag(0x5eedb0ddULL, "awa.seed_bundle");
    h = hash_combine(h, param_init);
    h = hash_combine(h, data_order);
    h = hash_combine(h, pair_list);
    h = hash_combine(h, noise);
    return h;
}

PairSeeds PairSeeds::derive(const SeedBundle& bundle, int pair_index) {
    auto idx = static_cast<uint64_t>(pair_index);
    PairSeeds s;
    s.gen_a_init = hash_combine(hash_tag(bundle.param_init, "pair.gen_a"), idx);
    s.gen_b_init = hash_combine(hash_tag(bundle.param_init, "pair.gen_b"), idx);
    s.disc_init = hash_combine(hash_tag(bundle.param_init, "pair.disc"), idx);
    s.data_order = hash_combine(hash_tag(bundle.data_order, "pair.data"), idx);
    s.noise = hash_combine(hash_tag(bundle.noise, "pair.noise"), idx);
    return s;
}

uint64_t website_noise_seed(const SeedBundle& bundle, int website_id) {
    return hash_combine(hash_tag(bundle.noise, "site.noise"),
                        static_cast<uint64_t>(website_id));
}

} // namespace awa
