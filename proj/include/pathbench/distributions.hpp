#pragma once

#include <boost/random/mersenne_twister.hpp>

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "pathbench/config.hpp"

namespace pathbench {

/// Mixes a parent seed with an index (splitmix64 finalizer). Used for child
/// streams so parallel work stays reproducible.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Seeded generator. Backed by mt19937_64 and Boost.Random distributions,
/// whose output does not depend on the standard library in use.
class RandomStream {
public:
    using engine_type = boost::random::mt19937_64;

    explicit RandomStream(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }
    RandomStream child(std::uint64_t index) const { return RandomStream(derive_seed(seed_, index)); }

    /// Uniform integer on [lo, hi].
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);
    /// Uniform real on [0, 1).
    double uniform01();
    double normal(double mu, double sigma);

    engine_type& engine() noexcept { return engine_; }

private:
    std::uint64_t seed_;
    engine_type engine_;
};

/// Exact inverse-CDF sampler for P(k) proportional to k^-s on [1, kmax].
class ZipfSampler {
public:
    ZipfSampler(double s, std::uint64_t kmax);

    std::uint64_t operator()(RandomStream& rng) const;
    double probability(std::uint64_t k) const;
    std::uint64_t kmax() const noexcept { return cdf_.size(); }

private:
    // cdf_[k-1] = P(X <= k), last entry forced to 1.
    std::vector<double> cdf_;
};

/// Degree sampler with any per-distribution tables built once.
/// `opposite_population` is the default Zipfian support cap.
class DegreeSampler {
public:
    DegreeSampler(const DegreeDistribution& dist, std::uint64_t opposite_population);

    std::uint64_t operator()(RandomStream& rng) const;
    const DegreeDistribution& distribution() const noexcept { return dist_; }

private:
    DegreeDistribution dist_;
    std::vector<ZipfSampler> zipf_;  // empty unless Zipfian
};

/// One degree draw. Zipfian draws use `dist.kmax` or else `opposite_population`.
/// Throws ContractError for NonSpecified.
std::uint64_t draw(const DegreeDistribution& dist, RandomStream& rng, std::uint64_t opposite_population = 1000);

/// In-place Fisher-Yates.
template <class T>
void shuffle(std::span<T> v, RandomStream& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform_int(0, i - 1));
        std::swap(v[i - 1], v[j]);
    }
}

template <class T>
void shuffle(std::vector<T>& v, RandomStream& rng) {
    shuffle(std::span<T>(v), rng);
}

// Front `k` positions become a uniform ordered sample of the whole span.
template <class T>
void partial_shuffle(std::span<T> v, std::size_t k, RandomStream& rng) {
    k = std::min(k, v.size());
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = static_cast<std::size_t>(rng.uniform_int(i, v.size() - 1));
        std::swap(v[i], v[j]);
    }
}

}  // namespace pathbench
