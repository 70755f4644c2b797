#include "pathbench/distributions.hpp"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include <algorithm>
#include <cmath>

#include "pathbench/errors.hpp"

namespace pathbench {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(seed) ^ (index + 0x632be59bd9b4e019ULL));
}

std::uint64_t RandomStream::uniform_int(std::uint64_t lo, std::uint64_t hi) {
    if (lo >= hi) return lo;
    boost::random::uniform_int_distribution<std::uint64_t> dist(lo, hi);
    return dist(engine_);
}

double RandomStream::uniform01() {
    boost::random::uniform_01<double> dist;
    return dist(engine_);
}

double RandomStream::normal(double mu, double sigma) {
    if (sigma <= 0.0) return mu;
    boost::random::normal_distribution<double> dist(mu, sigma);
    return dist(engine_);
}

ZipfSampler::ZipfSampler(double s, std::uint64_t kmax) {
    if (!(s > 0.0)) throw ContractError("zipfian exponent must be positive");
    if (kmax == 0) throw ContractError("zipfian support must be non-empty");
    cdf_.resize(kmax);
    double acc = 0.0;
    for (std::uint64_t k = 1; k <= kmax; ++k) {
        acc += std::pow(static_cast<double>(k), -s);
        cdf_[k - 1] = acc;
    }
    for (auto& c : cdf_) c /= acc;
    cdf_.back() = 1.0;
}

double ZipfSampler::probability(std::uint64_t k) const {
    if (k == 0 || k > cdf_.size()) return 0.0;
    return k == 1 ? cdf_[0] : cdf_[k - 1] - cdf_[k - 2];
}

std::uint64_t ZipfSampler::operator()(RandomStream& rng) const {
    const double u = rng.uniform01();
    // Mass concentrates on small ranks, so gallop from the front.
    std::size_t hi = 1;
    while (hi < cdf_.size() && cdf_[hi - 1] <= u) hi *= 2;
    hi = std::min(hi, cdf_.size());
    const std::size_t lo = hi / 2;
    auto it = std::upper_bound(cdf_.begin() + static_cast<std::ptrdiff_t>(lo),
                               cdf_.begin() + static_cast<std::ptrdiff_t>(hi), u);
    if (it == cdf_.end()) --it;
    return static_cast<std::uint64_t>(it - cdf_.begin()) + 1;
}

DegreeSampler::DegreeSampler(const DegreeDistribution& dist, std::uint64_t opposite_population) : dist_(dist) {
    if (!dist.specified()) throw ContractError("cannot draw from a nonspecified distribution");
    if (dist.kind == DistributionKind::Zipfian) {
        zipf_.emplace_back(dist.s, dist.kmax.value_or(std::max<std::uint64_t>(1, opposite_population)));
    }
}

std::uint64_t DegreeSampler::operator()(RandomStream& rng) const {
    switch (dist_.kind) {
        case DistributionKind::Uniform:
            return rng.uniform_int(static_cast<std::uint64_t>(dist_.min), static_cast<std::uint64_t>(dist_.max));
        case DistributionKind::Gaussian: {
            const double x = std::round(rng.normal(dist_.mu, dist_.sigma));
            return x <= 0.0 ? 0 : static_cast<std::uint64_t>(x);
        }
        case DistributionKind::Zipfian:
            return zipf_.front()(rng);
        case DistributionKind::NonSpecified:
            break;
    }
    throw ContractError("cannot draw from a nonspecified distribution");
}

std::uint64_t draw(const DegreeDistribution& dist, RandomStream& rng, std::uint64_t opposite_population) {
    return DegreeSampler(dist, opposite_population)(rng);
}

}  // namespace pathbench
