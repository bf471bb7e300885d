#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace htex {

inline constexpr int kMinOrder = 2;
inline constexpr int kMaxOrder = 8;

/// n! for the small orders used here.
constexpr std::uint32_t factorial(int n) noexcept {
    std::uint32_t f = 1;
    for (int i = 2; i <= n; ++i) f *= static_cast<std::uint32_t>(i);
    return f;
}

/// Ordinal pattern of a window of D values: position i holds the rank of
/// element i within the window (0 = smallest).
class OrdinalPattern {
public:
    OrdinalPattern() = default;
    explicit OrdinalPattern(std::span<const std::uint8_t> ranks) : size_(ranks.size()) {
        if (ranks.size() > ranks_.size()) {
            throw std::invalid_argument("ordinal pattern longer than " +
                                        std::to_string(kMaxOrder));
        }
        for (std::size_t i = 0; i < ranks.size(); ++i) ranks_[i] = ranks[i];
    }
    OrdinalPattern(std::initializer_list<std::uint8_t> ranks)
        : OrdinalPattern(std::span<const std::uint8_t>(ranks.begin(), ranks.size())) {}

    std::size_t size() const noexcept { return size_; }
    std::span<const std::uint8_t> ranks() const noexcept { return {ranks_.data(), size_}; }
    std::uint8_t operator[](std::size_t i) const { return ranks_[i]; }

    bool is_permutation() const noexcept {
        std::uint32_t seen = 0;
        for (std::size_t i = 0; i < size_; ++i) {
            if (ranks_[i] >= size_ || (seen >> ranks_[i]) & 1U) return false;
            seen |= 1U << ranks_[i];
        }
        return true;
    }

    friend bool operator==(const OrdinalPattern& a, const OrdinalPattern& b) noexcept {
        if (a.size_ != b.size_) return false;
        for (std::size_t i = 0; i < a.size_; ++i) {
            if (a.ranks_[i] != b.ranks_[i]) return false;
        }
        return true;
    }

private:
    std::array<std::uint8_t, kMaxOrder> ranks_{};
    std::size_t size_ = 0;
};

/// Rank vector of a window. Equal values are ranked by position: the
/// earlier element gets the lower rank.
inline OrdinalPattern extract_pattern(std::span<const double> window) {
    if (window.size() > static_cast<std::size_t>(kMaxOrder)) {
        throw std::invalid_argument("window longer than " + std::to_string(kMaxOrder));
    }
    std::array<std::uint8_t, kMaxOrder> ranks{};
    for (std::size_t i = 0; i < window.size(); ++i) {
        std::uint8_t r = 0;
        for (std::size_t j = 0; j < window.size(); ++j) {
            if (window[j] < window[i] || (j < i && window[j] == window[i])) ++r;
        }
        ranks[i] = r;
    }
    return OrdinalPattern(std::span<const std::uint8_t>(ranks.data(), window.size()));
}

/// Lexicographic rank of a permutation (Lehmer code read in the factorial
/// number system). The identity has rank 0, the reversal rank D! - 1.
inline std::uint32_t lehmer_rank(const OrdinalPattern& p) {
    if (!p.is_permutation()) throw std::invalid_argument("lehmer_rank: not a permutation");
    const auto n = static_cast<int>(p.size());
    std::uint32_t rank = 0;
    for (int i = 0; i < n; ++i) {
        std::uint32_t smaller_after = 0;
        for (int j = i + 1; j < n; ++j) {
            if (p[j] < p[i]) ++smaller_after;
        }
        rank += smaller_after * factorial(n - 1 - i);
    }
    return rank;
}

/// Inverse of lehmer_rank.
inline OrdinalPattern pattern_from_rank(int order, std::uint32_t rank) {
    if (order < 1 || order > kMaxOrder) throw std::invalid_argument("pattern_from_rank: bad order");
    if (rank >= factorial(order)) throw std::out_of_range("pattern_from_rank: rank too large");
    std::array<std::uint8_t, kMaxOrder> pool{};
    for (int i = 0; i < order; ++i) pool[i] = static_cast<std::uint8_t>(i);
    std::array<std::uint8_t, kMaxOrder> out{};
    int remaining = order;
    for (int i = 0; i < order; ++i) {
        const std::uint32_t f = factorial(order - 1 - i);
        const auto digit = static_cast<int>(rank / f);
        rank %= f;
        out[i] = pool[digit];
        for (int k = digit; k + 1 < remaining; ++k) pool[k] = pool[k + 1];
        --remaining;
    }
    return OrdinalPattern(std::span<const std::uint8_t>(out.data(), order));
}

/// Relative frequencies of the D! ordinal patterns, indexed by Lehmer rank.
/// Immutable once built.
class OrdinalDistribution {
public:
    OrdinalDistribution(int order, int delay, std::vector<std::uint64_t> counts)
        : order_(order), delay_(delay), counts_(std::move(counts)) {
        if (order < kMinOrder || order > kMaxOrder) {
            throw std::invalid_argument("order must be in [2, 8], got " + std::to_string(order));
        }
        if (delay < 1) throw std::invalid_argument("delay must be >= 1");
        if (counts_.size() != factorial(order)) {
            throw std::invalid_argument("count vector must have D! entries");
        }
        for (auto c : counts_) samples_ += c;
        probs_.assign(counts_.size(), 0.0);
        if (samples_ > 0) {
            const auto total = static_cast<double>(samples_);
            for (std::size_t i = 0; i < counts_.size(); ++i) {
                probs_[i] = static_cast<double>(counts_[i]) / total;
            }
        }
    }

    int order() const noexcept { return order_; }
    int delay() const noexcept { return delay_; }
    std::uint64_t samples() const noexcept { return samples_; }
    std::size_t alphabet_size() const noexcept { return counts_.size(); }
    std::span<const std::uint64_t> counts() const noexcept { return counts_; }
    std::span<const double> probs() const noexcept { return probs_; }

    /// Fewer than 10 samples per possible pattern; the estimate is still
    /// returned but its quantifiers are biased towards order.
    bool undersampled() const noexcept {
        return samples_ < std::uint64_t{10} * alphabet_size();
    }

    std::string warning() const {
        if (!undersampled()) return {};
        return "undersampled: " + std::to_string(samples_) + " patterns for an alphabet of " +
               std::to_string(alphabet_size()) + " (D=" + std::to_string(order_) +
               "); fewer than 10 per pattern";
    }

private:
    int order_;
    int delay_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t samples_ = 0;
    std::vector<double> probs_;
};

/// Lehmer rank of the window seq[start], seq[start+delay], ...,
/// seq[start+(order-1)*delay] without materialising the rank vector.
/// Element i contributes #{j > i : x_j < x_i} as its factoradic digit,
/// which is exactly the Lehmer digit of the tie-broken rank vector.
inline std::uint32_t window_rank(std::span<const double> seq, std::size_t start, int order,
                                 int delay) noexcept {
    std::array<double, kMaxOrder> w{};
    for (int i = 0; i < order; ++i) w[i] = seq[start + static_cast<std::size_t>(i) * delay];
    std::uint32_t rank = 0;
    for (int i = 0; i < order; ++i) {
        std::uint32_t digit = 0;
        for (int j = i + 1; j < order; ++j) digit += w[j] < w[i] ? 1U : 0U;
        rank = rank * static_cast<std::uint32_t>(order - i) + digit;
    }
    return rank;
}

/// Bandt-Pompe distribution of order D and delay tau over every window of
/// the sequence: N - (D-1)*tau samples.
inline OrdinalDistribution build_distribution(std::span<const double> seq, int order, int delay) {
    if (order < kMinOrder || order > kMaxOrder) {
        throw std::invalid_argument("embedding dimension must be in [2, 8], got " +
                                    std::to_string(order));
    }
    if (delay < 1) throw std::invalid_argument("delay must be >= 1, got " + std::to_string(delay));
    const std::size_t span_len = static_cast<std::size_t>(order - 1) * delay;
    if (seq.size() <= span_len) {
        throw std::invalid_argument("sequence of length " + std::to_string(seq.size()) +
                                    " too short for D=" + std::to_string(order) +
                                    ", tau=" + std::to_string(delay));
    }
    std::vector<std::uint64_t> counts(factorial(order), 0);
    const std::size_t windows = seq.size() - span_len;
    for (std::size_t s = 0; s < windows; ++s) ++counts[window_rank(seq, s, order, delay)];
    return OrdinalDistribution(order, delay, std::move(counts));
}

}  // namespace htex
