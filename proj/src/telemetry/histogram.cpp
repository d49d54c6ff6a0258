#include "omega/telemetry/histogram.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace omega::telemetry {

LatencyHistogram::LatencyHistogram(HistogramConfig config) : config_(config) {
    if (config_.sub_bucket_bits == 0 || config_.sub_bucket_bits > 20) {
        throw std::invalid_argument("sub_bucket_bits must be in 1..20");
    }
    if (config_.max_value < config_.min_value) {
        throw std::invalid_argument("max_value < min_value");
    }
    counts_.assign(bucket_index(config_.max_value) + 1, 0);
}

std::size_t LatencyHistogram::bucket_index(std::uint64_t value) const {
    const unsigned b = config_.sub_bucket_bits;
    const std::uint64_t linear = std::uint64_t{1} << b;
    if (value < linear) {
        return static_cast<std::size_t>(value);
    }
    const unsigned octave = static_cast<unsigned>(std::bit_width(value)) - 1;  // >= b
    const unsigned shift = octave - b;
    const std::uint64_t sub = (value >> shift) - linear;
    return static_cast<std::size_t>(linear + std::uint64_t{shift} * linear + sub);
}

std::uint64_t LatencyHistogram::bucket_low(std::size_t index) const {
    const unsigned b = config_.sub_bucket_bits;
    const std::uint64_t linear = std::uint64_t{1} << b;
    if (index < linear) {
        return index;
    }
    const std::uint64_t shift = (index - linear) / linear;
    const std::uint64_t sub = (index - linear) % linear;
    return (linear + sub) << shift;
}

std::uint64_t LatencyHistogram::bucket_high(std::size_t index) const {
    const std::uint64_t linear = std::uint64_t{1} << config_.sub_bucket_bits;
    if (index < linear) {
        return index;
    }
    const std::uint64_t shift = (index - linear) / linear;
    return bucket_low(index) + (std::uint64_t{1} << shift) - 1;
}

std::uint64_t LatencyHistogram::representative(std::size_t index) const {
    const std::uint64_t lo = bucket_low(index);
    return lo + (bucket_high(index) - lo) / 2;
}

double LatencyHistogram::precision() const { return std::ldexp(1.0, -static_cast<int>(config_.sub_bucket_bits) - 1); }

void LatencyHistogram::record(std::uint64_t value) {
    if (value > config_.max_value) {
        value = config_.max_value;
        ++overflow_;
    } else if (value < config_.min_value) {
        value = config_.min_value;
        ++overflow_;
    }
    ++counts_[bucket_index(value)];
    ++total_;
    min_seen_ = std::min(min_seen_, value);
    max_seen_ = std::max(max_seen_, value);
}

std::uint64_t LatencyHistogram::quantile(double q) const {
    if (total_ == 0) {
        throw EmptyHistogram();
    }
    q = std::clamp(q, 0.0, 1.0);
    const auto rank = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(q * static_cast<double>(total_))));
    std::uint64_t seen = 0;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        seen += counts_[i];
        if (seen >= rank) {
            return std::clamp(representative(i), min_seen_, max_seen_);
        }
    }
    return max_seen_;
}

std::size_t LatencyHistogram::memory_bytes() const {
    return sizeof(*this) + counts_.capacity() * sizeof(std::uint64_t);
}

std::string LatencyHistogram::export_csv() const {
    std::ostringstream out;
    out << "bucket_low,bucket_high,count\n";
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        if (counts_[i] != 0) {
            out << bucket_low(i) << ',' << bucket_high(i) << ',' << counts_[i] << '\n';
        }
    }
    return out.str();
}

void LatencyHistogram::reset() {
    std::fill(counts_.begin(), counts_.end(), 0);
    total_ = 0;
    overflow_ = 0;
    min_seen_ = UINT64_MAX;
    max_seen_ = 0;
}

}  // namespace omega::telemetry
