#pragma once

// Log-linear latency histogram. Values below 2^b (b = sub_bucket_bits) get
// one bucket each; above that, every power-of-two octave is split into 2^b
// equal sub-buckets. A bucket's representative is its midpoint, so the
// relative error of any in-range value is at most 2^-(b+1).

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace omega::telemetry {

class EmptyHistogram : public std::runtime_error {
public:
    EmptyHistogram() : std::runtime_error("quantile of an empty histogram") {}
};

struct HistogramConfig {
    std::uint64_t min_value = 0;
    std::uint64_t max_value = 10'000'000'000;  // 10 s in ns
    unsigned sub_bucket_bits = 6;
};

class LatencyHistogram {
public:
    explicit LatencyHistogram(HistogramConfig config = {});

    // O(1): no allocation, index computed from the value alone.
    void record(std::uint64_t value);

    // Representative of the bucket holding the rank-th smallest value, with
    // rank = max(1, ceil(q * total)); clamped to the observed min/max.
    std::uint64_t quantile(double q) const;

    std::uint64_t total() const { return total_; }
    std::uint64_t overflow() const { return overflow_; }
    std::uint64_t min_seen() const { return min_seen_; }
    std::uint64_t max_seen() const { return max_seen_; }
    double precision() const;
    const HistogramConfig& config() const { return config_; }

    std::size_t bucket_count() const { return counts_.size(); }
    std::size_t bucket_index(std::uint64_t value) const;
    std::uint64_t bucket_low(std::size_t index) const;
    std::uint64_t bucket_high(std::size_t index) const;  // inclusive
    std::uint64_t representative(std::size_t index) const;

    // Bytes owned by the histogram, fixed at construction.
    std::size_t memory_bytes() const;

    // `bucket_low,bucket_high,count`, non-empty buckets ascending.
    std::string export_csv() const;

    void reset();

private:
    HistogramConfig config_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t total_ = 0;
    std::uint64_t overflow_ = 0;
    std::uint64_t min_seen_ = UINT64_MAX;
    std::uint64_t max_seen_ = 0;
};

}  // namespace omega::telemetry
