#pragma once

// Bottom-up merge sort. Runs of width 1, 2, 4, ... are merged pairwise
// between two buffers; a merge of lengths a and b costs at most a+b-1
// comparisons, so the total never exceeds n * ceil(log2 n).

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "omega/structures/step_counter.hpp"

namespace omega::structures {

template <typename T, typename Less = std::less<T>>
std::vector<T> stable_sort(std::vector<T> items, Less less = {}, StepCounter* counter = nullptr) {
    const std::size_t n = items.size();
    if (n < 2) {
        return items;
    }
    auto compare = [&](const T& a, const T& b) {
        if (counter != nullptr) {
            ++counter->comparisons;
        }
        return less(a, b);
    };
    std::vector<T> scratch(n);
    std::vector<T>* from = &items;
    std::vector<T>* to = &scratch;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo < n; lo += 2 * width) {
            const std::size_t mid = std::min(lo + width, n);
            const std::size_t hi = std::min(lo + 2 * width, n);
            std::size_t i = lo;
            std::size_t j = mid;
            std::size_t k = lo;
            while (i < mid && j < hi) {
                // Ties take the left run: equal keys keep input order.
                if (compare((*from)[j], (*from)[i])) {
                    (*to)[k++] = std::move((*from)[j++]);
                } else {
                    (*to)[k++] = std::move((*from)[i++]);
                }
            }
            while (i < mid) {
                (*to)[k++] = std::move((*from)[i++]);
            }
            while (j < hi) {
                (*to)[k++] = std::move((*from)[j++]);
            }
        }
        std::swap(from, to);
    }
    return std::move(*from);
}

// n * ceil(log2 n) + n.
inline std::uint64_t sort_comparison_bound(std::size_t n) {
    std::uint64_t levels = 0;
    while ((std::size_t{1} << levels) < n) {
        ++levels;
    }
    return static_cast<std::uint64_t>(n) * levels + n;
}

}  // namespace omega::structures
