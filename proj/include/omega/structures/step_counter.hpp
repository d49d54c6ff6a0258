#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace omega::structures {

// Node visits and comparisons performed by one instrumented operation.
struct StepCounter {
    std::uint64_t node_visits = 0;
    std::uint64_t comparisons = 0;

    void reset() { *this = {}; }
};

inline void visit(StepCounter* c) {
    if (c != nullptr) {
        ++c->node_visits;
    }
}

enum class StructureErrc { IndexOutOfBounds, PopEmpty };

class StructureError : public std::out_of_range {
public:
    StructureError(StructureErrc code, const std::string& what) : std::out_of_range(what), code_(code) {}
    StructureErrc code() const noexcept { return code_; }

private:
    StructureErrc code_;
};

}  // namespace omega::structures
