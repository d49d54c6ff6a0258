#pragma once

// Persistent vector: a 32-way trie with every leaf at the same depth and no
// tail buffer. Each update copies the root-to-leaf path and nothing else.

#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "omega/structures/step_counter.hpp"

namespace omega::structures {

inline constexpr std::size_t kBranchBits = 5;
inline constexpr std::size_t kBranch = std::size_t{1} << kBranchBits;

// Interior levels above the leaves for n elements. A root-to-leaf walk
// visits trie_depth_for(n) + 1 nodes, which is ceil(log32 n) for n > 1.
inline std::size_t trie_depth_for(std::size_t n) {
    std::size_t depth = 0;
    std::size_t capacity = kBranch;
    while (capacity < n) {
        capacity <<= kBranchBits;
        ++depth;
    }
    return depth;
}

// ceil(log32 n), with 0 for n <= 1.
inline std::size_t ceil_log32(std::size_t n) { return n <= 1 ? 0 : trie_depth_for(n) + 1; }

template <typename T>
class PersistentVector {
    struct Node {
        std::vector<std::shared_ptr<const Node>> children;
        std::vector<T> values;
    };
    using NodePtr = std::shared_ptr<const Node>;

public:
    PersistentVector() = default;

    std::size_t size() const { return count_; }
    bool empty() const { return count_ == 0; }
    // Interior levels; 0 when the root is a leaf.
    std::size_t depth() const { return depth_; }

    const T& get(std::size_t index, StepCounter* counter = nullptr) const {
        check_index(index);
        const Node* node = root_.get();
        for (std::size_t level = depth_; level > 0; --level) {
            visit(counter);
            node = node->children[(index >> (level * kBranchBits)) & (kBranch - 1)].get();
        }
        visit(counter);
        return node->values[index & (kBranch - 1)];
    }

    PersistentVector set(std::size_t index, T value, StepCounter* counter = nullptr) const {
        check_index(index);
        return PersistentVector(set_path(root_, depth_, index, std::move(value), counter), depth_, count_);
    }

    PersistentVector push_back(T value, StepCounter* counter = nullptr) const {
        if (count_ == 0) {
            auto leaf = std::make_shared<Node>();
            leaf->values.push_back(std::move(value));
            visit(counter);
            return PersistentVector(std::move(leaf), 0, 1);
        }
        if (count_ == capacity(depth_)) {
            // Root overflow: the old root becomes child 0 of a new root.
            auto root = std::make_shared<Node>();
            visit(counter);
            root->children.push_back(root_);
            root->children.push_back(new_path(depth_, std::move(value), counter));
            return PersistentVector(std::move(root), depth_ + 1, count_ + 1);
        }
        return PersistentVector(push_path(root_, depth_, count_, std::move(value), counter), depth_, count_ + 1);
    }

    // Returns the shortened vector and the removed element.
    std::pair<PersistentVector, T> pop_back(StepCounter* counter = nullptr) const {
        if (count_ == 0) {
            throw StructureError(StructureErrc::PopEmpty, "pop on empty vector");
        }
        const std::size_t n = count_ - 1;
        T last{};
        NodePtr root = pop_path(root_, depth_, n, last, counter);
        if (n == 0) {
            return {PersistentVector(), std::move(last)};
        }
        std::size_t depth = depth_;
        if (depth > 0 && n <= capacity(depth - 1)) {
            // Only child 0 remains under the root.
            root = root->children[0];
            --depth;
        }
        return {PersistentVector(std::move(root), depth, n), std::move(last)};
    }

    std::vector<T> to_vector() const {
        std::vector<T> out;
        out.reserve(count_);
        append_all(root_.get(), depth_, out);
        return out;
    }

private:
    PersistentVector(NodePtr root, std::size_t depth, std::size_t count)
        : root_(std::move(root)), depth_(depth), count_(count) {}

    static std::size_t capacity(std::size_t depth) { return std::size_t{1} << ((depth + 1) * kBranchBits); }

    void check_index(std::size_t index) const {
        if (index >= count_) {
            throw StructureError(StructureErrc::IndexOutOfBounds,
                                 "index " + std::to_string(index) + " >= size " + std::to_string(count_));
        }
    }

    static NodePtr set_path(const NodePtr& node, std::size_t level, std::size_t index, T value, StepCounter* counter) {
        visit(counter);
        auto copy = std::make_shared<Node>(*node);
        if (level == 0) {
            copy->values[index & (kBranch - 1)] = std::move(value);
        } else {
            auto& child = copy->children[(index >> (level * kBranchBits)) & (kBranch - 1)];
            child = set_path(child, level - 1, index, std::move(value), counter);
        }
        return copy;
    }

    // A fresh spine of `level` interior nodes ending in a one-element leaf.
    static NodePtr new_path(std::size_t level, T value, StepCounter* counter) {
        visit(counter);
        auto node = std::make_shared<Node>();
        if (level == 0) {
            node->values.push_back(std::move(value));
        } else {
            node->children.push_back(new_path(level - 1, std::move(value), counter));
        }
        return node;
    }

    static NodePtr push_path(const NodePtr& node, std::size_t level, std::size_t index, T value, StepCounter* counter) {
        visit(counter);
        auto copy = std::make_shared<Node>(*node);
        if (level == 0) {
            copy->values.push_back(std::move(value));
            return copy;
        }
        const std::size_t slot = (index >> (level * kBranchBits)) & (kBranch - 1);
        if (slot < copy->children.size()) {
            copy->children[slot] = push_path(copy->children[slot], level - 1, index, std::move(value), counter);
        } else {
            copy->children.push_back(new_path(level - 1, std::move(value), counter));
        }
        return copy;
    }

    // Removes element `index` (the last one); returns null for an emptied
    // subtree.
    static NodePtr pop_path(const NodePtr& node, std::size_t level, std::size_t index, T& last,
                            StepCounter* counter) {
        visit(counter);
        if (level == 0) {
            last = node->values.back();
            if (node->values.size() == 1) {
                return nullptr;
            }
            auto copy = std::make_shared<Node>(*node);
            copy->values.pop_back();
            return copy;
        }
        const std::size_t slot = (index >> (level * kBranchBits)) & (kBranch - 1);
        NodePtr child = pop_path(node->children[slot], level - 1, index, last, counter);
        if (child == nullptr && slot == 0) {
            return nullptr;
        }
        auto copy = std::make_shared<Node>(*node);
        if (child == nullptr) {
            copy->children.pop_back();
        } else {
            copy->children[slot] = std::move(child);
        }
        return copy;
    }

    static void append_all(const Node* node, std::size_t level, std::vector<T>& out) {
        if (node == nullptr) {
            return;
        }
        if (level == 0) {
            out.insert(out.end(), node->values.begin(), node->values.end());
            return;
        }
        for (const auto& child : node->children) {
            append_all(child.get(), level - 1, out);
        }
    }

    NodePtr root_;
    std::size_t depth_ = 0;
    std::size_t count_ = 0;
};

}  // namespace omega::structures
