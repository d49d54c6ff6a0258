#pragma once

// Persistent AVL map. Nodes record the heights of both subtrees, so balance
// checks read only nodes on the search path; a node off the path is visited
// only when a rotation restructures it.

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "omega/structures/step_counter.hpp"

namespace omega::structures {

template <typename K, typename V, typename Less = std::less<K>>
class OrderedMap {
    struct Node;
    using NodePtr = std::shared_ptr<const Node>;

    // A subtree together with its height, so parents never dereference a
    // child just to learn how tall it is.
    struct Sub {
        NodePtr node;
        int height = 0;
    };

    struct Node {
        K key;
        V value;
        Sub left;
        Sub right;
    };

public:
    OrderedMap() = default;
    explicit OrderedMap(Less less) : less_(std::move(less)) {}

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }
    int height() const { return root_.height; }

    std::optional<V> find(const K& key, StepCounter* counter = nullptr) const {
        const Node* node = root_.node.get();
        while (node != nullptr) {
            visit(counter);
            if (compare(key, node->key, counter)) {
                node = node->left.node.get();
            } else if (compare(node->key, key, counter)) {
                node = node->right.node.get();
            } else {
                return node->value;
            }
        }
        return std::nullopt;
    }

    bool contains(const K& key, StepCounter* counter = nullptr) const { return find(key, counter).has_value(); }

    // Inserts or replaces.
    OrderedMap insert(K key, V value, StepCounter* counter = nullptr) const {
        bool added = false;
        OrderedMap out(*this);
        out.root_ = insert_at(root_, std::move(key), std::move(value), added, counter);
        out.size_ += added ? 1 : 0;
        return out;
    }

    OrderedMap remove(const K& key, StepCounter* counter = nullptr) const {
        bool removed = false;
        Sub root = remove_at(root_, key, removed, counter);
        if (!removed) {
            return *this;
        }
        OrderedMap out(*this);
        out.root_ = std::move(root);
        --out.size_;
        return out;
    }

    // Strictly ascending by key.
    std::vector<std::pair<K, V>> enumerate() const {
        std::vector<std::pair<K, V>> out;
        out.reserve(size_);
        std::vector<const Node*> stack;
        const Node* node = root_.node.get();
        while (node != nullptr || !stack.empty()) {
            while (node != nullptr) {
                stack.push_back(node);
                node = node->left.node.get();
            }
            node = stack.back();
            stack.pop_back();
            out.emplace_back(node->key, node->value);
            node = node->right.node.get();
        }
        return out;
    }

    // Checks ordering, recorded heights and the balance condition.
    bool check_invariants() const {
        const K* previous = nullptr;
        return check(root_, previous) >= 0;
    }

private:
    bool compare(const K& a, const K& b, StepCounter* counter) const {
        if (counter != nullptr) {
            ++counter->comparisons;
        }
        return less_(a, b);
    }

    static Sub make(K key, V value, Sub left, Sub right) {
        const int h = 1 + std::max(left.height, right.height);
        return Sub{std::make_shared<const Node>(Node{std::move(key), std::move(value), std::move(left), std::move(right)}),
                   h};
    }

    static Sub rotate_right(K key, V value, const Node& l, Sub right) {
        Sub inner = make(std::move(key), std::move(value), l.right, std::move(right));
        return make(l.key, l.value, l.left, std::move(inner));
    }

    static Sub rotate_left(K key, V value, Sub left, const Node& r) {
        Sub inner = make(std::move(key), std::move(value), std::move(left), r.left);
        return make(r.key, r.value, std::move(inner), r.right);
    }

    // Rebuilds a node whose subtrees differ in height by at most 2.
    static Sub balance(K key, V value, Sub left, Sub right, StepCounter* counter) {
        if (left.height > right.height + 1) {
            visit(counter);
            const Node& l = *left.node;
            if (l.left.height >= l.right.height) {
                return rotate_right(std::move(key), std::move(value), l, std::move(right));
            }
            visit(counter);
            const Node& lr = *l.right.node;
            Sub new_left = make(l.key, l.value, l.left, lr.left);
            Sub new_right = make(std::move(key), std::move(value), lr.right, std::move(right));
            return make(lr.key, lr.value, std::move(new_left), std::move(new_right));
        }
        if (right.height > left.height + 1) {
            visit(counter);
            const Node& r = *right.node;
            if (r.right.height >= r.left.height) {
                return rotate_left(std::move(key), std::move(value), std::move(left), r);
            }
            visit(counter);
            const Node& rl = *r.left.node;
            Sub new_left = make(std::move(key), std::move(value), std::move(left), rl.left);
            Sub new_right = make(r.key, r.value, rl.right, r.right);
            return make(rl.key, rl.value, std::move(new_left), std::move(new_right));
        }
        return make(std::move(key), std::move(value), std::move(left), std::move(right));
    }

    Sub insert_at(const Sub& sub, K key, V value, bool& added, StepCounter* counter) const {
        if (sub.node == nullptr) {
            added = true;
            return make(std::move(key), std::move(value), Sub{}, Sub{});
        }
        visit(counter);
        const Node& n = *sub.node;
        if (compare(key, n.key, counter)) {
            Sub left = insert_at(n.left, std::move(key), std::move(value), added, counter);
            return balance(n.key, n.value, std::move(left), n.right, counter);
        }
        if (compare(n.key, key, counter)) {
            Sub right = insert_at(n.right, std::move(key), std::move(value), added, counter);
            return balance(n.key, n.value, n.left, std::move(right), counter);
        }
        return make(std::move(key), std::move(value), n.left, n.right);
    }

    // Removes the minimum of a non-empty subtree, handing back its entry.
    static Sub remove_min(const Sub& sub, K& key, V& value, StepCounter* counter) {
        visit(counter);
        const Node& n = *sub.node;
        if (n.left.node == nullptr) {
            key = n.key;
            value = n.value;
            return n.right;
        }
        Sub left = remove_min(n.left, key, value, counter);
        return balance(n.key, n.value, std::move(left), n.right, counter);
    }

    Sub remove_at(const Sub& sub, const K& key, bool& removed, StepCounter* counter) const {
        if (sub.node == nullptr) {
            return sub;
        }
        visit(counter);
        const Node& n = *sub.node;
        if (compare(key, n.key, counter)) {
            Sub left = remove_at(n.left, key, removed, counter);
            return removed ? balance(n.key, n.value, std::move(left), n.right, counter) : sub;
        }
        if (compare(n.key, key, counter)) {
            Sub right = remove_at(n.right, key, removed, counter);
            return removed ? balance(n.key, n.value, n.left, std::move(right), counter) : sub;
        }
        removed = true;
        if (n.left.node == nullptr) {
            return n.right;
        }
        if (n.right.node == nullptr) {
            return n.left;
        }
        K successor_key = n.key;
        V successor_value = n.value;
        Sub right = remove_min(n.right, successor_key, successor_value, counter);
        return balance(std::move(successor_key), std::move(successor_value), n.left, std::move(right), counter);
    }

    // Height of the subtree, or -1 on a violation.
    int check(const Sub& sub, const K*& previous) const {
        if (sub.node == nullptr) {
            return sub.height == 0 ? 0 : -1;
        }
        const Node& n = *sub.node;
        const int lh = check(n.left, previous);
        if (lh < 0 || (previous != nullptr && !less_(*previous, n.key))) {
            return -1;
        }
        previous = &n.key;
        const int rh = check(n.right, previous);
        if (rh < 0 || std::abs(lh - rh) > 1 || sub.height != 1 + std::max(lh, rh)) {
            return -1;
        }
        return sub.height;
    }

    Sub root_;
    std::size_t size_ = 0;
    Less less_{};
};

}  // namespace omega::structures
