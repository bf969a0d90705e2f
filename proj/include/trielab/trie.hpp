#pragma once

// ============================================================================
// Random binary tries.
//
// A trie over a set S of infinite binary strings, with bucket capacity b >= 1:
//   * if |S| <= b the tree is a single external node storing S;
//   * otherwise the root is internal and the strings are partitioned by their
//     next bit into the left (0) and right (1) subtrie.  A side that receives
//     no strings simply has no child there.
// Thus a prefix w corresponds to an internal node iff at least b+1 strings
// start with w.  Every string lives in exactly one external node; the
// occupancy profile Z_j counts external nodes holding exactly j strings.
//
// Also provided:
//   * patricia_trie: the b = 1 trie with all one-child internal nodes
//     collapsed (every internal node binary, so exactly n - 1 of them);
//   * insert(): adds one string to a b = 1 trie, reporting the depth of the
//     new leaf and how many internal nodes were created (0 when the new
//     string fell into an empty slot).
// ============================================================================

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "source.hpp"

namespace trielab {

// A guard against pathological inputs (e.g. two identical strings, which a
// memoryless source produces with probability zero): no path may exceed this
// many bits.
inline constexpr uint32_t trie_max_depth = 1u << 14;

class binary_trie {
public:
    struct node {
        int32_t left = -1;               // child index or -1
        int32_t right = -1;              // child index or -1
        bool internal = false;
        std::vector<uint32_t> items;     // string indices, external nodes only
    };

    binary_trie() = default;

    // Builds the trie over the first `count` entries of `strings` (all of them
    // by default) with bucket capacity b.  `strings` must outlive the trie;
    // entries past `count` may still be passed to insert() later.
    binary_trie(const std::vector<string_handle>& strings, uint32_t bucket_capacity,
                size_t count = SIZE_MAX)
        : strings_(&strings), capacity_(bucket_capacity) {
        if (bucket_capacity == 0) throw std::invalid_argument("bucket capacity must be >= 1");
        std::vector<uint32_t> all(std::min(strings.size(), count));
        for (uint32_t i = 0; i < all.size(); ++i) all[i] = i;
        if (all.empty()) return;
        root_ = build_subtree(std::move(all), 0);
    }

    [[nodiscard]] uint32_t bucket_capacity() const noexcept { return capacity_; }
    [[nodiscard]] bool empty() const noexcept { return root_ < 0; }
    [[nodiscard]] int32_t root() const noexcept { return root_; }
    [[nodiscard]] const std::vector<node>& nodes() const noexcept { return nodes_; }

    [[nodiscard]] uint64_t internal_count() const noexcept {
        uint64_t c = 0;
        for (const auto& nd : nodes_) c += nd.internal ? 1 : 0;
        return c;
    }

    [[nodiscard]] uint64_t external_count() const noexcept {
        uint64_t c = 0;
        for (const auto& nd : nodes_) c += nd.internal ? 0 : 1;
        return c;
    }

    // Z_j for j = 1..b: number of external nodes storing exactly j strings.
    // sum_j j * Z_j equals the number of strings.
    [[nodiscard]] std::vector<uint64_t> occupancy_profile() const {
        std::vector<uint64_t> z(capacity_ + 1, 0);
        for (const auto& nd : nodes_) {
            if (!nd.internal) z.at(nd.items.size()) += 1;
        }
        z.erase(z.begin());  // drop the j = 0 slot; empty externals are not stored
        return z;
    }

    // Depth (edge count from the root) of the external node holding string i.
    [[nodiscard]] uint32_t depth_of(uint32_t index) const {
        return locate(index).second;
    }

    // ones - zeros along the root path of string i (path length = depth_of).
    [[nodiscard]] int64_t imbalance_of(uint32_t index) const {
        const uint32_t d = depth_of(index);
        int64_t delta = 0;
        const string_handle& s = (*strings_)[index];
        for (uint32_t k = 1; k <= d; ++k) delta += s.bit_at(k) ? 1 : -1;
        return delta;
    }

    // Inserts one more string (b = 1 tries only).  Returns {leaf depth of the
    // inserted string, number of internal nodes created}.
    struct insert_result {
        uint32_t depth;
        uint32_t new_internals;
    };

    insert_result insert(uint32_t index) {
        if (capacity_ != 1) throw std::logic_error("insert supports bucket capacity 1 only");
        const string_handle& s = (*strings_)[index];
        if (root_ < 0) {
            root_ = make_leaf(index);
            return {0, 0};
        }
        int32_t cur = root_;
        int32_t parent = -1;
        bool came_right = false;
        uint32_t depth = 0;
        while (nodes_[cur].internal) {
            ++depth;
            if (depth > trie_max_depth) throw std::runtime_error("trie depth limit exceeded");
            const bool bit = s.bit_at(depth) != 0;
            int32_t next = bit ? nodes_[cur].right : nodes_[cur].left;
            if (next < 0) {
                const int32_t leaf = make_leaf(index);
                (bit ? nodes_[cur].right : nodes_[cur].left) = leaf;
                return {depth, 0};
            }
            parent = cur;
            came_right = bit;
            cur = next;
        }
        // Collision with the external node `cur` at depth `depth`.
        const uint32_t other = nodes_[cur].items.front();
        const string_handle& t = (*strings_)[other];
        uint32_t agree = 0;
        while (s.bit_at(depth + 1 + agree) == t.bit_at(depth + 1 + agree)) {
            ++agree;
            if (depth + agree > trie_max_depth)
                throw std::runtime_error("trie depth limit exceeded");
        }
        // Replace the leaf by a chain of agree+1 internal nodes ending in a
        // branching node with the two leaves.  (Attach by index: make_internal
        // may reallocate the node vector.)
        int32_t chain_head = -1;
        int32_t prev = -1;
        bool prev_bit = false;
        for (uint32_t k = 0; k < agree; ++k) {
            const int32_t inner = make_internal();
            if (prev < 0) {
                chain_head = inner;
            } else {
                (prev_bit ? nodes_[prev].right : nodes_[prev].left) = inner;
            }
            prev = inner;
            prev_bit = s.bit_at(depth + 1 + k) != 0;
        }
        const int32_t split = make_internal();
        if (prev < 0) {
            chain_head = split;
        } else {
            (prev_bit ? nodes_[prev].right : nodes_[prev].left) = split;
        }
        const bool last_bit = s.bit_at(depth + 1 + agree) != 0;
        const int32_t new_leaf = make_leaf(index);
        (last_bit ? nodes_[split].right : nodes_[split].left) = new_leaf;
        (last_bit ? nodes_[split].left : nodes_[split].right) = cur;
        if (parent < 0) {
            root_ = chain_head;
        } else {
            (came_right ? nodes_[parent].right : nodes_[parent].left) = chain_head;
        }
        return {depth + agree + 1, agree + 1};
    }

    // Shape-and-content equality, independent of node storage order.
    [[nodiscard]] bool equivalent_to(const binary_trie& other) const {
        if (capacity_ != other.capacity_) return false;
        if ((root_ < 0) != (other.root_ < 0)) return false;
        if (root_ < 0) return true;
        return subtree_equal(root_, other, other.root_);
    }

    // Graphviz rendering (internal nodes as circles, external as boxes).
    [[nodiscard]] std::string to_dot() const {
        std::string out = "digraph trie {\n  node [fontname=\"monospace\"];\n";
        for (int32_t i = 0; i < static_cast<int32_t>(nodes_.size()); ++i) {
            const node& nd = nodes_[i];
            if (nd.internal) {
                out += "  n" + std::to_string(i) + " [shape=circle,label=\"\"];\n";
            } else {
                std::string label;
                for (uint32_t it : nd.items) {
                    if (!label.empty()) label += ",";
                    label += std::to_string(it);
                }
                out += "  n" + std::to_string(i) + " [shape=box,label=\"" + label + "\"];\n";
            }
            if (nd.left >= 0)
                out += "  n" + std::to_string(i) + " -> n" + std::to_string(nd.left) +
                       " [label=\"0\"];\n";
            if (nd.right >= 0)
                out += "  n" + std::to_string(i) + " -> n" + std::to_string(nd.right) +
                       " [label=\"1\"];\n";
        }
        out += "}\n";
        return out;
    }

private:
    friend class patricia_trie;

    int32_t make_leaf(uint32_t item) {
        nodes_.push_back(node{});
        nodes_.back().items.push_back(item);
        return static_cast<int32_t>(nodes_.size() - 1);
    }

    int32_t make_internal() {
        nodes_.push_back(node{});
        nodes_.back().internal = true;
        return static_cast<int32_t>(nodes_.size() - 1);
    }

    int32_t build_subtree(std::vector<uint32_t> group, uint32_t depth) {
        if (group.size() <= capacity_) {
            nodes_.push_back(node{});
            nodes_.back().items = std::move(group);
            return static_cast<int32_t>(nodes_.size() - 1);
        }
        if (depth >= trie_max_depth) throw std::runtime_error("trie depth limit exceeded");
        std::vector<uint32_t> zeros, ones;
        zeros.reserve(group.size());
        ones.reserve(group.size());
        for (uint32_t idx : group) {
            ((*strings_)[idx].bit_at(depth + 1) ? ones : zeros).push_back(idx);
        }
        group.clear();
        group.shrink_to_fit();
        const int32_t me = make_internal();
        if (!zeros.empty()) {
            const int32_t l = build_subtree(std::move(zeros), depth + 1);
            nodes_[me].left = l;
        }
        if (!ones.empty()) {
            const int32_t r = build_subtree(std::move(ones), depth + 1);
            nodes_[me].right = r;
        }
        return me;
    }

    // Returns {node index, depth} of the external node holding string `index`.
    [[nodiscard]] std::pair<int32_t, uint32_t> locate(uint32_t index) const {
        if (root_ < 0) throw std::out_of_range("empty trie");
        const string_handle& s = (*strings_)[index];
        int32_t cur = root_;
        uint32_t depth = 0;
        while (nodes_[cur].internal) {
            ++depth;
            const bool bit = s.bit_at(depth) != 0;
            cur = bit ? nodes_[cur].right : nodes_[cur].left;
            if (cur < 0) throw std::out_of_range("string not present in trie");
        }
        const auto& items = nodes_[cur].items;
        if (std::find(items.begin(), items.end(), index) == items.end())
            throw std::out_of_range("string not present in trie");
        return {cur, depth};
    }

    [[nodiscard]] bool subtree_equal(int32_t a, const binary_trie& ot, int32_t b) const {
        const node& na = nodes_[a];
        const node& nb = ot.nodes_[b];
        if (na.internal != nb.internal) return false;
        if (!na.internal) {
            std::vector<uint32_t> ia = na.items, ib = nb.items;
            std::sort(ia.begin(), ia.end());
            std::sort(ib.begin(), ib.end());
            return ia == ib;
        }
        if ((na.left >= 0) != (nb.left >= 0)) return false;
        if ((na.right >= 0) != (nb.right >= 0)) return false;
        if (na.left >= 0 && !subtree_equal(na.left, ot, nb.left)) return false;
        if (na.right >= 0 && !subtree_equal(na.right, ot, nb.right)) return false;
        return true;
    }

    const std::vector<string_handle>* strings_ = nullptr;
    uint32_t capacity_ = 1;
    int32_t root_ = -1;
    std::vector<node> nodes_;
};

// ---------------------------------------------------------------------------
// Patricia: path-compressed b = 1 trie
// ---------------------------------------------------------------------------

class patricia_trie {
public:
    struct node {
        int32_t left = -1;
        int32_t right = -1;
        bool internal = false;
        uint32_t item = 0;        // external nodes: the string index
        uint32_t prefix_bits = 0; // bits consumed from the root in the underlying trie
    };

    // Collapses every one-child internal node of a b = 1 trie with >= 2
    // strings; the result has exactly n - 1 internal nodes.
    [[nodiscard]] static patricia_trie from_trie(const binary_trie& t) {
        if (t.bucket_capacity() != 1)
            throw std::invalid_argument("patricia requires bucket capacity 1");
        if (t.root() < 0) throw std::invalid_argument("patricia requires a nonempty trie");
        patricia_trie p;
        p.root_ = p.compress(t, t.root(), 0);
        return p;
    }

    [[nodiscard]] const std::vector<node>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] int32_t root() const noexcept { return root_; }

    [[nodiscard]] uint64_t internal_count() const noexcept {
        uint64_t c = 0;
        for (const auto& nd : nodes_) c += nd.internal ? 1 : 0;
        return c;
    }

    // Depth of string i's leaf (number of branching nodes above it).
    [[nodiscard]] uint32_t depth_of(uint32_t index, const std::vector<string_handle>& strings) const {
        if (root_ < 0) throw std::out_of_range("empty patricia trie");
        const string_handle& s = strings[index];
        int32_t cur = root_;
        uint32_t depth = 0;
        while (nodes_[cur].internal) {
            // branch on the bit just past this node's compressed prefix
            const bool bit = s.bit_at(nodes_[cur].prefix_bits + 1) != 0;
            cur = bit ? nodes_[cur].right : nodes_[cur].left;
            if (cur < 0) throw std::out_of_range("string not present");
            ++depth;
        }
        if (nodes_[cur].item != index) throw std::out_of_range("string not present");
        return depth;
    }

private:
    int32_t compress(const binary_trie& t, int32_t src, uint32_t depth) {
        const auto& tn = t.nodes()[src];
        if (!tn.internal) {
            nodes_.push_back(node{});
            nodes_.back().item = tn.items.front();
            nodes_.back().prefix_bits = depth;
            return static_cast<int32_t>(nodes_.size() - 1);
        }
        if (tn.left >= 0 && tn.right >= 0) {
            const int32_t me = static_cast<int32_t>(nodes_.size());
            nodes_.push_back(node{});
            nodes_[me].internal = true;
            nodes_[me].prefix_bits = depth;
            const int32_t l = compress(t, tn.left, depth + 1);
            nodes_[me].left = l;
            const int32_t r = compress(t, tn.right, depth + 1);
            nodes_[me].right = r;
            return me;
        }
        // one-child internal node: skip it
        const int32_t only = tn.left >= 0 ? tn.left : tn.right;
        return compress(t, only, depth + 1);
    }

    int32_t root_ = -1;
    std::vector<node> nodes_;
};

}  // namespace trielab
