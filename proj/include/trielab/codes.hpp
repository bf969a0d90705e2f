#pragma once

// ============================================================================
// Variable-to-fixed dictionaries (Khodak and Tunstall constructions).
//
// A dictionary is a complete prefix-free set of binary phrases: the leaves of
// a binary parse tree in which every internal node has both children.  A
// source string is segmented greedily: walk the tree on successive bits until
// a leaf is hit, emit that leaf's index as a fixed-width codeword, restart at
// the root.
//
//   * Khodak construction, parameter R >= 1: a word w is an internal node of
//     the parse tree iff P(w) >= 1/R (ties at exactly 1/R stay internal).
//     The phrase length then equals the first-passage index
//     min{k : -ln P(first k bits) > ln R}.
//   * Tunstall construction, parameter M >= 2: starting from the two-leaf
//     tree {0, 1}, repeatedly split the most probable leaf until there are
//     M leaves.  Probability ties are resolved exactly (integer lattice
//     comparison for commensurable sources, deterministic log-sum comparison
//     otherwise) and then lexicographically smallest-first.
//
// Phrase indices/codewords are assigned in lexicographic phrase order.
// ============================================================================

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "source.hpp"

namespace trielab {

struct phrase_statistics {
    double mean_length;      // E D = sum P(w) |w|
    double second_moment;    // E D^2
    double variance;         // Var D
    double kappa;            // lg M / E D  (code bits emitted per source bit)
    double kraft_sum;        // sum P(w); 1 for a complete dictionary
    uint32_t min_length;
    uint32_t max_length;
};

class dictionary {
public:
    enum class method : uint8_t { khodak = 0, tunstall = 1, custom = 2 };

    // ---- constructions ----------------------------------------------------

    [[nodiscard]] static dictionary khodak(const source_params& src, double R) {
        if (!(R >= 1.0) || !std::isfinite(R))
            throw std::invalid_argument("khodak requires R >= 1");
        // The phrase count grows like R/H; refuse sizes that cannot be
        // materialized (length statistics at large R are sampled by the
        // first-passage representation instead, no dictionary needed).
        if (R > 67108864.0)
            throw std::invalid_argument("khodak dictionary too large to materialize (R > 2^26)");
        dictionary d(src, method::khodak, R);
        const double log_R = std::log(R);
        std::vector<uint8_t> word;
        if (src.arithmetic()) {
            // Integer-lattice classification: -ln P(w) = L(w) * d with
            // L(w) = ones*a + zeros*b, so P(w) >= 1/R  <=>  L(w) <= lnR/d.
            // The +1e-9 absorbs the float division; L is an exact integer.
            const int64_t threshold =
                static_cast<int64_t>(std::floor(log_R / src.span() + 1e-9));
            d.grow_khodak_lattice(word, 0, 0, threshold);
        } else {
            d.grow_khodak_float(word, 0.0, log_R);
        }
        d.finalize();
        return d;
    }

    [[nodiscard]] static dictionary tunstall(const source_params& src, uint64_t M) {
        if (M < 2) throw std::invalid_argument("tunstall requires M >= 2");
        dictionary d(src, method::tunstall, static_cast<double>(M));
        // Heap entry: (sort key, phrase).  Pop order = most probable first,
        // lexicographically smallest on exact ties.
        struct entry {
            double neg_log_p;     // -ln P(w), computed from bit counts
            int64_t lattice;      // exact key for commensurable sources
            std::vector<uint8_t> word;
        };
        const bool arith = src.arithmetic();
        auto later = [arith](const entry& x, const entry& y) {
            // true when x pops after y
            if (arith) {
                if (x.lattice != y.lattice) return x.lattice > y.lattice;
            } else {
                if (x.neg_log_p != y.neg_log_p) return x.neg_log_p > y.neg_log_p;
            }
            return std::lexicographical_compare(y.word.begin(), y.word.end(),
                                                x.word.begin(), x.word.end());
        };
        std::priority_queue<entry, std::vector<entry>, decltype(later)> heap(later);
        auto push_word = [&](std::vector<uint8_t> w) {
            uint64_t ones = 0;
            for (uint8_t bit : w) ones += bit;
            const uint64_t zeros = w.size() - ones;
            entry e;
            e.neg_log_p = -(static_cast<double>(ones) * src.log_p() +
                            static_cast<double>(zeros) * src.log_q());
            e.lattice = arith ? src.lattice_index(static_cast<int64_t>(ones),
                                                  static_cast<int64_t>(zeros))
                              : 0;
            e.word = std::move(w);
            heap.push(std::move(e));
        };
        push_word({0});
        push_word({1});
        uint64_t leaves = 2;
        while (leaves < M) {
            entry top = heap.top();
            heap.pop();
            std::vector<uint8_t> w0 = top.word;
            w0.push_back(0);
            std::vector<uint8_t> w1 = std::move(top.word);
            w1.push_back(1);
            push_word(std::move(w0));
            push_word(std::move(w1));
            ++leaves;
        }
        while (!heap.empty()) {
            d.phrases_.push_back(heap.top().word);
            heap.pop();
        }
        d.finalize();
        return d;
    }

    // Validates and adopts an explicit phrase set (e.g. read back from a
    // VFC1 stream): must be nonempty, prefix-free and complete.
    [[nodiscard]] static dictionary from_phrases(const source_params& src,
                                                 std::vector<std::vector<uint8_t>> phrases) {
        dictionary d(src, method::custom, 0.0);
        d.phrases_ = std::move(phrases);
        d.finalize();
        return d;
    }

    // ---- basic accessors ---------------------------------------------------

    [[nodiscard]] uint64_t size() const noexcept { return phrases_.size(); }
    [[nodiscard]] const std::vector<std::vector<uint8_t>>& phrases() const noexcept {
        return phrases_;
    }
    [[nodiscard]] const source_params& source() const noexcept { return src_; }
    [[nodiscard]] method construction() const noexcept { return method_; }
    [[nodiscard]] double parameter() const noexcept { return parameter_; }

    // Fixed codeword width: smallest ell with 2^ell >= M.
    [[nodiscard]] uint32_t codeword_bits() const noexcept {
        uint32_t ell = 1;
        while ((uint64_t{1} << ell) < phrases_.size()) ++ell;
        return ell;
    }

    [[nodiscard]] double phrase_probability(uint64_t index) const {
        return src_.prefix_probability(phrases_.at(index));
    }

    [[nodiscard]] phrase_statistics statistics() const {
        phrase_statistics st{};
        st.min_length = ~0u;
        double mean = 0.0, second = 0.0, kraft = 0.0;
        for (const auto& w : phrases_) {
            const double pw = src_.prefix_probability(w);
            const double len = static_cast<double>(w.size());
            mean += pw * len;
            second += pw * len * len;
            kraft += pw;
            st.min_length = std::min<uint32_t>(st.min_length, static_cast<uint32_t>(w.size()));
            st.max_length = std::max<uint32_t>(st.max_length, static_cast<uint32_t>(w.size()));
        }
        st.mean_length = mean;
        st.second_moment = second;
        st.variance = second - mean * mean;
        st.kraft_sum = kraft;
        st.kappa = std::log2(static_cast<double>(phrases_.size())) / mean;
        return st;
    }

    // ---- parsing -----------------------------------------------------------

    // Greedy segmentation of a finite bit sequence.  A final partial phrase
    // is completed by descending through 0-children (completeness guarantees
    // a leaf); the decoder truncates back to the recorded bit count.
    [[nodiscard]] std::vector<uint32_t> encode_bits(const std::vector<uint8_t>& bits) const {
        std::vector<uint32_t> codewords;
        uint64_t pos = 0;
        while (pos < bits.size()) {
            int32_t node = root_;
            while (tree_[node].phrase < 0) {
                const uint8_t bit = (pos < bits.size() && bits[pos]) ? 1 : 0;
                ++pos;
                node = tree_[node].child[bit];
            }
            codewords.push_back(static_cast<uint32_t>(tree_[node].phrase));
        }
        return codewords;
    }

    // Inverse of encode_bits: expands codewords and truncates to n_bits.
    [[nodiscard]] std::vector<uint8_t> decode_bits(const std::vector<uint32_t>& codewords,
                                                   uint64_t n_bits) const {
        std::vector<uint8_t> bits;
        bits.reserve(n_bits);
        for (uint32_t cw : codewords) {
            if (cw >= phrases_.size())
                throw std::out_of_range("codeword exceeds dictionary size");
            const auto& w = phrases_[cw];
            bits.insert(bits.end(), w.begin(), w.end());
            if (bits.size() >= n_bits) break;
        }
        if (bits.size() < n_bits)
            throw std::runtime_error("codeword stream too short for recorded length");
        bits.resize(n_bits);
        return bits;
    }

    // Length of the single phrase starting at 1-indexed bit `start` of s.
    [[nodiscard]] uint32_t phrase_length_at(const string_handle& s, uint64_t start) const {
        int32_t node = root_;
        uint32_t len = 0;
        while (tree_[node].phrase < 0) {
            node = tree_[node].child[s.bit_at(start + len)];
            ++len;
        }
        return len;
    }

    // Number of phrases needed to cover the first n bits of s (the final
    // phrase may overrun past n).  Equals min{k : D_1 + ... + D_k >= n}.
    [[nodiscard]] uint64_t cover_count(const string_handle& s, uint64_t n) const {
        uint64_t covered = 0;
        uint64_t k = 0;
        while (covered < n) {
            covered += phrase_length_at(s, covered + 1);
            ++k;
        }
        return k;
    }

private:
    dictionary(const source_params& src, method m, double param)
        : src_(src), method_(m), parameter_(param) {}

    void grow_khodak_lattice(std::vector<uint8_t>& word, int64_t ones, int64_t zeros,
                             int64_t threshold) {
        if (src_.lattice_index(ones, zeros) > threshold) {
            phrases_.push_back(word);
            return;
        }
        word.push_back(0);
        grow_khodak_lattice(word, ones, zeros + 1, threshold);
        word.back() = 1;
        grow_khodak_lattice(word, ones + 1, zeros, threshold);
        word.pop_back();
    }

    void grow_khodak_float(std::vector<uint8_t>& word, double neg_log_p, double log_R) {
        if (neg_log_p > log_R + 1e-12) {
            phrases_.push_back(word);
            return;
        }
        word.push_back(0);
        grow_khodak_float(word, neg_log_p - src_.log_q(), log_R);
        word.back() = 1;
        grow_khodak_float(word, neg_log_p - src_.log_p(), log_R);
        word.pop_back();
    }

    struct tree_node {
        int32_t child[2] = {-1, -1};
        int32_t phrase = -1;
    };

    // Sorts phrases, builds the parse tree, verifies prefix-freeness and
    // completeness (every internal node has both children).
    void finalize() {
        if (phrases_.empty()) throw std::invalid_argument("dictionary has no phrases");
        std::sort(phrases_.begin(), phrases_.end());
        tree_.clear();
        tree_.push_back(tree_node{});
        root_ = 0;
        for (uint32_t idx = 0; idx < phrases_.size(); ++idx) {
            const auto& w = phrases_[idx];
            if (w.empty()) throw std::invalid_argument("empty phrase");
            int32_t node = root_;
            for (uint8_t bit : w) {
                if (tree_[node].phrase >= 0)
                    throw std::invalid_argument("phrase set is not prefix-free");
                int32_t next = tree_[node].child[bit];
                if (next < 0) {
                    next = static_cast<int32_t>(tree_.size());
                    tree_.push_back(tree_node{});
                    tree_[node].child[bit] = next;
                }
                node = next;
            }
            if (tree_[node].phrase >= 0 || tree_[node].child[0] >= 0 ||
                tree_[node].child[1] >= 0)
                throw std::invalid_argument("phrase set is not prefix-free");
            tree_[node].phrase = static_cast<int32_t>(idx);
        }
        for (const auto& nd : tree_) {
            if (nd.phrase < 0 && (nd.child[0] < 0 || nd.child[1] < 0))
                throw std::invalid_argument("phrase set is not complete");
        }
    }

    source_params src_;
    method method_;
    double parameter_;
    std::vector<std::vector<uint8_t>> phrases_;
    std::vector<tree_node> tree_;
    int32_t root_ = 0;
};

}  // namespace trielab
