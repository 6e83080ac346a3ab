#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lni/error.hpp"

namespace lni {

/// Bit-level Patricia (crit-bit) trie over name bytes. Internal nodes test a
/// single bit (byte index + bit mask); leaves hold the full key and a 4-byte
/// entry reference. Path compression is structural: every internal node is
/// created with exactly two children. Bytes past the end of a name read as 0,
/// which is unambiguous because names are printable ASCII (never NUL).
class PatriciaTrie {
  public:
    struct Leaf {
        std::string name;
        std::uint32_t ref;
    };

    struct Internal {
        std::uint32_t byte;    // byte position tested
        std::uint8_t mask;     // single-bit mask within that byte
        std::uint32_t child[2];
    };

    std::size_t size() const { return leaves_.size(); }
    std::size_t internal_count() const { return internals_.size(); }

    /// Inserts a (name, entry reference) pair; returns false on a duplicate
    /// name (no mutation).
    bool insert(std::string_view name, std::uint32_t ref) {
        if (leaves_.size() >= kLeafBit) throw CapacityError("patricia trie node limit reached");
        if (leaves_.empty()) {
            leaves_.push_back(Leaf{std::string(name), ref});
            root_ = leaf_ref(0);
            return true;
        }

        // Walk to the closest existing leaf, then locate the first differing bit.
        const Leaf& best = leaves_[index_of(descend(name))];
        const std::size_t limit = std::max(name.size(), best.name.size());
        std::uint32_t crit_byte = 0;
        std::uint8_t diff = 0;
        for (std::size_t p = 0; p < limit; ++p) {
            diff = static_cast<std::uint8_t>(byte_at(name, p) ^ byte_at(best.name, p));
            if (diff != 0) {
                crit_byte = static_cast<std::uint32_t>(p);
                break;
            }
        }
        if (diff == 0) return false;
        std::uint8_t mask = diff;
        while ((mask & (mask - 1)) != 0) mask &= static_cast<std::uint8_t>(mask - 1);
        const int new_side = (byte_at(name, crit_byte) & mask) ? 1 : 0;

        leaves_.push_back(Leaf{std::string(name), ref});
        const std::uint32_t new_leaf = leaf_ref(static_cast<std::uint32_t>(leaves_.size() - 1));
        const auto new_node = static_cast<std::uint32_t>(internals_.size());
        internals_.push_back(Internal{crit_byte, mask, {0, 0}});
        internals_[new_node].child[new_side] = new_leaf;

        // Find where the new node belongs: above the first node that tests a
        // later bit than (crit_byte, mask); higher mask = more significant bit.
        std::uint32_t cur = root_;
        std::uint32_t parent = kNoParent;
        int parent_side = 0;
        while (is_internal(cur)) {
            const Internal& n = internals_[index_of(cur)];
            if (n.byte > crit_byte || (n.byte == crit_byte && n.mask < mask)) break;
            parent = index_of(cur);
            parent_side = (byte_at(name, n.byte) & n.mask) ? 1 : 0;
            cur = n.child[parent_side];
        }
        internals_[new_node].child[1 - new_side] = cur;
        if (parent == kNoParent)
            root_ = new_node;
        else
            internals_[parent].child[parent_side] = new_node;
        return true;
    }

    /// Exact-match lookup: descends by critical bits, then compares the full
    /// key at the terminal leaf.
    const Leaf* find(std::string_view name) const {
        if (leaves_.empty()) return nullptr;
        const Leaf& leaf = leaves_[index_of(descend(name))];
        return leaf.name == name ? &leaf : nullptr;
    }

    /// Footprint at declared field widths: per internal node a 4-byte byte
    /// index, 1-byte mask and two 4-byte child references (13 B); per leaf the
    /// name bytes plus a 4-byte entry reference.
    std::uint64_t size_bytes() const {
        std::uint64_t bytes = static_cast<std::uint64_t>(internals_.size()) * 13;
        for (const Leaf& l : leaves_) bytes += l.name.size() + 4;
        return bytes;
    }

    /// Structural audit used by the tests: every internal node reachable
    /// exactly once with two children ordered by strictly increasing bit
    /// position, and leaf count = internal count + 1.
    bool validate() const {
        if (leaves_.empty()) return internals_.empty();
        if (leaves_.size() != internals_.size() + 1) return false;
        std::size_t seen_internals = 0;
        std::size_t seen_leaves = 0;
        if (!audit(root_, -1, 0, seen_internals, seen_leaves)) return false;
        return seen_internals == internals_.size() && seen_leaves == leaves_.size();
    }

  private:
    static constexpr std::uint32_t kLeafBit = 0x80000000u;
    static constexpr std::uint32_t kNoParent = 0xFFFFFFFFu;

    static std::uint32_t leaf_ref(std::uint32_t i) { return i | kLeafBit; }
    static bool is_internal(std::uint32_t ref) { return (ref & kLeafBit) == 0; }
    static std::uint32_t index_of(std::uint32_t ref) { return ref & ~kLeafBit; }

    static std::uint8_t byte_at(std::string_view s, std::size_t i) {
        return i < s.size() ? static_cast<std::uint8_t>(s[i]) : 0;
    }

    std::uint32_t descend(std::string_view name) const {
        std::uint32_t cur = root_;
        while (is_internal(cur)) {
            const Internal& n = internals_[index_of(cur)];
            cur = n.child[(byte_at(name, n.byte) & n.mask) ? 1 : 0];
        }
        return cur;
    }

    bool audit(std::uint32_t ref, long prev_byte, std::uint8_t prev_mask,
               std::size_t& seen_internals, std::size_t& seen_leaves) const {
        if (!is_internal(ref)) {
            if (index_of(ref) >= leaves_.size()) return false;
            ++seen_leaves;
            return true;
        }
        if (index_of(ref) >= internals_.size()) return false;
        const Internal& n = internals_[index_of(ref)];
        // mask must be a single bit
        if (n.mask == 0 || (n.mask & (n.mask - 1)) != 0) return false;
        // bit positions strictly increase down the tree (mask rank descends
        // within a byte: a higher mask bit is a more significant, earlier bit)
        if (prev_byte >= 0) {
            const bool later = static_cast<long>(n.byte) > prev_byte ||
                               (static_cast<long>(n.byte) == prev_byte && n.mask < prev_mask);
            if (!later) return false;
        }
        ++seen_internals;
        return audit(n.child[0], static_cast<long>(n.byte), n.mask, seen_internals, seen_leaves) &&
               audit(n.child[1], static_cast<long>(n.byte), n.mask, seen_internals, seen_leaves);
    }

    std::vector<Internal> internals_;
    std::vector<Leaf> leaves_;
    std::uint32_t root_ = 0;
};

}  // namespace lni
