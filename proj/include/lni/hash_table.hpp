#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lni/error.hpp"
#include "lni/hashes.hpp"

namespace lni {

/// Separate-chaining hash table over full names. Stores complete keys, so it
/// has zero false positives and zero false negatives by construction; it is
/// the comparator the learned index is measured against.
template <typename Entry, typename Hasher = Fnv1aHasher>
class ChainedHashTable {
  public:
    explicit ChainedHashTable(std::size_t buckets, Hasher hasher = {})
        : heads_(buckets, kNil), hash_(hasher) {
        if (buckets == 0) throw ConfigError("hash table needs at least one bucket");
    }

    std::size_t bucket_count() const { return heads_.size(); }
    std::size_t size() const { return pool_.size(); }

    void insert(std::string_view name, Entry entry) {
        const std::size_t b = static_cast<std::size_t>(hash_(name) % heads_.size());
        if (heads_[b] == kNil) ++occupied_;
        pool_.push_back(Node{std::string(name), std::move(entry), heads_[b]});
        heads_[b] = static_cast<std::uint32_t>(pool_.size() - 1);
    }

    /// Walks the bucket chain comparing full names.
    const Entry* find(std::string_view name) const {
        std::uint32_t cur = heads_[static_cast<std::size_t>(hash_(name) % heads_.size())];
        while (cur != kNil) {
            const Node& n = pool_[cur];
            if (n.name == name) return &n.entry;
            cur = n.next;
        }
        return nullptr;
    }

    /// Fraction of buckets with no chain.
    double empty_bucket_ratio() const {
        return static_cast<double>(heads_.size() - occupied_) /
               static_cast<double>(heads_.size());
    }

    /// Bucket counts by chain length, starting at length 2 (singletons are
    /// not "chains" in the reported sense).
    std::map<std::size_t, std::size_t> chain_histogram() const {
        std::map<std::size_t, std::size_t> hist;
        for (const std::uint32_t head : heads_) {
            std::size_t len = 0;
            for (std::uint32_t cur = head; cur != kNil; cur = pool_[cur].next) ++len;
            if (len >= 2) ++hist[len];
        }
        return hist;
    }

    /// Index footprint at declared field widths: 4 bytes per bucket head plus,
    /// per stored name, the name bytes, a 4-byte chain link and a 4-byte entry
    /// reference. Entry payloads are excluded (they are identical across index
    /// kinds and reported separately).
    std::uint64_t size_bytes() const {
        std::uint64_t bytes = static_cast<std::uint64_t>(heads_.size()) * 4;
        for (const Node& n : pool_) bytes += n.name.size() + 4 + 4;
        return bytes;
    }

  private:
    struct Node {
        std::string name;
        Entry entry;
        std::uint32_t next;
    };

    static constexpr std::uint32_t kNil = 0xFFFFFFFFu;

    std::vector<std::uint32_t> heads_;
    std::vector<Node> pool_;
    Hasher hash_;
    std::size_t occupied_ = 0;
};

}  // namespace lni
