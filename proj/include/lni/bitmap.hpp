#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "lni/error.hpp"

namespace lni {

/// Hard cap on entries per part: the offset token must fit in a 2-byte cell
/// with 0 reserved for "empty".
inline constexpr std::size_t kMaxEntriesPerPart = 65535;

/// P equal parts of S_p two-byte cells. A cell holds 0 (empty) or a 1-based
/// offset token into the part's store.
struct EnhancedBitmap {
    std::size_t parts = 0;
    std::size_t slots_per_part = 0;
    std::vector<std::uint16_t> cells;  // parts * slots_per_part
    std::uint64_t occupied = 0;        // nonzero cells

    std::size_t total_slots() const { return parts * slots_per_part; }

    std::uint16_t cell(std::size_t part, std::size_t slot) const {
        return cells[part * slots_per_part + slot];
    }

    /// Fraction of cells still zero.
    double empty_slot_ratio() const {
        const auto total = static_cast<double>(total_slots());
        return (total - static_cast<double>(occupied)) / total;
    }

    /// Exact footprint of the slot array: 2 bytes per cell.
    std::uint64_t size_bytes() const { return static_cast<std::uint64_t>(total_slots()) * 2; }
};

/// Builds a zeroed bitmap with S_p = ceil(total_slots / parts).
inline EnhancedBitmap new_bitmap(std::size_t parts, std::size_t total_slots) {
    if (parts == 0) throw ConfigError("bitmap must have at least one part");
    if (total_slots == 0) throw ConfigError("bitmap must have at least one slot");
    EnhancedBitmap bm;
    bm.parts = parts;
    bm.slots_per_part = (total_slots + parts - 1) / parts;
    bm.cells.assign(bm.parts * bm.slots_per_part, 0);
    return bm;
}

/// Slot within a part for a CDF estimate: min(floor(cdf * S_p), S_p - 1).
inline std::size_t slot_of(double cdf, std::size_t slots_per_part) {
    if (slots_per_part < 1) throw ConfigError("slots_per_part must be >= 1");
    const double scaled = std::floor(cdf * static_cast<double>(slots_per_part));
    if (!(scaled > 0)) return 0;
    const auto slot = static_cast<std::size_t>(scaled);
    return slot >= slots_per_part ? slots_per_part - 1 : slot;
}

/// Append-only per-part entry storage with simulated byte addressing. Each
/// part owns a fixed 65536-entry address window, so simulated addresses are
/// unique across parts.
template <typename Entry>
struct PartedStore {
    std::size_t entry_size = 8;  // simulated bytes per entry, for address arithmetic
    std::vector<std::vector<Entry>> parts;

    explicit PartedStore(std::size_t part_count, std::size_t entry_size_bytes = 8)
        : entry_size(entry_size_bytes), parts(part_count) {
        if (part_count == 0) throw ConfigError("store must have at least one part");
        if (entry_size_bytes == 0) throw ConfigError("entry size must be >= 1");
    }

    std::size_t entry_count(std::size_t part) const { return parts[part].size(); }

    std::uint64_t total_entries() const {
        std::uint64_t n = 0;
        for (const auto& p : parts) n += p.size();
        return n;
    }

    /// Simulated base byte address of a part's storage window.
    std::uint64_t base_addr(std::size_t part) const {
        return static_cast<std::uint64_t>(part) * (kMaxEntriesPerPart + 1) * entry_size;
    }

    /// Simulated bytes occupied by stored entries.
    std::uint64_t simulated_bytes() const { return total_entries() * entry_size; }
};

enum class InsertStatus { inserted, collision };

struct InsertResult {
    InsertStatus status;
    std::uint16_t token = 0;  // valid when status == inserted

    bool inserted() const { return status == InsertStatus::inserted; }
};

/// Inserts an entry at (part, slot): an empty cell takes the 1-based token of
/// the appended entry; an occupied cell reports a collision and mutates
/// nothing. A part at 65535 entries raises a capacity error.
template <typename Entry>
inline InsertResult insert(EnhancedBitmap& bm, PartedStore<Entry>& store, std::size_t part,
                           std::size_t slot, Entry entry) {
    if (part >= bm.parts || slot >= bm.slots_per_part)
        throw ConfigError("insert position out of range");
    std::uint16_t& cell = bm.cells[part * bm.slots_per_part + slot];
    if (cell != 0) return {InsertStatus::collision};
    auto& bucket = store.parts[part];
    if (bucket.size() >= kMaxEntriesPerPart)
        throw CapacityError("part store full: offset token would overflow 16 bits");
    bucket.push_back(std::move(entry));
    cell = static_cast<std::uint16_t>(bucket.size());
    bm.occupied += 1;
    return {InsertStatus::inserted, cell};
}

template <typename Entry>
struct LookupResult {
    bool hit = false;
    std::uint64_t address = 0;  // simulated: base_addr[part] + (token-1) * entry_size
    const Entry* entry = nullptr;
};

/// Resolves (part, slot) to the stored entry and its simulated address, or a
/// miss when the cell is zero.
template <typename Entry>
inline LookupResult<Entry> lookup(const EnhancedBitmap& bm, const PartedStore<Entry>& store,
                                  std::size_t part, std::size_t slot) {
    if (part >= bm.parts || slot >= bm.slots_per_part)
        throw ConfigError("lookup position out of range");
    const std::uint16_t token = bm.cells[part * bm.slots_per_part + slot];
    if (token == 0) return {};
    const std::uint64_t address =
        store.base_addr(part) + static_cast<std::uint64_t>(token - 1) * store.entry_size;
    return {true, address, &store.parts[part][token - 1]};
}

/// Fig.-7-style flat slot index across the whole bitmap.
inline std::uint64_t global_slot(const EnhancedBitmap& bm, std::size_t part, std::size_t slot) {
    return static_cast<std::uint64_t>(part) * bm.slots_per_part + slot;
}

}  // namespace lni
