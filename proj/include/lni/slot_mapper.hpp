#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lni/bitmap.hpp"
#include "lni/corpus.hpp"
#include "lni/error.hpp"
#include "lni/pyramid.hpp"

namespace lni {

/// Slot-mapping experiments (false-positive sweeps, empty-slot ratios,
/// slots-required searches) evaluate the same name set at many slot budgets.
/// The mappers below precompute one key per name so each budget costs a
/// linear pass instead of a rehash or model re-evaluation.

/// Uniform hash-mod mapper: key = hash(name), slot = key mod S.
class HashMapping {
  public:
    template <typename Hasher>
    HashMapping(std::string label, const Dataset& d, Hasher hasher) : label_(std::move(label)) {
        if (d.empty()) throw ConfigError("cannot map an empty dataset");
        keys_.reserve(d.size());
        for (const auto& name : d.names) keys_.push_back(hasher(name));
    }

    const std::string& label() const { return label_; }
    std::size_t count() const { return keys_.size(); }

    /// A hash table can use any budget exactly.
    std::uint64_t effective_slots(std::uint64_t requested) const { return requested; }

    std::uint64_t slot(std::size_t i, std::uint64_t total_slots) const {
        return keys_[i] % total_slots;
    }

  private:
    std::string label_;
    std::vector<std::uint64_t> keys_;
};

/// The learned pipeline as a mapper: per name a (region, cdf) pair; the slot
/// budget is split into the model's R parts exactly like the Enhanced Bitmap,
/// so S_p = ceil(S / R) and the effective budget is R * S_p.
class LniMapping {
  public:
    LniMapping(std::string label, const Dataset& d, const PyramidNN& model)
        : label_(std::move(label)), parts_(model.config.regions) {
        if (d.empty()) throw ConfigError("cannot map an empty dataset");
        regions_.reserve(d.size());
        cdfs_.reserve(d.size());
        for (const auto& name : d.names) {
            const RegionCdf rc = predict(model, process(name, model.config.input_dim));
            regions_.push_back(rc.region);
            cdfs_.push_back(rc.cdf);
        }
    }

    const std::string& label() const { return label_; }
    std::size_t count() const { return regions_.size(); }

    std::uint64_t effective_slots(std::uint64_t requested) const {
        const std::uint64_t per_part = (requested + parts_ - 1) / parts_;
        return parts_ * per_part;
    }

    std::uint64_t slot(std::size_t i, std::uint64_t total_slots) const {
        const std::uint64_t per_part = (total_slots + parts_ - 1) / parts_;
        return static_cast<std::uint64_t>(regions_[i]) * per_part +
               slot_of(cdfs_[i], static_cast<std::size_t>(per_part));
    }

  private:
    std::string label_;
    std::uint64_t parts_;
    std::vector<std::uint32_t> regions_;
    std::vector<double> cdfs_;
};

struct MappingStats {
    std::uint64_t slots = 0;           // effective slot count used
    double collision_fraction = 0;     // names landing on an occupied slot / names
    double empty_slot_ratio = 0;       // slots left empty / slots
};

/// Maps every name into `requested_slots` slots (insert order = dataset
/// order) and reports collision and occupancy fractions.
template <typename Mapping>
MappingStats mapping_stats(const Mapping& m, std::uint64_t requested_slots) {
    if (requested_slots < 1) throw ConfigError("slot budget must be >= 1");
    const std::uint64_t slots = m.effective_slots(requested_slots);
    std::vector<bool> taken(slots, false);
    std::uint64_t collisions = 0;
    std::uint64_t occupied = 0;
    for (std::size_t i = 0; i < m.count(); ++i) {
        const std::uint64_t s = m.slot(i, slots);
        if (taken[s]) {
            ++collisions;
        } else {
            taken[s] = true;
            ++occupied;
        }
    }
    MappingStats st;
    st.slots = slots;
    st.collision_fraction = static_cast<double>(collisions) / static_cast<double>(m.count());
    st.empty_slot_ratio =
        static_cast<double>(slots - occupied) / static_cast<double>(slots);
    return st;
}

/// Smallest slot budget (a multiple of `granularity`) whose build-set
/// collision fraction is at or below `target_fp`. The fraction is treated as
/// monotone non-increasing in the budget, so the search doubles upward to
/// bracket the target and then bisects over granularity multiples. Throws
/// when even `max_slots` cannot reach the target (e.g. duplicate keys).
template <typename Mapping>
std::uint64_t slots_required_for_fp(const Mapping& m, double target_fp, std::uint64_t granularity,
                                    std::uint64_t max_slots = 1ull << 30) {
    if (!(target_fp > 0) || target_fp > 1) throw ConfigError("target fp must be in (0, 1]");
    if (granularity < 1) throw ConfigError("granularity must be >= 1");
    auto fp_at = [&](std::uint64_t mult) {
        return mapping_stats(m, mult * granularity).collision_fraction;
    };

    const std::uint64_t max_mult = std::max<std::uint64_t>(1, max_slots / granularity);
    if (fp_at(1) <= target_fp) return granularity;
    std::uint64_t lo = 1;  // fails
    std::uint64_t hi = 1;
    while (true) {
        if (hi >= max_mult) throw Error("fp target unreachable within the slot cap");
        hi = std::min(hi * 2, max_mult);
        if (fp_at(hi) <= target_fp) break;
        lo = hi;
    }
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (fp_at(mid) <= target_fp)
            hi = mid;
        else
            lo = mid;
    }
    return hi * granularity;
}

}  // namespace lni
