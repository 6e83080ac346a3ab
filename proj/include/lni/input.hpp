#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lni/corpus.hpp"
#include "lni/error.hpp"

namespace lni {

inline constexpr std::size_t kDefaultInputDim = 5;

/// Fixed-dimension byte encoding of a name.
using InputVector = std::vector<std::uint8_t>;

/// Folds a name into `out.size()` bytes.
///
/// Names no longer than the dimension are copied and zero-padded. Longer names
/// are split into dimension-sized sub-vectors (last one zero-padded) and the
/// sub-vectors are combined position-wise with XOR.
inline void process_into(std::string_view name, std::span<std::uint8_t> out) {
    if (out.empty()) throw ConfigError("input dimension must be >= 1");
    if (name.empty()) throw ConfigError("cannot process an empty name");
    const std::size_t dim = out.size();
    for (auto& b : out) b = 0;
    for (std::size_t i = 0; i < name.size(); ++i)
        out[i % dim] ^= static_cast<std::uint8_t>(name[i]);
}

inline InputVector process(std::string_view name, std::size_t dim = kDefaultInputDim) {
    InputVector v(dim);
    process_into(name, v);
    return v;
}

/// Lexicographic order from index 0 (most significant) down. Total order on
/// vectors of equal dimension.
inline std::strong_ordering vector_order(const InputVector& a, const InputVector& b) {
    if (a.size() != b.size()) throw ConfigError("input vector dimension mismatch");
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return std::strong_ordering::less;
        if (a[i] > b[i]) return std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
}

/// Fraction of names whose input vector coincides with at least one other
/// name's. Distinct names that fold to the same vector both count.
inline double collision_rate(const Dataset& d, std::size_t dim = kDefaultInputDim) {
    if (d.empty()) throw ConfigError("collision rate of an empty dataset");
    std::unordered_map<std::string, std::size_t> groups;
    groups.reserve(d.size() * 2);
    std::string key(dim, '\0');
    for (const auto& name : d.names) {
        process_into(name, {reinterpret_cast<std::uint8_t*>(key.data()), dim});
        ++groups[key];
    }
    std::size_t colliding = 0;
    for (const auto& [_, count] : groups)
        if (count > 1) colliding += count;
    return static_cast<double>(colliding) / static_cast<double>(d.size());
}

}  // namespace lni
