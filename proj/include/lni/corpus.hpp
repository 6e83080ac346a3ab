#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "lni/error.hpp"
#include "lni/rng.hpp"

namespace lni {

/// An NDN-style name: printable ASCII, '/'-separated components, no trailing newline.
using Name = std::string;

inline bool is_printable_ascii(std::string_view s) {
    for (unsigned char c : s)
        if (c < 0x20 || c > 0x7E) return false;
    return true;
}

inline bool is_valid_name(std::string_view s) {
    return !s.empty() && s.front() == '/' && is_printable_ascii(s);
}

/// An ordered collection of distinct names.
struct Dataset {
    std::vector<Name> names;

    std::size_t size() const { return names.size(); }
    bool empty() const { return names.empty(); }
};

/// Parameters for synthetic name generation.
///
/// Component lengths are drawn from [component_len_min, component_len_max] with a
/// power-shaped weighting chosen so the corpus mean name length tracks
/// target_mean_length (a plain uniform draw over the default ranges would land
/// near 34 B, not 26 B).
struct CorpusSpec {
    std::uint64_t count = 1;
    std::uint64_t seed = 0;
    unsigned component_count_min = 2;
    unsigned component_count_max = 6;
    unsigned component_len_min = 3;
    unsigned component_len_max = 12;
    double target_mean_length = 26.0;

    void validate() const {
        if (count < 1) throw ConfigError("corpus count must be >= 1");
        if (component_count_min < 1 || component_count_min > component_count_max)
            throw ConfigError("invalid component count range");
        if (component_len_min < 1 || component_len_min > component_len_max)
            throw ConfigError("invalid component length range");
        if (!(target_mean_length > 0)) throw ConfigError("target mean length must be positive");
    }
};

namespace detail {

// Component alphabet: lowercase letters, digits, '-', '_'.
inline constexpr char kNameAlphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789-_";
inline constexpr std::size_t kNameAlphabetSize = sizeof(kNameAlphabet) - 1;

// Shape exponent such that E[min + floor(u^gamma * span)] is close to the
// per-component length budget implied by target_mean_length.
inline double length_shape(const CorpusSpec& spec) {
    const double mean_components =
        0.5 * (spec.component_count_min + spec.component_count_max);
    const double want = spec.target_mean_length / mean_components - 1.0;  // per component
    const double span = spec.component_len_max - spec.component_len_min + 1.0;
    const double offset = want - spec.component_len_min + 0.5;
    if (offset <= 0.0) return 20.0;  // target at/below range floor: stay near min
    double gamma = span / offset - 1.0;
    return std::clamp(gamma, 0.05, 20.0);
}

inline void append_component(std::string& out, unsigned len, lni::detail::Rng& rng) {
    for (unsigned i = 0; i < len; ++i)
        out += kNameAlphabet[rng.bounded(kNameAlphabetSize)];
}

}  // namespace detail

/// Generates spec.count distinct names, deterministically for a fixed seed.
/// Throws Error if the retry budget (count * 100) is exhausted before reaching
/// count distinct names (namespace too small for the requested ranges).
inline Dataset generate_names(const CorpusSpec& spec) {
    spec.validate();
    detail::Rng rng(lni::detail::mix_seed(spec.seed, 0x6e616d6573ull));
    const double gamma = detail::length_shape(spec);
    const unsigned len_span = spec.component_len_max - spec.component_len_min + 1;

    Dataset out;
    out.names.reserve(spec.count);
    std::unordered_set<std::string> seen;
    seen.reserve(spec.count * 2);

    std::uint64_t attempts = 0;
    const std::uint64_t budget = spec.count * 100ull;
    std::string name;
    while (out.names.size() < spec.count) {
        if (++attempts > budget)
            throw Error("name generation exhausted retry budget; namespace too small");
        name.clear();
        const unsigned comps =
            spec.component_count_min +
            static_cast<unsigned>(rng.bounded(spec.component_count_max - spec.component_count_min + 1));
        for (unsigned c = 0; c < comps; ++c) {
            name += '/';
            const double u = rng.unit();
            const unsigned len =
                spec.component_len_min +
                std::min(len_span - 1, static_cast<unsigned>(std::pow(u, gamma) * len_span));
            detail::append_component(name, len, rng);
        }
        if (seen.contains(name)) continue;
        out.names.push_back(name);
        seen.insert(name);
    }
    return out;
}

/// Writes one name per line, LF-terminated ASCII.
inline void save_dataset(const Dataset& d, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    for (const auto& n : d.names) {
        f.write(n.data(), static_cast<std::streamsize>(n.size()));
        f.put('\n');
    }
    if (!f) throw IoError("write failed: " + path);
}

/// Reads a dataset saved by save_dataset. Rejects empty or non-printable-ASCII
/// lines (CR counts as malformed) and duplicate names, naming the line.
inline Dataset load_dataset(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for reading: " + path);
    Dataset out;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty()) throw ParseError("empty line in dataset", line_no);
        if (!is_printable_ascii(line)) throw ParseError("non-ASCII byte in name", line_no);
        if (!is_valid_name(line)) throw ParseError("name must start with '/'", line_no);
        if (seen.contains(line)) throw ParseError("duplicate name", line_no);
        out.names.push_back(line);
        seen.insert(line);
    }
    if (f.bad()) throw IoError("read failed: " + path);
    return out;
}

/// Splits into disjoint partitions in input order. Sizes are floor(weight * |d|);
/// when the weights sum to 1 the rounding remainder goes to the last partition.
inline std::vector<Dataset> split_dataset(const Dataset& d, const std::vector<double>& fractions) {
    if (d.empty()) throw ConfigError("cannot split an empty dataset");
    if (fractions.empty()) throw ConfigError("no split fractions given");
    double sum = 0;
    for (double w : fractions) {
        if (!(w > 0)) throw ConfigError("split weights must be positive");
        sum += w;
    }
    if (sum > 1.0 + 1e-9) throw ConfigError("split weights must sum to <= 1");

    std::vector<std::size_t> sizes;
    sizes.reserve(fractions.size());
    std::size_t assigned = 0;
    for (double w : fractions) {
        auto s = static_cast<std::size_t>(std::floor(w * static_cast<double>(d.size())));
        sizes.push_back(s);
        assigned += s;
    }
    if (sum >= 1.0 - 1e-9) sizes.back() += d.size() - assigned;

    std::vector<Dataset> parts;
    parts.reserve(sizes.size());
    std::size_t pos = 0;
    for (std::size_t s : sizes) {
        Dataset p;
        p.names.assign(d.names.begin() + static_cast<std::ptrdiff_t>(pos),
                       d.names.begin() + static_cast<std::ptrdiff_t>(pos + s));
        parts.push_back(std::move(p));
        pos += s;
    }
    return parts;
}

}  // namespace lni
