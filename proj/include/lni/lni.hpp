#pragma once

#include <atomic>
#include <cstdint>
#include <fstream>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "lni/bitmap.hpp"
#include "lni/corpus.hpp"
#include "lni/error.hpp"
#include "lni/input.hpp"
#include "lni/pyramid.hpp"
#include "lni/slot_mapper.hpp"

namespace lni {

/// One forwarding entry: a full name and its outgoing interface ids.
struct FibEntry {
    Name name;
    std::vector<std::uint16_t> faces;

    bool operator==(const FibEntry&) const = default;

    void validate() const {
        if (!is_valid_name(name)) throw ConfigError("invalid entry name");
        if (faces.empty()) throw ConfigError("entry must have at least one face");
    }
};

/// Entries for a bare name list (one default face each).
inline std::vector<FibEntry> synthesize_entries(const Dataset& d, std::uint16_t face = 1) {
    std::vector<FibEntry> entries;
    entries.reserve(d.size());
    for (const auto& name : d.names) entries.push_back(FibEntry{name, {face}});
    return entries;
}

/// Lookup/hit/miss counters, updatable from concurrent readers.
struct LniCounters {
    std::atomic<std::uint64_t> lookups{0};
    std::atomic<std::uint64_t> hits{0};
    std::atomic<std::uint64_t> misses{0};
};

struct LniStats {
    std::uint64_t inserts = 0;     // insert attempts
    std::uint64_t collisions = 0;  // attempts that found the slot occupied
    std::uint64_t stored = 0;      // entries actually stored (inserts - collisions)
    std::uint64_t lookups = 0;
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
};

struct LniLookup {
    bool hit = false;
    std::uint64_t address = 0;
    const FibEntry* entry = nullptr;
};

/// The Learning Name Index: input processor + trained model + Enhanced
/// Bitmap + per-part store. Immutable after build; lookups are safe from any
/// number of concurrent readers.
class Lni {
  public:
    Lni(PyramidNN model, std::uint64_t total_slots, std::size_t entry_size = 8)
        : model_(std::move(model)),
          bitmap_(new_bitmap(model_.config.regions, total_slots)),
          store_(model_.config.regions, entry_size) {
        if (model_.config.input_dim > detail::kMaxStackDim)
            throw ConfigError("input_dim too large");
    }

    /// Runs one entry through the mapping pipeline; occupied slots reject the
    /// entry and record a collision (the build-set false-positive event).
    InsertResult insert_entry(FibEntry entry) {
        entry.validate();
        Name name = entry.name;  // keep a copy: entry is consumed either way
        const RegionCdf rc = predict(model_, process(name, model_.config.input_dim));
        const std::size_t slot = slot_of(rc.cdf, bitmap_.slots_per_part);
        ++inserts_;
        const InsertResult r = insert(bitmap_, store_, rc.region, slot, std::move(entry));
        if (!r.inserted()) {
            ++collisions_;
            collided_.push_back(std::move(name));
        }
        return r;
    }

    /// The exact lookup pipeline: process -> predict region -> predict CDF ->
    /// slot -> bitmap cell -> store address. Allocation-free.
    LniLookup lookup(std::string_view name) const {
        const std::size_t dim = model_.config.input_dim;
        std::uint8_t bytes[detail::kMaxStackDim];
        double x[detail::kMaxStackDim];
        process_into(name, {bytes, dim});
        for (std::size_t i = 0; i < dim; ++i)
            x[i] = static_cast<double>(bytes[i]) * kInputScale;
        const std::uint32_t region = model_.predict_region_scaled(x);
        const double cdf = model_.predict_cdf_scaled(x, region);
        const std::size_t slot = slot_of(cdf, bitmap_.slots_per_part);
        const std::uint16_t token = bitmap_.cell(region, slot);
        counters_->lookups.fetch_add(1, std::memory_order_relaxed);
        if (token == 0) {
            counters_->misses.fetch_add(1, std::memory_order_relaxed);
            return {};
        }
        counters_->hits.fetch_add(1, std::memory_order_relaxed);
        const std::uint64_t address =
            store_.base_addr(region) +
            static_cast<std::uint64_t>(token - 1) * store_.entry_size;
        return {true, address, &store_.parts[region][token - 1]};
    }

    const PyramidNN& model() const { return model_; }
    const EnhancedBitmap& bitmap() const { return bitmap_; }
    const PartedStore<FibEntry>& store() const { return store_; }
    const std::vector<Name>& collided_names() const { return collided_; }

    LniStats stats() const {
        LniStats s;
        s.inserts = inserts_;
        s.collisions = collisions_;
        s.stored = inserts_ - collisions_;
        s.lookups = counters_->lookups.load(std::memory_order_relaxed);
        s.hits = counters_->hits.load(std::memory_order_relaxed);
        s.misses = counters_->misses.load(std::memory_order_relaxed);
        return s;
    }

  private:
    PyramidNN model_;
    EnhancedBitmap bitmap_;
    PartedStore<FibEntry> store_;
    std::vector<Name> collided_;
    std::uint64_t inserts_ = 0;
    std::uint64_t collisions_ = 0;
    std::unique_ptr<LniCounters> counters_ = std::make_unique<LniCounters>();
};

/// Inserts every entry into an index built around an already-trained model.
inline Lni build_with_model(PyramidNN model, std::vector<FibEntry> entries,
                            std::uint64_t total_slots, std::size_t entry_size = 8) {
    if (entries.empty()) throw ConfigError("cannot build an index over zero entries");
    Lni index(std::move(model), total_slots, entry_size);
    for (auto& e : entries) index.insert_entry(std::move(e));
    return index;
}

/// Trains a model on the name set, then builds the index over the entries.
inline Lni build(const Dataset& names, std::vector<FibEntry> entries, std::uint64_t total_slots,
                 const PyramidConfig& cfg, std::size_t entry_size = 8) {
    if (names.size() != entries.size())
        throw ConfigError("names and entries must have equal length");
    for (std::size_t i = 0; i < entries.size(); ++i)
        if (entries[i].name != names.names[i])
            throw ConfigError("entry names must match the dataset order");
    PyramidNN model = train_pyramid(build_training_set(names, cfg), cfg);
    return build_with_model(std::move(model), std::move(entries), total_slots, entry_size);
}

enum class FpMode {
    build,  // collisions / inserts over the build set (the default definition)
    probe,  // fraction of probe names (absent from the index) that Hit
};

inline double false_positive_probability(const Lni& index, const Dataset& probe,
                                         FpMode mode = FpMode::build) {
    if (mode == FpMode::build) {
        const LniStats s = index.stats();
        if (s.inserts == 0) throw ConfigError("index has no inserts to report on");
        return static_cast<double>(s.collisions) / static_cast<double>(s.inserts);
    }
    if (probe.empty()) throw ConfigError("probe dataset is empty");
    std::uint64_t false_hits = 0;
    for (const auto& name : probe.names)
        if (index.lookup(name).hit) ++false_hits;
    return static_cast<double>(false_hits) / static_cast<double>(probe.size());
}

/// Smallest slot budget (multiple of `granularity`) at which the model maps
/// the name set with a build-set collision fraction <= target_fp.
inline std::uint64_t slots_required_for_fp(const PyramidNN& model, const Dataset& names,
                                           double target_fp, std::uint64_t granularity,
                                           std::uint64_t max_slots = 1ull << 30) {
    return slots_required_for_fp(LniMapping("lni", names, model), target_fp, granularity,
                                 max_slots);
}

/// The FIB facade: one functional index plus a replica count that only
/// affects memory accounting (the deployment keeps two on-chip copies).
struct LniFib {
    Lni index;
    std::size_t replicas = 2;

    void validate() const {
        if (replicas < 1) throw ConfigError("replicas must be >= 1");
    }
};

struct LniMemoryReport {
    std::uint64_t model_bytes = 0;        // replicas x model parameters
    std::uint64_t bitmap_bytes = 0;       // replicas x P x S_p x 2
    std::uint64_t entry_store_bytes = 0;  // replicas x simulated entry bytes (off-chip, not in total)
    std::uint64_t total_bytes = 0;        // model + bitmap (the on-chip figure)
};

inline LniMemoryReport memory_report(const LniFib& fib) {
    fib.validate();
    LniMemoryReport r;
    const auto replicas = static_cast<std::uint64_t>(fib.replicas);
    r.model_bytes = replicas * model_size_bytes(fib.index.model());
    r.bitmap_bytes = replicas * fib.index.bitmap().size_bytes();
    r.entry_store_bytes = replicas * fib.index.store().simulated_bytes();
    r.total_bytes = r.model_bytes + r.bitmap_bytes;
    return r;
}

/// Reads a FIB snapshot: one `<name><TAB><face,face,...>` line per entry,
/// LF-terminated. Duplicate names, empty face lists and malformed numbers are
/// rejected with the offending line number.
inline std::vector<FibEntry> load_fib(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open fib snapshot: " + path);
    std::vector<FibEntry> entries;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            throw ParseError("CR line ending in fib snapshot", line_no);
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos) throw ParseError("missing TAB separator", line_no);
        FibEntry e;
        e.name = line.substr(0, tab);
        if (!is_valid_name(e.name)) throw ParseError("invalid name", line_no);
        if (!seen.insert(e.name).second) throw ParseError("duplicate name", line_no);
        std::size_t pos = tab + 1;
        while (pos <= line.size()) {
            const std::size_t comma = std::min(line.find(',', pos), line.size());
            const std::string token = line.substr(pos, comma - pos);
            if (token.empty() || token.size() > 5 ||
                token.find_first_not_of("0123456789") != std::string::npos)
                throw ParseError("malformed face id", line_no);
            const unsigned long v = std::stoul(token);
            if (v > 65535) throw ParseError("face id out of range", line_no);
            e.faces.push_back(static_cast<std::uint16_t>(v));
            pos = comma + 1;
        }
        if (e.faces.empty()) throw ParseError("entry has no faces", line_no);
        entries.push_back(std::move(e));
    }
    if (in.bad()) throw IoError("failed reading fib snapshot: " + path);
    return entries;
}

inline void save_fib(const std::vector<FibEntry>& entries, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open fib snapshot for writing: " + path);
    for (const auto& e : entries) {
        e.validate();
        out << e.name << '\t';
        for (std::size_t i = 0; i < e.faces.size(); ++i) {
            if (i) out << ',';
            out << e.faces[i];
        }
        out << '\n';
    }
    if (!out) throw IoError("failed writing fib snapshot: " + path);
}

}  // namespace lni
