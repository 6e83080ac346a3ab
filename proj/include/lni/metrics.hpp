#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "lni/corpus.hpp"
#include "lni/error.hpp"

namespace lni {

using Json = nlohmann::json;

/// Per-lookup latency and throughput for one index, measured over chunked
/// batches. Percentiles are over chunk means, not single lookups (a single
/// lookup is too short to clock without perturbing it).
struct TimingResult {
    double lookup_ns_mean = 0;
    double lookup_ns_p50 = 0;
    double lookup_ns_p99 = 0;
    double lookups_per_sec = 0;  // from the median repetition
    double msps = 0;             // million searches per second
    std::uint64_t lookups_per_rep = 0;
    std::size_t reps = 0;
    std::uint64_t check = 0;  // accumulated hit count, defeats dead-code elimination
};

/// Times `fn(name) -> bool` over the probe set, cycling it until at least
/// `min_lookups` calls per repetition; median of `reps` repetitions wins.
/// One warmup pass over the probes runs first.
template <typename LookupFn>
TimingResult measure_throughput(LookupFn&& fn, const std::vector<Name>& probes,
                                std::uint64_t min_lookups = 1'000'000, std::size_t reps = 3,
                                std::size_t chunk_size = 8192) {
    if (probes.empty()) throw ConfigError("cannot time an empty probe set");
    if (reps < 1) throw ConfigError("need at least one repetition");
    using clock = std::chrono::steady_clock;

    TimingResult out;
    out.reps = reps;
    for (const auto& name : probes) out.check += fn(name) ? 1 : 0;  // warmup

    const std::uint64_t passes = (min_lookups + probes.size() - 1) / probes.size();
    const std::uint64_t per_rep = std::max<std::uint64_t>(passes, 1) * probes.size();
    out.lookups_per_rep = per_rep;

    std::vector<double> rep_seconds(reps);
    std::vector<std::vector<double>> rep_chunk_ns(reps);
    for (std::size_t rep = 0; rep < reps; ++rep) {
        auto& chunks = rep_chunk_ns[rep];
        chunks.reserve(per_rep / chunk_size + 1);
        double wall = 0;
        std::uint64_t done = 0;
        std::size_t probe_idx = 0;
        while (done < per_rep) {
            const std::uint64_t batch = std::min<std::uint64_t>(chunk_size, per_rep - done);
            const auto t0 = clock::now();
            std::uint64_t hits = 0;
            for (std::uint64_t i = 0; i < batch; ++i) {
                hits += fn(probes[probe_idx]) ? 1 : 0;
                if (++probe_idx == probes.size()) probe_idx = 0;
            }
            const auto t1 = clock::now();
            out.check += hits;
            const double sec = std::chrono::duration<double>(t1 - t0).count();
            wall += sec;
            chunks.push_back(sec * 1e9 / static_cast<double>(batch));
            done += batch;
        }
        rep_seconds[rep] = wall;
    }

    // Median repetition carries the headline numbers.
    std::vector<std::size_t> order(reps);
    for (std::size_t i = 0; i < reps; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return rep_seconds[a] < rep_seconds[b]; });
    const std::size_t median_rep = order[reps / 2];
    const double median_sec = rep_seconds[median_rep];
    out.lookups_per_sec = static_cast<double>(per_rep) / median_sec;
    out.msps = out.lookups_per_sec / 1e6;
    out.lookup_ns_mean = median_sec * 1e9 / static_cast<double>(per_rep);

    auto chunks = rep_chunk_ns[median_rep];
    std::sort(chunks.begin(), chunks.end());
    auto percentile = [&](double p) {
        const auto idx = static_cast<std::size_t>(p * static_cast<double>(chunks.size() - 1));
        return chunks[idx];
    };
    out.lookup_ns_p50 = percentile(0.50);
    out.lookup_ns_p99 = percentile(0.99);
    return out;
}

inline Json timing_to_json(const TimingResult& t, double cpu_ghz) {
    Json j{
        {"lookup_ns_mean", t.lookup_ns_mean},
        {"lookup_ns_p50", t.lookup_ns_p50},
        {"lookup_ns_p99", t.lookup_ns_p99},
        {"lookups_per_sec", t.lookups_per_sec},
        {"msps", t.msps},
        {"lookups_per_rep", t.lookups_per_rep},
        {"reps", t.reps},
    };
    // Cycles are an estimate derived from a caller-supplied nominal frequency,
    // never a hardware counter reading.
    if (cpu_ghz > 0) j["cycles_per_lookup_est"] = t.lookup_ns_mean * cpu_ghz;
    return j;
}

namespace detail {

/// Dotted-key flattening; every scalar is rendered with the same serializer
/// the JSON report uses, so CSV text equals JSON text for every value.
inline void flatten_json(const Json& node, const std::string& prefix,
                         std::map<std::string, std::string>& out) {
    if (node.is_object()) {
        for (const auto& [key, value] : node.items())
            flatten_json(value, prefix.empty() ? key : prefix + "." + key, out);
    } else if (node.is_array()) {
        for (std::size_t i = 0; i < node.size(); ++i)
            flatten_json(node[i], prefix + "[" + std::to_string(i) + "]", out);
    } else {
        out[prefix] = node.dump();
    }
}

inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string quoted = "\"";
    for (const char c : field) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

}  // namespace detail

/// Renders a report's results array as CSV: one row per result cell, columns
/// are the sorted union of flattened keys, values are JSON-serialized
/// scalars (byte-equal to the JSON report).
inline std::string report_to_csv(const Json& report) {
    if (!report.contains("results") || !report["results"].is_array())
        throw ConfigError("report has no results array");
    std::vector<std::map<std::string, std::string>> rows;
    std::map<std::string, std::size_t> columns;  // name -> order
    for (const auto& cell : report["results"]) {
        std::map<std::string, std::string> row;
        detail::flatten_json(cell, "", row);
        for (const auto& [key, _] : row) columns.emplace(key, columns.size());
        rows.push_back(std::move(row));
    }
    std::string csv;
    bool first = true;
    for (const auto& [key, _] : columns) {
        if (!first) csv += ',';
        csv += detail::csv_escape(key);
        first = false;
    }
    csv += '\n';
    for (const auto& row : rows) {
        first = true;
        for (const auto& [key, _] : columns) {
            if (!first) csv += ',';
            const auto it = row.find(key);
            if (it != row.end()) csv += detail::csv_escape(it->second);
            first = false;
        }
        csv += '\n';
    }
    return csv;
}

/// Report envelope; config must already be fully resolved (no defaults left
/// implicit) so the file documents its own provenance.
inline Json make_report(const Json& config, const std::string& tool_version) {
    return Json{
        {"schema_version", 1},
        {"tool_version", tool_version},
        {"config", config},
        {"results", Json::array()},
    };
}

}  // namespace lni
