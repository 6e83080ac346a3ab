#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lni/bitmap.hpp"
#include "lni/corpus.hpp"
#include "lni/error.hpp"
#include "lni/hash_table.hpp"
#include "lni/hashes.hpp"
#include "lni/lni.hpp"
#include "lni/metrics.hpp"
#include "lni/patricia.hpp"
#include "lni/pyramid.hpp"
#include "lni/slot_mapper.hpp"

namespace lni {

inline constexpr const char* kIndexLni = "lni";
inline constexpr const char* kIndexHashFnv = "hash-fnv1a64";
inline constexpr const char* kIndexHashMurmur = "hash-murmur3-128";
inline constexpr const char* kIndexPatricia = "patricia";

inline bool is_hash_index(const std::string& kind) { return kind.rfind("hash-", 0) == 0; }

/// Fully resolved experiment configuration. One dataset source, at least one
/// index kind; everything that influences a result is explicit here so cell
/// hashes and report provenance stay honest.
struct BenchOptions {
    // dataset: a file path, or (names, seed) for deterministic generation
    std::string dataset_path;
    std::size_t names = 100000;
    std::uint64_t seed = 1;

    // model (used when "lni" is among the indexes)
    std::string model_path;  // preloaded model; empty = train in-driver
    std::size_t regions = 20000;
    std::size_t hidden = 12;
    std::size_t input_dim = kDefaultInputDim;
    std::size_t l1_epochs = 2000;
    double l1_lr = 0.1;
    std::size_t l1_batch = 64;
    std::size_t l2_epochs = 8000;
    double l2_lr = 0.1;
    std::size_t l2_batch = 1;
    double l2_target_error = 6.4e-3;

    // experiment
    std::vector<std::string> indexes{kIndexLni, kIndexHashFnv, kIndexHashMurmur, kIndexPatricia};
    std::uint64_t slots = 0;        // 0 = one slot per name (load factor 1)
    double fp_target = 0.01;
    std::uint64_t granularity = 1000;
    std::uint64_t max_slots = 0;    // 0 = names x 1024
    std::size_t replicas = 2;
    bool timing = true;
    double cpu_ghz = 0;             // 0 = omit cycle estimates
    std::size_t reps = 3;
    std::uint64_t min_lookups = 1'000'000;
    std::string output_dir;         // empty = in-memory only (no cell cache)

    void validate() const {
        if (dataset_path.empty() && names == 0)
            throw ConfigError("dataset: need a path or a nonzero name count");
        if (indexes.empty()) throw ConfigError("need at least one index kind");
        for (const auto& kind : indexes)
            if (kind != kIndexLni && kind != kIndexHashFnv && kind != kIndexHashMurmur &&
                kind != kIndexPatricia)
                throw ConfigError("unknown index kind: " + kind);
        if (!(fp_target > 0) || fp_target > 1) throw ConfigError("fp target must be in (0, 1]");
        if (granularity < 1) throw ConfigError("granularity must be >= 1");
        if (replicas < 1) throw ConfigError("replicas must be >= 1");
        if (timing && reps < 1) throw ConfigError("reps must be >= 1");
    }
};

namespace detail {

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[v & 0xF];
        v >>= 4;
    }
    return s;
}

inline std::uint64_t dataset_fingerprint(const Dataset& d) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](std::string_view s) {
        for (const char c : s) {
            h ^= static_cast<std::uint8_t>(c);
            h *= 0x100000001b3ull;
        }
        h ^= static_cast<std::uint8_t>('\n');
        h *= 0x100000001b3ull;
    };
    for (const auto& name : d.names) mix(name);
    return h;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out << text;
    if (!out) throw IoError("failed writing file: " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("failed reading file: " + path);
    return text;
}

/// Content-addressed result cache: one JSON file per completed cell, keyed by
/// the hash of the cell's canonical config. Re-runs load instead of compute.
class CellCache {
  public:
    explicit CellCache(std::string dir) : dir_(std::move(dir)) {
        if (!dir_.empty()) std::filesystem::create_directories(dir_);
    }

    Json get_or_compute(const Json& config, const std::function<Json()>& compute) {
        if (dir_.empty()) return compute();
        const std::string canonical = config.dump();
        const std::string path = dir_ + "/" + cell_name(config, canonical);
        if (std::filesystem::exists(path)) {
            const Json stored = Json::parse(read_text_file(path));
            if (stored.contains("config") && stored["config"] == config &&
                stored.contains("result"))
                return stored["result"];
            // stale or foreign file: fall through and overwrite
        }
        Json result = compute();
        write_text_file(path, Json{{"config", config}, {"result", result}}.dump(2) + "\n");
        return result;
    }

  private:
    static std::string cell_name(const Json& config, const std::string& canonical) {
        std::string label = "cell";
        if (config.contains("section")) label = config["section"].get<std::string>();
        if (config.contains("index")) label += "-" + config["index"].get<std::string>();
        return label + "-" + hex64(fnv1a64(canonical)) + ".json";
    }

    std::string dir_;
};

}  // namespace detail

/// Runs the experiment suite and assembles the MetricsReport. Owns the
/// dataset, model and built structures, constructing each lazily so fully
/// cached runs do no heavy work.
class BenchDriver {
  public:
    BenchDriver(BenchOptions opt, std::string tool_version)
        : opt_(std::move(opt)), tool_version_(std::move(tool_version)),
          cache_(opt_.output_dir.empty() ? "" : opt_.output_dir + "/cells") {
        opt_.validate();
        if (opt_.dataset_path.empty()) {
            CorpusSpec spec;
            spec.count = opt_.names;
            spec.seed = opt_.seed;
            dataset_ = generate_names(spec);
            dataset_id_ = Json{{"source", "generated"},
                               {"names", opt_.names},
                               {"seed", opt_.seed}};
        } else {
            dataset_ = load_dataset(opt_.dataset_path);
            dataset_id_ = Json{{"source", "file"},
                               {"path", opt_.dataset_path},
                               {"names", dataset_.size()},
                               {"fingerprint", detail::hex64(detail::dataset_fingerprint(dataset_))}};
        }
        if (opt_.slots == 0) opt_.slots = dataset_.size();
        if (opt_.max_slots == 0) opt_.max_slots = static_cast<std::uint64_t>(dataset_.size()) * 1024;
    }

    const Dataset& dataset() const { return dataset_; }
    const BenchOptions& options() const { return opt_; }

    /// The whole suite: training summary, FP load-factor sweep, empty-slot
    /// ratio, slots-required search, chain histograms, memory breakdown and
    /// (unless disabled) the throughput loop.
    Json run() {
        Json report = make_report(resolved_config(), tool_version_);
        Json& results = report["results"];
        const bool wants_lni =
            std::find(opt_.indexes.begin(), opt_.indexes.end(), kIndexLni) != opt_.indexes.end();

        if (wants_lni) results.push_back(training_cell());
        for (const double factor : {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625})
            for (const auto& kind : opt_.indexes)
                if (kind != kIndexPatricia) results.push_back(fp_sweep_cell(kind, factor));
        for (const auto& kind : opt_.indexes)
            if (kind != kIndexPatricia) results.push_back(empty_slot_cell(kind));
        for (const auto& kind : opt_.indexes)
            if (kind != kIndexPatricia) results.push_back(slots_required_cell(kind));
        for (const auto& kind : opt_.indexes)
            if (is_hash_index(kind)) results.push_back(chains_cell(kind));
        for (const auto& kind : opt_.indexes) results.push_back(memory_cell(kind));
        if (opt_.timing)
            for (const auto& kind : opt_.indexes) results.push_back(throughput_cell(kind));
        return report;
    }

    /// run() plus derived LNI-vs-hash ratios.
    Json run_compare() {
        if (opt_.indexes.size() < 2) throw ConfigError("compare needs at least two index kinds");
        Json report = run();
        report["ratios"] = compute_ratios(report);
        return report;
    }

    /// Ratio block from any report holding the needed cells. The hash
    /// reference is the first hash index found.
    static Json compute_ratios(const Json& report) {
        const Json& results = report.at("results");
        auto find_cell = [&](const std::string& section, bool hash,
                             const std::function<bool(const Json&)>& extra) -> const Json* {
            for (const auto& cell : results) {
                if (cell.at("section") != section) continue;
                const std::string kind = cell.at("index");
                if (hash != is_hash_index(kind)) continue;
                if (!hash && kind != kIndexLni) continue;
                if (extra && !extra(cell)) continue;
                return &cell;
            }
            return nullptr;
        };
        auto at_eighth = [](const Json& cell) {
            return cell.contains("load_factor") && cell["load_factor"].get<double>() == 0.125;
        };

        Json ratios = Json::object();
        const Json* lni_sr = find_cell("slots_required", false, nullptr);
        const Json* hash_sr = find_cell("slots_required", true, nullptr);
        if (lni_sr && hash_sr)
            ratios["slots_required_lni_over_hash"] =
                lni_sr->at("slots_required").get<double>() /
                hash_sr->at("slots_required").get<double>();
        const Json* lni_fp = find_cell("fp_sweep", false, at_eighth);
        const Json* hash_fp = find_cell("fp_sweep", true, at_eighth);
        if (lni_fp && hash_fp && hash_fp->at("fp_probability").get<double>() > 0)
            ratios["fp_at_eighth_load_lni_over_hash"] =
                lni_fp->at("fp_probability").get<double>() /
                hash_fp->at("fp_probability").get<double>();
        const Json* lni_empty = find_cell("empty_slot", false, nullptr);
        const Json* hash_empty = find_cell("empty_slot", true, nullptr);
        if (lni_empty && hash_empty)
            ratios["empty_slot_ratio_diff_lni_minus_hash"] =
                lni_empty->at("empty_slot_ratio").get<double>() -
                hash_empty->at("empty_slot_ratio").get<double>();
        if (ratios.empty()) throw ConfigError("reports lack the cells needed for ratios");
        return ratios;
    }

  private:
    Json resolved_config() const {
        Json cfg{
            {"dataset", dataset_id_},
            {"indexes", opt_.indexes},
            {"slots", opt_.slots},
            {"fp_target", opt_.fp_target},
            {"granularity", opt_.granularity},
            {"max_slots", opt_.max_slots},
            {"replicas", opt_.replicas},
            {"timing", opt_.timing},
            {"seed", opt_.seed},
        };
        if (opt_.timing) {
            cfg["reps"] = opt_.reps;
            cfg["min_lookups"] = opt_.min_lookups;
            cfg["cpu_ghz"] = opt_.cpu_ghz;
        }
        if (std::find(opt_.indexes.begin(), opt_.indexes.end(), kIndexLni) != opt_.indexes.end())
            cfg["model"] = model_id();
        return cfg;
    }

    Json model_id() const {
        if (!opt_.model_path.empty())
            return Json{{"source", "file"},
                        {"path", opt_.model_path},
                        {"fingerprint",
                         detail::hex64(fnv1a64(detail::read_text_file(opt_.model_path)))}};
        return Json{
            {"source", "trained"},
            {"regions", opt_.regions},
            {"hidden", opt_.hidden},
            {"input_dim", opt_.input_dim},
            {"seed", opt_.seed},
            {"l1", {{"epochs", opt_.l1_epochs}, {"lr", opt_.l1_lr}, {"batch", opt_.l1_batch}}},
            {"l2",
             {{"epochs", opt_.l2_epochs},
              {"lr", opt_.l2_lr},
              {"batch", opt_.l2_batch},
              {"target_error", opt_.l2_target_error}}},
        };
    }

    PyramidConfig pyramid_config() const {
        PyramidConfig cfg;
        cfg.regions = opt_.regions;
        cfg.hidden = opt_.hidden;
        cfg.input_dim = opt_.input_dim;
        cfg.train_l1 = TrainConfig{.epochs = opt_.l1_epochs,
                                   .learning_rate = opt_.l1_lr,
                                   .batch_size = opt_.l1_batch,
                                   .seed = opt_.seed};
        cfg.train_l2 = TrainConfig{.epochs = opt_.l2_epochs,
                                   .learning_rate = opt_.l2_lr,
                                   .batch_size = opt_.l2_batch,
                                   .target_error = opt_.l2_target_error,
                                   .seed = opt_.seed};
        return cfg;
    }

    /// Loads, restores from cache, or trains the model; caches the trained
    /// model next to the result cells so resumed runs skip training.
    const PyramidNN& model() {
        if (model_) return *model_;
        if (!opt_.model_path.empty()) {
            model_ = std::make_unique<PyramidNN>(load_model(opt_.model_path));
            return *model_;
        }
        std::string cached_path;
        if (!opt_.output_dir.empty()) {
            const Json id{{"dataset", dataset_id_}, {"model", model_id()}};
            std::filesystem::create_directories(opt_.output_dir + "/cells");
            cached_path =
                opt_.output_dir + "/cells/model-" + detail::hex64(fnv1a64(id.dump())) + ".pnn";
            if (std::filesystem::exists(cached_path)) {
                model_ = std::make_unique<PyramidNN>(load_model(cached_path));
                return *model_;
            }
        }
        const PyramidConfig cfg = pyramid_config();
        training_set();  // ensure built
        summary_ = PyramidTrainingSummary{};
        model_ = std::make_unique<PyramidNN>(train_pyramid(*training_set_, cfg, &summary_));
        trained_here_ = true;
        if (!cached_path.empty()) save_model(*model_, cached_path);
        return *model_;
    }

    const LabeledTrainingSet& training_set() {
        if (!training_set_) {
            training_set_ = std::make_unique<LabeledTrainingSet>(
                build_training_set(dataset_, pyramid_config()));
        }
        return *training_set_;
    }

    Json cell_config(const char* section, const std::string& kind, Json params) const {
        Json cfg{{"section", section},
                 {"index", kind},
                 {"dataset", dataset_id_},
                 {"params", std::move(params)}};
        if (kind == kIndexLni) cfg["model"] = model_id();
        return cfg;
    }

    // ---- mappers and built structures (lazy, shared across sections) ----

    const HashMapping& hash_mapping(const std::string& kind) {
        auto& slot = hash_mappings_[kind];
        if (!slot) {
            if (kind == kIndexHashFnv)
                slot = std::make_unique<HashMapping>(kind, dataset_, Fnv1aHasher{});
            else
                slot = std::make_unique<HashMapping>(kind, dataset_, Murmur3Hasher{});
        }
        return *slot;
    }

    const LniMapping& lni_mapping() {
        if (!lni_mapping_)
            lni_mapping_ = std::make_unique<LniMapping>(kIndexLni, dataset_, model());
        return *lni_mapping_;
    }

    MappingStats stats_for(const std::string& kind, std::uint64_t slots) {
        if (kind == kIndexLni) return mapping_stats(lni_mapping(), slots);
        return mapping_stats(hash_mapping(kind), slots);
    }

    const Lni& lni_index() {
        if (!lni_index_)
            lni_index_ = std::make_unique<Lni>(
                build_with_model(model(), synthesize_entries(dataset_), opt_.slots));
        return *lni_index_;
    }

    template <typename Hasher>
    const ChainedHashTable<FibEntry, Hasher>& hash_table(
        std::unique_ptr<ChainedHashTable<FibEntry, Hasher>>& slot) {
        if (!slot) {
            slot = std::make_unique<ChainedHashTable<FibEntry, Hasher>>(
                static_cast<std::size_t>(opt_.slots));
            for (const auto& name : dataset_.names) slot->insert(name, FibEntry{name, {1}});
        }
        return *slot;
    }

    const PatriciaTrie& patricia() {
        if (!patricia_) {
            patricia_ = std::make_unique<PatriciaTrie>();
            for (std::size_t i = 0; i < dataset_.size(); ++i)
                patricia_->insert(dataset_.names[i], static_cast<std::uint32_t>(i));
        }
        return *patricia_;
    }

    // ---- cells ----

    Json training_cell() {
        const Json config = cell_config("training", kIndexLni, Json::object());
        return finish_cell(config, cache_.get_or_compute(config, [&] {
            const PyramidNN& m = model();
            Json r{
                {"classification_accuracy", classification_accuracy(m, training_set())},
                {"distinct_vectors", training_set().size()},
                {"input_collision_rate", collision_rate(dataset_, m.config.input_dim)},
                {"model_bytes", model_size_bytes(m)},
                {"regions", m.config.regions},
            };
            if (trained_here_) {
                r["l1_final_mse"] = summary_.l1.final_mse;
                r["l1_epochs_run"] = summary_.l1.epochs_run;
                r["l2_mean_mse"] = summary_.l2_mean_mse;
                r["l2_mean_epochs"] = summary_.l2_mean_epochs;
                r["regions_trained"] = summary_.regions_trained;
                r["regions_empty"] = summary_.regions_empty;
            }
            return r;
        }));
    }

    Json fp_sweep_cell(const std::string& kind, double load_factor) {
        const auto requested = static_cast<std::uint64_t>(
            static_cast<double>(dataset_.size()) / load_factor + 0.5);
        const Json config = cell_config("fp_sweep", kind,
                                        Json{{"load_factor", load_factor},
                                             {"requested_slots", requested}});
        return finish_cell(config, cache_.get_or_compute(config, [&] {
            const MappingStats st = stats_for(kind, requested);
            return Json{{"load_factor", load_factor},
                        {"slots", st.slots},
                        {"fp_probability", st.collision_fraction},
                        {"empty_slot_ratio", st.empty_slot_ratio}};
        }));
    }

    Json empty_slot_cell(const std::string& kind) {
        const Json config =
            cell_config("empty_slot", kind, Json{{"requested_slots", opt_.slots}});
        return finish_cell(config, cache_.get_or_compute(config, [&] {
            const MappingStats st = stats_for(kind, opt_.slots);
            return Json{{"slots", st.slots},
                        {"fp_probability", st.collision_fraction},
                        {"empty_slot_ratio", st.empty_slot_ratio}};
        }));
    }

    Json slots_required_cell(const std::string& kind) {
        const Json config = cell_config("slots_required", kind,
                                        Json{{"fp_target", opt_.fp_target},
                                             {"granularity", opt_.granularity},
                                             {"max_slots", opt_.max_slots}});
        return finish_cell(config, cache_.get_or_compute(config, [&] {
            const std::uint64_t required =
                kind == kIndexLni
                    ? slots_required_for_fp(lni_mapping(), opt_.fp_target, opt_.granularity,
                                            opt_.max_slots)
                    : slots_required_for_fp(hash_mapping(kind), opt_.fp_target,
                                            opt_.granularity, opt_.max_slots);
            return Json{{"fp_target", opt_.fp_target},
                        {"granularity", opt_.granularity},
                        {"slots_required", required}};
        }));
    }

    Json chains_cell(const std::string& kind) {
        const Json config = cell_config("chains", kind, Json{{"buckets", opt_.slots}});
        return finish_cell(config, cache_.get_or_compute(config, [&] {
            Json hist = Json::object();
            double empty = 0;
            if (kind == kIndexHashFnv) {
                const auto& t = hash_table(fnv_table_);
                for (const auto& [len, count] : t.chain_histogram())
                    hist[std::to_string(len)] = count;
                empty = t.empty_bucket_ratio();
            } else {
                const auto& t = hash_table(murmur_table_);
                for (const auto& [len, count] : t.chain_histogram())
                    hist[std::to_string(len)] = count;
                empty = t.empty_bucket_ratio();
            }
            return Json{{"buckets", opt_.slots},
                        {"entries", dataset_.size()},
                        {"empty_bucket_ratio", empty},
                        {"chain_histogram", hist}};
        }));
    }

    Json memory_cell(const std::string& kind) {
        const Json config = cell_config("memory", kind,
                                        Json{{"slots", opt_.slots},
                                             {"replicas", opt_.replicas}});
        return finish_cell(config, cache_.get_or_compute(config, [&] {
            if (kind == kIndexLni) {
                // The facade is rebuilt around a copy of the index-owned model
                // purely for accounting; replicas only scale byte counts.
                const Lni& idx = lni_index();
                const std::uint64_t model_b =
                    static_cast<std::uint64_t>(opt_.replicas) * model_size_bytes(idx.model());
                const std::uint64_t bitmap_b =
                    static_cast<std::uint64_t>(opt_.replicas) * idx.bitmap().size_bytes();
                const LniStats st = idx.stats();
                return Json{{"memory",
                             {{"model_bytes", model_b},
                              {"bitmap_bytes", bitmap_b},
                              {"entry_store_bytes", static_cast<std::uint64_t>(opt_.replicas) *
                                                        idx.store().simulated_bytes()},
                              {"total_bytes", model_b + bitmap_b}}},
                            {"replicas", opt_.replicas},
                            {"stored", st.stored},
                            {"build_collisions", st.collisions}};
            }
            std::uint64_t bytes = 0;
            Json extra = Json::object();
            if (kind == kIndexHashFnv) {
                bytes = hash_table(fnv_table_).size_bytes();
            } else if (kind == kIndexHashMurmur) {
                bytes = hash_table(murmur_table_).size_bytes();
            } else {
                const PatriciaTrie& t = patricia();
                bytes = t.size_bytes();
                extra["internal_nodes"] = t.internal_count();
                extra["leaves"] = t.size();
            }
            Json r{{"memory", {{"index_bytes", bytes}, {"total_bytes", bytes}}}};
            r.update(extra);
            return r;
        }));
    }

    Json throughput_cell(const std::string& kind) {
        const Json config = cell_config("throughput", kind,
                                        Json{{"slots", opt_.slots},
                                             {"min_lookups", opt_.min_lookups},
                                             {"reps", opt_.reps},
                                             {"cpu_ghz", opt_.cpu_ghz}});
        return finish_cell(config, cache_.get_or_compute(config, [&] {
            TimingResult t;
            if (kind == kIndexLni) {
                const Lni& idx = lni_index();
                t = measure_throughput([&](const Name& n) { return idx.lookup(n).hit; },
                                       dataset_.names, opt_.min_lookups, opt_.reps);
            } else if (kind == kIndexHashFnv) {
                const auto& table = hash_table(fnv_table_);
                t = measure_throughput(
                    [&](const Name& n) { return table.find(n) != nullptr; }, dataset_.names,
                    opt_.min_lookups, opt_.reps);
            } else if (kind == kIndexHashMurmur) {
                const auto& table = hash_table(murmur_table_);
                t = measure_throughput(
                    [&](const Name& n) { return table.find(n) != nullptr; }, dataset_.names,
                    opt_.min_lookups, opt_.reps);
            } else {
                const PatriciaTrie& trie = patricia();
                t = measure_throughput(
                    [&](const Name& n) { return trie.find(n) != nullptr; }, dataset_.names,
                    opt_.min_lookups, opt_.reps);
            }
            return Json{{"timing", timing_to_json(t, opt_.cpu_ghz)}};
        }));
    }

    /// Wraps a cached result into the report-facing cell shape.
    static Json finish_cell(const Json& config, Json result) {
        result["section"] = config["section"];
        result["index"] = config["index"];
        return result;
    }

    BenchOptions opt_;
    std::string tool_version_;
    detail::CellCache cache_;
    Dataset dataset_;
    Json dataset_id_;

    std::unique_ptr<LabeledTrainingSet> training_set_;
    std::unique_ptr<PyramidNN> model_;
    PyramidTrainingSummary summary_;
    bool trained_here_ = false;

    std::map<std::string, std::unique_ptr<HashMapping>> hash_mappings_;
    std::unique_ptr<LniMapping> lni_mapping_;
    std::unique_ptr<Lni> lni_index_;
    std::unique_ptr<ChainedHashTable<FibEntry, Fnv1aHasher>> fnv_table_;
    std::unique_ptr<ChainedHashTable<FibEntry, Murmur3Hasher>> murmur_table_;
    std::unique_ptr<PatriciaTrie> patricia_;
};

/// Merges standalone reports into one compare report. All inputs must be over
/// the same dataset; ratios are recomputed over the merged cells.
inline Json merge_compare(const std::vector<std::string>& report_paths) {
    if (report_paths.size() < 2) throw ConfigError("compare needs at least two reports");
    Json merged;
    Json dataset;
    for (const auto& path : report_paths) {
        const Json report = Json::parse(detail::read_text_file(path));
        if (!report.contains("config") || !report["config"].contains("dataset"))
            throw ConfigError("report missing dataset config: " + path);
        if (merged.is_null()) {
            dataset = report["config"]["dataset"];
            merged = make_report(Json{{"dataset", dataset}, {"merged_from", report_paths}},
                                 report.value("tool_version", "unknown"));
        } else if (report["config"]["dataset"] != dataset) {
            throw ConfigError("mismatched datasets across compare inputs: " + path);
        }
        for (const auto& cell : report.at("results")) merged["results"].push_back(cell);
    }
    merged["ratios"] = BenchDriver::compute_ratios(merged);
    return merged;
}

/// Writes report.json and report.csv under `dir`.
inline void write_report_files(const Json& report, const std::string& dir) {
    std::filesystem::create_directories(dir);
    detail::write_text_file(dir + "/report.json", report.dump(2) + "\n");
    detail::write_text_file(dir + "/report.csv", report_to_csv(report));
}

}  // namespace lni
