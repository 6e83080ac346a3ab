// nni: dataset generation, model training, index building and benchmark
// reporting for the learned name index and its baseline structures.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lni/bench.hpp"
#include "lni/corpus.hpp"
#include "lni/crc32.hpp"
#include "lni/lni.hpp"
#include "lni/metrics.hpp"
#include "lni/pyramid.hpp"

#ifndef LNI_TOOL_VERSION
#define LNI_TOOL_VERSION "unknown"
#endif

namespace {

struct TrainFlags {
    std::string input;
    std::string output;
    std::size_t regions = 20000;
    std::size_t hidden = 12;
    std::uint64_t seed = 1;
    std::size_t l1_epochs = 2000;
    double l1_lr = 0.1;
    std::size_t l1_batch = 64;
    std::size_t l2_epochs = 8000;
    double l2_lr = 0.1;
    std::size_t l2_batch = 1;
    double l2_target_error = 6.4e-3;

    lni::PyramidConfig pyramid_config() const {
        lni::PyramidConfig cfg;
        cfg.regions = regions;
        cfg.hidden = hidden;
        cfg.train_l1 = lni::TrainConfig{.epochs = l1_epochs,
                                        .learning_rate = l1_lr,
                                        .batch_size = l1_batch,
                                        .seed = seed};
        cfg.train_l2 = lni::TrainConfig{.epochs = l2_epochs,
                                        .learning_rate = l2_lr,
                                        .batch_size = l2_batch,
                                        .target_error = l2_target_error,
                                        .seed = seed};
        return cfg;
    }
};

void add_training_flags(CLI::App* cmd, TrainFlags& f) {
    cmd->add_option("--regions", f.regions, "Level-2 network / bitmap part count");
    cmd->add_option("--hidden", f.hidden, "Hidden neurons per network");
    cmd->add_option("--seed", f.seed, "Seed for initialization and shuffling");
    cmd->add_option("--l1-epochs", f.l1_epochs, "Level-1 training epochs");
    cmd->add_option("--l1-lr", f.l1_lr, "Level-1 learning rate");
    cmd->add_option("--l1-batch", f.l1_batch, "Level-1 minibatch size");
    cmd->add_option("--l2-epochs", f.l2_epochs, "Level-2 training epochs");
    cmd->add_option("--l2-lr", f.l2_lr, "Level-2 learning rate");
    cmd->add_option("--l2-batch", f.l2_batch, "Level-2 minibatch size");
    cmd->add_option("--l2-target-error", f.l2_target_error,
                    "Stop a level-2 network once its epoch MSE falls to this");
}

std::uint32_t file_crc32(const std::string& path) {
    const std::string bytes = lni::detail::read_text_file(path);
    return lni::detail::crc32(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size());
}

int cmd_generate(const lni::CorpusSpec& spec, const std::string& output) {
    const lni::Dataset d = lni::generate_names(spec);
    lni::save_dataset(d, output);
    double mean_len = 0;
    for (const auto& n : d.names) mean_len += static_cast<double>(n.size());
    mean_len /= static_cast<double>(d.size());
    std::printf("names: %zu\n", d.size());
    std::printf("mean-length: %.2f\n", mean_len);
    std::printf("dataset-file: %s\n", output.c_str());
    return 0;
}

int cmd_train(const TrainFlags& f) {
    const lni::Dataset d = lni::load_dataset(f.input);
    const lni::PyramidConfig cfg = f.pyramid_config();
    const lni::LabeledTrainingSet ts = lni::build_training_set(d, cfg);
    lni::PyramidTrainingSummary summary;
    const lni::PyramidNN model = lni::train_pyramid(ts, cfg, &summary);
    lni::save_model(model, f.output);
    std::printf("names: %zu\n", d.size());
    std::printf("distinct-vectors: %zu\n", ts.size());
    std::printf("l1-final-mse: %.6g\n", summary.l1.final_mse);
    std::printf("l1-epochs-run: %zu\n", summary.l1.epochs_run);
    std::printf("l2-mean-mse: %.6g\n", summary.l2_mean_mse);
    std::printf("l2-mean-epochs: %zu\n", summary.l2_mean_epochs);
    std::printf("regions-trained: %zu\n", summary.regions_trained);
    std::printf("regions-empty: %zu\n", summary.regions_empty);
    std::printf("classification-accuracy: %.4f\n", lni::classification_accuracy(model, ts));
    std::printf("model-bytes: %llu\n",
                static_cast<unsigned long long>(lni::model_size_bytes(model)));
    std::printf("model-crc32: %08x\n", file_crc32(f.output));
    std::printf("model-file: %s\n", f.output.c_str());
    return 0;
}

std::vector<lni::FibEntry> entries_from_flags(const std::string& input,
                                              const std::string& from_fib,
                                              lni::Dataset* names_out) {
    if (!input.empty() && !from_fib.empty())
        throw lni::ConfigError("give either --input or --from-fib, not both");
    if (input.empty() && from_fib.empty())
        throw lni::ConfigError("need --input or --from-fib");
    std::vector<lni::FibEntry> entries;
    lni::Dataset names;
    if (!input.empty()) {
        names = lni::load_dataset(input);
        entries = lni::synthesize_entries(names);
    } else {
        entries = lni::load_fib(from_fib);
        names.names.reserve(entries.size());
        for (const auto& e : entries) names.names.push_back(e.name);
    }
    if (names_out) *names_out = std::move(names);
    return entries;
}

int cmd_build(const std::string& input, const std::string& from_fib, const std::string& model_path,
              std::uint64_t slots, const std::string& output, std::size_t entry_size,
              std::size_t replicas) {
    lni::Dataset names;
    std::vector<lni::FibEntry> entries = entries_from_flags(input, from_fib, &names);
    lni::PyramidNN model = lni::load_model(model_path);
    if (slots == 0) slots = names.size();
    const std::uint64_t regions = model.config.regions;
    const std::uint64_t effective = (slots + regions - 1) / regions * regions;
    if (effective != slots)
        std::fprintf(stderr,
                     "warning: %llu slots rounded up to %llu (multiple of %llu parts)\n",
                     static_cast<unsigned long long>(slots),
                     static_cast<unsigned long long>(effective),
                     static_cast<unsigned long long>(regions));
    lni::Lni index =
        lni::build_with_model(std::move(model), std::move(entries), slots, entry_size);
    const lni::LniStats st = index.stats();
    const lni::LniFib fib{std::move(index), replicas};
    const lni::LniMemoryReport mem = lni::memory_report(fib);

    lni::Json manifest{
        {"schema", "nni-build/1"},
        {"tool_version", LNI_TOOL_VERSION},
        {"dataset", input.empty() ? lni::Json() : lni::Json(input)},
        {"fib", from_fib.empty() ? lni::Json() : lni::Json(from_fib)},
        {"model", model_path},
        {"requested_slots", slots},
        {"effective_slots", effective},
        {"entry_size", entry_size},
        {"replicas", replicas},
        {"stats",
         {{"inserts", st.inserts},
          {"collisions", st.collisions},
          {"stored", st.stored},
          {"fp_build", static_cast<double>(st.collisions) / static_cast<double>(st.inserts)}}},
        {"empty_slot_ratio", fib.index.bitmap().empty_slot_ratio()},
        {"memory",
         {{"model_bytes", mem.model_bytes},
          {"bitmap_bytes", mem.bitmap_bytes},
          {"entry_store_bytes", mem.entry_store_bytes},
          {"total_bytes", mem.total_bytes}}},
    };
    lni::detail::write_text_file(output, manifest.dump(2) + "\n");
    std::printf("inserts: %llu\n", static_cast<unsigned long long>(st.inserts));
    std::printf("collisions: %llu\n", static_cast<unsigned long long>(st.collisions));
    std::printf("fp-build: %.6f\n",
                static_cast<double>(st.collisions) / static_cast<double>(st.inserts));
    std::printf("empty-slot-ratio: %.6f\n", fib.index.bitmap().empty_slot_ratio());
    std::printf("total-bytes: %llu\n", static_cast<unsigned long long>(mem.total_bytes));
    std::printf("manifest-file: %s\n", output.c_str());
    return 0;
}

int cmd_lookup(std::string input, std::string from_fib, std::string model_path,
               std::uint64_t slots, const std::string& manifest_path,
               const std::vector<std::string>& names) {
    if (!manifest_path.empty()) {
        const lni::Json manifest = lni::Json::parse(lni::detail::read_text_file(manifest_path));
        if (manifest.value("schema", "") != "nni-build/1")
            throw lni::ConfigError("not a build manifest: " + manifest_path);
        if (manifest.contains("dataset") && manifest["dataset"].is_string())
            input = manifest["dataset"].get<std::string>();
        if (manifest.contains("fib") && manifest["fib"].is_string())
            from_fib = manifest["fib"].get<std::string>();
        model_path = manifest.at("model").get<std::string>();
        slots = manifest.at("requested_slots").get<std::uint64_t>();
    }
    if (model_path.empty()) throw lni::ConfigError("need --model or --manifest");
    std::vector<lni::FibEntry> entries = entries_from_flags(input, from_fib, nullptr);
    lni::PyramidNN model = lni::load_model(model_path);
    if (slots == 0) slots = entries.size();
    const lni::Lni index = lni::build_with_model(std::move(model), std::move(entries), slots);
    for (const auto& name : names) {
        const lni::LniLookup r = index.lookup(name);
        if (!r.hit) {
            std::printf("MISS %s\n", name.c_str());
            continue;
        }
        std::string faces;
        for (std::size_t i = 0; i < r.entry->faces.size(); ++i) {
            if (i) faces += ',';
            faces += std::to_string(r.entry->faces[i]);
        }
        std::printf("HIT %s address=%llu faces=%s stored-name=%s\n", name.c_str(),
                    static_cast<unsigned long long>(r.address), faces.c_str(),
                    r.entry->name.c_str());
    }
    return 0;
}

int emit_report(const lni::Json& report, const std::string& output,
                const std::string& format) {
    if (!output.empty()) {
        lni::write_report_files(report, output);
        std::printf("report-json: %s/report.json\n", output.c_str());
        std::printf("report-csv: %s/report.csv\n", output.c_str());
        return 0;
    }
    if (format == "csv")
        std::fputs(lni::report_to_csv(report).c_str(), stdout);
    else
        std::printf("%s\n", report.dump(2).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"learned name index toolkit"};
    app.set_version_flag("--version", LNI_TOOL_VERSION);
    app.require_subcommand(1);

    // generate
    auto* generate = app.add_subcommand("generate", "Write a deterministic synthetic name set");
    lni::CorpusSpec spec;
    std::string gen_output;
    generate->add_option("--names", spec.count, "Number of names")->required();
    generate->add_option("--seed", spec.seed, "Generation seed");
    generate->add_option("--output", gen_output, "Dataset file to write")->required();
    generate->add_option("--min-components", spec.component_count_min, "Min path components");
    generate->add_option("--max-components", spec.component_count_max, "Max path components");
    generate->add_option("--min-component-len", spec.component_len_min, "Min component length");
    generate->add_option("--max-component-len", spec.component_len_max, "Max component length");
    generate->add_option("--mean-length", spec.target_mean_length, "Target mean name length");

    // train
    auto* train = app.add_subcommand("train", "Train a model on a dataset");
    TrainFlags tf;
    train->add_option("--input", tf.input, "Dataset file")->required();
    train->add_option("--output", tf.output, "Model file to write")->required();
    add_training_flags(train, tf);

    // build
    auto* build = app.add_subcommand("build", "Build an index and write its manifest");
    std::string b_input, b_fib, b_model, b_output;
    std::uint64_t b_slots = 0;
    std::size_t b_entry_size = 8, b_replicas = 2;
    build->add_option("--input", b_input, "Dataset file (entries get one default face)");
    build->add_option("--from-fib", b_fib, "FIB snapshot file (name TAB face,face,...)");
    build->add_option("--model", b_model, "Trained model file")->required();
    build->add_option("--slots", b_slots, "Total bitmap slots (0 = one per name)");
    build->add_option("--output", b_output, "Manifest file to write")->required();
    build->add_option("--entry-size", b_entry_size, "Simulated entry size in bytes");
    build->add_option("--replicas", b_replicas, "Replica count for memory accounting");

    // lookup
    auto* lookup = app.add_subcommand("lookup", "Build in memory and look names up");
    std::string l_input, l_fib, l_model, l_manifest;
    std::uint64_t l_slots = 0;
    std::vector<std::string> l_names;
    lookup->add_option("--input", l_input, "Dataset file");
    lookup->add_option("--from-fib", l_fib, "FIB snapshot file");
    lookup->add_option("--model", l_model, "Trained model file");
    lookup->add_option("--manifest", l_manifest, "Build manifest (supplies the flags above)");
    lookup->add_option("--slots", l_slots, "Total bitmap slots (0 = one per name)");
    lookup->add_option("--name", l_names, "Name to look up (repeatable)")->required();

    // bench / compare share flags
    lni::BenchOptions bench_opt;
    std::string bench_format = "json";
    bool no_timing = false;
    std::vector<std::string> compare_reports;
    auto add_bench_flags = [&](CLI::App* cmd) {
        cmd->add_option("--input", bench_opt.dataset_path, "Dataset file (else generated)");
        cmd->add_option("--names", bench_opt.names, "Generated dataset size");
        cmd->add_option("--seed", bench_opt.seed, "Seed for generation and training");
        cmd->add_option("--model", bench_opt.model_path, "Preloaded model file");
        cmd->add_option("--regions", bench_opt.regions, "Level-2 network / part count");
        cmd->add_option("--hidden", bench_opt.hidden, "Hidden neurons per network");
        cmd->add_option("--l1-epochs", bench_opt.l1_epochs, "Level-1 epochs");
        cmd->add_option("--l1-lr", bench_opt.l1_lr, "Level-1 learning rate");
        cmd->add_option("--l1-batch", bench_opt.l1_batch, "Level-1 batch size");
        cmd->add_option("--l2-epochs", bench_opt.l2_epochs, "Level-2 epochs");
        cmd->add_option("--l2-lr", bench_opt.l2_lr, "Level-2 learning rate");
        cmd->add_option("--l2-batch", bench_opt.l2_batch, "Level-2 batch size");
        cmd->add_option("--l2-target-error", bench_opt.l2_target_error,
                        "Stop a level-2 network once its epoch MSE falls to this");
        cmd->add_option("--indexes", bench_opt.indexes,
                        "Index kinds: lni hash-fnv1a64 hash-murmur3-128 patricia")
            ->delimiter(',');
        cmd->add_option("--slots", bench_opt.slots, "Slot budget (0 = one per name)");
        cmd->add_option("--fp-target", bench_opt.fp_target, "FP target for slots-required");
        cmd->add_option("--granularity", bench_opt.granularity, "Slots-required step size");
        cmd->add_option("--replicas", bench_opt.replicas, "Replicas for memory accounting");
        cmd->add_flag("--no-timing", no_timing, "Skip throughput cells (byte-stable reports)");
        cmd->add_option("--cpu-ghz", bench_opt.cpu_ghz,
                        "Nominal CPU GHz for cycle estimates (0 = omit)");
        cmd->add_option("--reps", bench_opt.reps, "Timing repetitions");
        cmd->add_option("--min-lookups", bench_opt.min_lookups, "Lookups per timing repetition");
        cmd->add_option("--output", bench_opt.output_dir, "Report/cell directory");
        cmd->add_option("--format", bench_format, "Stdout format: json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
    };
    auto* bench = app.add_subcommand("bench", "Run the metric sweeps and emit a report");
    add_bench_flags(bench);
    auto* compare = app.add_subcommand("compare", "Side-by-side indexes with derived ratios");
    add_bench_flags(compare);
    compare->add_option("--reports", compare_reports,
                        "Merge existing report.json files instead of running")
        ->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) return cmd_generate(spec, gen_output);
        if (train->parsed()) return cmd_train(tf);
        if (build->parsed())
            return cmd_build(b_input, b_fib, b_model, b_slots, b_output, b_entry_size,
                             b_replicas);
        if (lookup->parsed())
            return cmd_lookup(l_input, l_fib, l_model, l_slots, l_manifest, l_names);
        bench_opt.timing = !no_timing;
        if (bench->parsed()) {
            lni::BenchDriver driver(bench_opt, LNI_TOOL_VERSION);
            return emit_report(driver.run(), bench_opt.output_dir, bench_format);
        }
        if (compare->parsed()) {
            if (!compare_reports.empty())
                return emit_report(lni::merge_compare(compare_reports), bench_opt.output_dir,
                                   bench_format);
            lni::BenchDriver driver(bench_opt, LNI_TOOL_VERSION);
            return emit_report(driver.run_compare(), bench_opt.output_dir, bench_format);
        }
    } catch (const lni::ParseError& e) {
        std::fprintf(stderr, "error: parse: %s\n", e.what());
        return 1;
    } catch (const lni::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
