#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "lni/bpnn.hpp"
#include "lni/corpus.hpp"
#include "lni/crc32.hpp"
#include "lni/error.hpp"
#include "lni/input.hpp"
#include "lni/rng.hpp"

namespace lni {

/// Byte inputs are scaled into [0,1] before touching a network; tanh
/// pre-activations stay in a trainable range that way.
inline constexpr double kInputScale = 1.0 / 255.0;

/// Two-level model shape plus the per-level training parameters.
struct PyramidConfig {
    std::size_t levels = 2;  // fixed; higher pyramids are out of scope
    std::size_t regions = 1000;
    std::size_t input_dim = kDefaultInputDim;
    std::size_t hidden = 20;
    TrainConfig train_l1;
    TrainConfig train_l2;

    void validate() const {
        if (levels != 2) throw ConfigError("only two-level models are supported");
        if (regions < 1) throw ConfigError("regions must be >= 1");
        if (input_dim < 1) throw ConfigError("input_dim must be >= 1");
        if (hidden < 1) throw ConfigError("hidden must be >= 1");
        train_l1.validate();
        train_l2.validate();
    }
};

/// Sorted distinct input vectors with their level-1 region labels and
/// level-2 in-region rank labels.
struct LabeledTrainingSet {
    std::size_t dim = 0;
    std::size_t regions = 0;
    std::vector<InputVector> vectors;      // ascending per vector_order, distinct
    std::vector<std::uint32_t> l1_labels;  // floor(i / Size * regions)
    std::vector<double> l2_labels;         // zero-based rank within label group / group size

    std::size_t size() const { return vectors.size(); }
};

/// Processes, deduplicates and sorts the dataset's input vectors, then labels
/// them: l1 = floor(i / Size * R) (exact integer arithmetic), l2 = rank within
/// the l1 group divided by the group size.
inline LabeledTrainingSet build_training_set(const Dataset& d, const PyramidConfig& cfg) {
    cfg.validate();
    if (d.empty()) throw ConfigError("cannot label an empty dataset");

    LabeledTrainingSet ts;
    ts.dim = cfg.input_dim;
    ts.regions = cfg.regions;
    ts.vectors.reserve(d.size());
    for (const auto& name : d.names) ts.vectors.push_back(process(name, cfg.input_dim));
    std::sort(ts.vectors.begin(), ts.vectors.end(),
              [](const InputVector& a, const InputVector& b) { return vector_order(a, b) < 0; });
    ts.vectors.erase(std::unique(ts.vectors.begin(), ts.vectors.end()), ts.vectors.end());

    const std::uint64_t size = ts.vectors.size();
    ts.l1_labels.resize(size);
    ts.l2_labels.resize(size);
    for (std::uint64_t i = 0; i < size; ++i)
        ts.l1_labels[i] = static_cast<std::uint32_t>(i * cfg.regions / size);
    std::uint64_t group_start = 0;
    while (group_start < size) {
        std::uint64_t group_end = group_start + 1;
        while (group_end < size && ts.l1_labels[group_end] == ts.l1_labels[group_start])
            ++group_end;
        const double group_size = static_cast<double>(group_end - group_start);
        for (std::uint64_t i = group_start; i < group_end; ++i)
            ts.l2_labels[i] = static_cast<double>(i - group_start) / group_size;
        group_start = group_end;
    }
    return ts;
}

/// The trained two-level model: one routing network and R per-region networks.
/// Immutable after training; safe for unlimited concurrent readers.
struct PyramidNN {
    PyramidConfig config;
    Bpnn level1;
    std::vector<Bpnn> level2;
    std::vector<std::uint8_t> region_populated;  // 1 when the region saw >= 1 training row

    /// Region for an already-scaled input (values in [0,1]).
    std::uint32_t predict_region_scaled(const double* x) const {
        const double raw = level1.forward_raw(x);
        const double span = static_cast<double>(config.regions - 1);
        double r = std::round(raw * span);
        if (!(r > 0)) r = 0;  // also catches NaN
        if (r > span) r = span;
        return static_cast<std::uint32_t>(r);
    }

    /// CDF estimate within `region` for an already-scaled input.
    double predict_cdf_scaled(const double* x, std::uint32_t region) const {
        const double raw = level2[region].forward_raw(x);
        if (!(raw > 0)) return 0.0;
        if (raw > 1) return 1.0;
        return raw;
    }
};

namespace detail {

inline constexpr std::size_t kMaxStackDim = 256;

inline void scale_input(const PyramidNN& p, const InputVector& v, double* out) {
    if (v.size() != p.config.input_dim) throw ConfigError("input vector dimension mismatch");
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = static_cast<double>(v[i]) * kInputScale;
}

}  // namespace detail

/// Region index in [0, R-1]: clamp(round(forward(level1, v/255) * (R-1)), 0, R-1).
inline std::uint32_t predict_region(const PyramidNN& p, const InputVector& v) {
    if (p.config.input_dim > detail::kMaxStackDim) throw ConfigError("input_dim too large");
    double x[detail::kMaxStackDim];
    detail::scale_input(p, v, x);
    return p.predict_region_scaled(x);
}

/// CDF estimate in [0,1]: clamp(forward(level2[predict_region(p,v)], v/255), 0, 1).
inline double predict_cdf(const PyramidNN& p, const InputVector& v) {
    if (p.config.input_dim > detail::kMaxStackDim) throw ConfigError("input_dim too large");
    double x[detail::kMaxStackDim];
    detail::scale_input(p, v, x);
    return p.predict_cdf_scaled(x, p.predict_region_scaled(x));
}

struct RegionCdf {
    std::uint32_t region;
    double cdf;
};

/// One-pass region + CDF prediction (single input scaling).
inline RegionCdf predict(const PyramidNN& p, const InputVector& v) {
    if (p.config.input_dim > detail::kMaxStackDim) throw ConfigError("input_dim too large");
    double x[detail::kMaxStackDim];
    detail::scale_input(p, v, x);
    const std::uint32_t region = p.predict_region_scaled(x);
    return {region, p.predict_cdf_scaled(x, region)};
}

/// Per-level convergence digest filled in by train_pyramid on request.
struct PyramidTrainingSummary {
    TrainResult l1;
    double l2_mean_mse = 0;  // mean final MSE over trained regions
    std::size_t l2_mean_epochs = 0;
    std::size_t regions_trained = 0;
    std::size_t regions_empty = 0;
};

/// Trains the model per the level-by-level procedure: level 1 learns the
/// region labels (scaled to [0,1]); rows are then partitioned by the model's
/// own region predictions and each level-2 network learns the local rank of
/// the rows actually routed to it. Empty regions keep their initialized
/// parameters and are flagged in region_populated.
///
/// Seeding is deterministic: network k's initialization uses
/// mix_seed(level seed, 2k) and its shuffle order mix_seed(level seed, 2k+1),
/// with level 1 as k=0 of its own config and level-2 network k as k+1.
inline PyramidNN train_pyramid(const LabeledTrainingSet& ts, const PyramidConfig& cfg,
                               PyramidTrainingSummary* summary = nullptr) {
    cfg.validate();
    if (ts.size() == 0) throw ConfigError("cannot train on an empty training set");
    if (ts.dim != cfg.input_dim) throw ConfigError("training set dimension mismatch");
    if (ts.regions != cfg.regions) throw ConfigError("training set region count mismatch");

    const std::size_t n = ts.size();
    const std::size_t dim = cfg.input_dim;
    const double span = cfg.regions > 1 ? static_cast<double>(cfg.regions - 1) : 1.0;

    SampleSet l1_samples;
    l1_samples.dim = dim;
    l1_samples.xs.resize(n * dim);
    l1_samples.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < dim; ++j)
            l1_samples.xs[i * dim + j] = static_cast<double>(ts.vectors[i][j]) * kInputScale;
        l1_samples.labels[i] = static_cast<double>(ts.l1_labels[i]) / span;
    }

    PyramidNN model{
        .config = cfg,
        .level1 = Bpnn(dim, cfg.hidden, 1, detail::mix_seed(cfg.train_l1.seed, 0)),
        .level2 = {},
        .region_populated = std::vector<std::uint8_t>(cfg.regions, 0),
    };
    TrainConfig l1_cfg = cfg.train_l1;
    l1_cfg.seed = detail::mix_seed(cfg.train_l1.seed, 1);
    const TrainResult l1_result = train(model.level1, l1_samples, l1_cfg);
    if (summary) summary->l1 = l1_result;

    model.level2.reserve(cfg.regions);
    for (std::size_t k = 0; k < cfg.regions; ++k)
        model.level2.emplace_back(dim, cfg.hidden, 1,
                                  detail::mix_seed(cfg.train_l2.seed, 2 * (k + 1)));

    // Route every row through the freshly trained level 1; rows train the
    // network that will actually serve them at lookup time.
    std::vector<std::vector<std::uint32_t>> routed(cfg.regions);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t r = model.predict_region_scaled(l1_samples.xs.data() + i * dim);
        routed[r].push_back(static_cast<std::uint32_t>(i));
    }

    for (std::size_t k = 0; k < cfg.regions; ++k) {
        const auto& rows = routed[k];
        if (rows.empty()) continue;
        model.region_populated[k] = 1;
        SampleSet region_samples;
        region_samples.dim = dim;
        region_samples.xs.reserve(rows.size() * dim);
        region_samples.labels.reserve(rows.size());
        const double group_size = static_cast<double>(rows.size());
        for (std::size_t rank = 0; rank < rows.size(); ++rank) {
            const double* x = l1_samples.xs.data() + rows[rank] * dim;
            region_samples.xs.insert(region_samples.xs.end(), x, x + dim);
            region_samples.labels.push_back(static_cast<double>(rank) / group_size);
        }
        TrainConfig l2_cfg = cfg.train_l2;
        l2_cfg.seed = detail::mix_seed(cfg.train_l2.seed, 2 * (k + 1) + 1);
        const TrainResult r = train(model.level2[k], region_samples, l2_cfg);
        if (summary) {
            summary->l2_mean_mse += r.final_mse;
            summary->l2_mean_epochs += r.epochs_run;
            summary->regions_trained += 1;
        }
    }
    if (summary) {
        if (summary->regions_trained > 0) {
            summary->l2_mean_mse /= static_cast<double>(summary->regions_trained);
            summary->l2_mean_epochs /= summary->regions_trained;
        }
        summary->regions_empty = cfg.regions - summary->regions_trained;
    }
    return model;
}

/// Fraction of training rows whose predicted region equals their label.
inline double classification_accuracy(const PyramidNN& p, const LabeledTrainingSet& ts) {
    if (ts.size() == 0) throw ConfigError("empty training set");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ts.size(); ++i)
        if (predict_region(p, ts.vectors[i]) == ts.l1_labels[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(ts.size());
}

/// Stored size of the parameters across all 1+R networks (8 bytes each,
/// headers excluded): (1+R) * (h*N + h + h + 1) * 8 for topology N-h-1.
inline std::uint64_t model_size_bytes(const PyramidNN& p) {
    std::uint64_t total = p.level1.size_bytes();
    for (const auto& net : p.level2) total += net.size_bytes();
    return total;
}

namespace detail {

inline constexpr char kModelMagic[4] = {'P', 'N', 'N', '1'};
inline constexpr std::uint16_t kModelVersion = 1;

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

inline void put_f64(std::vector<std::uint8_t>& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int s = 0; s < 64; s += 8) out.push_back(static_cast<std::uint8_t>(bits >> s));
}

inline std::uint16_t get_u16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline std::uint32_t get_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline double get_f64(const std::uint8_t* p) {
    std::uint64_t bits = 0;
    for (int i = 7; i >= 0; --i) bits = (bits << 8) | p[i];
    return std::bit_cast<double>(bits);
}

inline void put_net(std::vector<std::uint8_t>& out, const Bpnn& net) {
    for (double v : net.w1()) put_f64(out, v);
    for (double v : net.b1()) put_f64(out, v);
    for (double v : net.w2()) put_f64(out, v);
    for (double v : net.b2()) put_f64(out, v);
}

inline void get_net(const std::uint8_t* p, Bpnn& net) {
    auto fill = [&p](std::span<double> dst) {
        for (double& v : dst) {
            v = get_f64(p);
            p += 8;
        }
    };
    fill(net.w1());
    fill(net.b1());
    fill(net.w2());
    fill(net.b2());
}

}  // namespace detail

/// Serializes the model to its bit-exact file form: magic "PNN1", format
/// version, topology header, then every network's W1/b1/W2/b2 as IEEE-754
/// binary64 little-endian, with a trailing CRC-32 of all prior bytes.
inline void save_model(const PyramidNN& p, const std::string& path) {
    std::vector<std::uint8_t> buf;
    buf.reserve(14 + (1 + p.level2.size()) * p.level1.parameter_count() * 8 + 4);
    buf.insert(buf.end(), detail::kModelMagic, detail::kModelMagic + 4);
    detail::put_u16(buf, detail::kModelVersion);
    detail::put_u16(buf, static_cast<std::uint16_t>(p.config.input_dim));
    detail::put_u16(buf, static_cast<std::uint16_t>(p.config.hidden));
    detail::put_u32(buf, static_cast<std::uint32_t>(p.config.regions));
    detail::put_net(buf, p.level1);
    for (const auto& net : p.level2) detail::put_net(buf, net);
    detail::put_u32(buf, detail::crc32(buf.data(), buf.size()));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open model file for writing: " + path);
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("failed writing model file: " + path);
}

/// Loads a model saved by save_model, verifying magic, version, topology and
/// checksum. region_populated is not stored in the file; every region is
/// marked populated on load.
inline PyramidNN load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + path);
    std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("failed reading model file: " + path);

    constexpr std::size_t kHeader = 14;
    if (buf.size() < kHeader)
        throw FormatError("model file truncated in header", buf.size());
    if (std::memcmp(buf.data(), detail::kModelMagic, 4) != 0)
        throw FormatError("bad model magic", 0);
    if (detail::get_u16(buf.data() + 4) != detail::kModelVersion)
        throw FormatError("unsupported model format version", 4);
    const std::uint16_t dim = detail::get_u16(buf.data() + 6);
    const std::uint16_t hidden = detail::get_u16(buf.data() + 8);
    const std::uint32_t regions = detail::get_u32(buf.data() + 10);
    if (dim < 1 || hidden < 1 || regions < 1)
        throw FormatError("invalid model topology", 6);

    const std::uint64_t per_net =
        8ull * (static_cast<std::uint64_t>(hidden) * dim + hidden + hidden + 1);
    const std::uint64_t expect = kHeader + (1ull + regions) * per_net + 4;
    if (buf.size() != expect)
        throw FormatError("model file truncated mid-matrix", buf.size());

    const std::uint32_t stored_crc = detail::get_u32(buf.data() + buf.size() - 4);
    if (detail::crc32(buf.data(), buf.size() - 4) != stored_crc)
        throw FormatError("model checksum mismatch", buf.size() - 4);

    PyramidConfig cfg;
    cfg.regions = regions;
    cfg.input_dim = dim;
    cfg.hidden = hidden;
    PyramidNN model{
        .config = cfg,
        .level1 = Bpnn(dim, hidden, 1, 0),
        .level2 = {},
        .region_populated = std::vector<std::uint8_t>(regions, 1),
    };
    const std::uint8_t* p = buf.data() + kHeader;
    detail::get_net(p, model.level1);
    p += per_net;
    model.level2.reserve(regions);
    for (std::uint32_t k = 0; k < regions; ++k) {
        model.level2.emplace_back(dim, hidden, 1, 0);
        detail::get_net(p, model.level2.back());
        p += per_net;
    }
    return model;
}

}  // namespace lni
