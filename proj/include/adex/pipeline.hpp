#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "adex/ad_metrics.hpp"
#include "adex/auprc.hpp"
#include "adex/csv_io.hpp"
#include "adex/ed_metrics.hpp"
#include "adex/error.hpp"
#include "adex/exstream.hpp"
#include "adex/forecaster.hpp"
#include "adex/macrobase.hpp"
#include "adex/parallel.hpp"
#include "adex/partition.hpp"
#include "adex/pca.hpp"
#include "adex/ranges.hpp"
#include "adex/reconstructor.hpp"
#include "adex/resample.hpp"
#include "adex/rescale.hpp"
#include "adex/rng.hpp"
#include "adex/run_config.hpp"
#include "adex/surrogate.hpp"
#include "adex/threshold.hpp"

namespace adex {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Artifact helpers
// ---------------------------------------------------------------------------

namespace detail {

inline void write_atomic(const fs::path& path, const std::string& content) {
    write_file_atomic(path, content);
}

inline void write_json_atomic(const fs::path& path, const json& j) {
    write_atomic(path, j.dump(2) + "\n");
}

inline json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FormatError("'" + path.string() + "': " + e.what());
    }
    return j;
}

inline std::uint64_t hash_file(const fs::path& path, std::uint64_t h = 0xcbf29ce484222325ULL) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path.string() + "' for hashing");
    char buf[1 << 15];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
        h = fnv1a(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
    return h;
}

/// Content-hash based stage cache: a stage may be skipped when its recorded
/// input hash matches and all its artifacts still exist.
class StageCache {
public:
    StageCache(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

    bool fresh(const std::string& stage, std::uint64_t input_hash,
               const std::vector<fs::path>& artifacts) const {
        fs::path meta = dir_ / (stage + ".hash");
        std::ifstream in(meta);
        if (!in)
            return false;
        std::string recorded;
        in >> recorded;
        if (recorded != std::to_string(input_hash))
            return false;
        for (const auto& a : artifacts)
            if (!fs::exists(a))
                return false;
        return true;
    }

    void record(const std::string& stage, std::uint64_t input_hash) const {
        write_atomic(dir_ / (stage + ".hash"), std::to_string(input_hash) + "\n");
    }

private:
    fs::path dir_;
};

class StageTimer {
public:
    StageTimer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

// JSON bindings for artifacts -----------------------------------------------

inline json plan_to_json(const PartitionPlan& plan) {
    json j;
    j["setting"] = to_string(plan.setting);
    if (plan.app_id)
        j["app_id"] = *plan.app_id;
    j["train_traces"] = plan.train_traces;
    j["test_traces"] = plan.test_traces;
    json peeked = json::object();
    for (const auto& [id, end] : plan.peeked_segments)
        peeked[id] = end;
    j["peeked_segments"] = peeked;
    return j;
}

inline PartitionPlan plan_from_json(const json& j) {
    PartitionPlan plan;
    plan.setting = learning_setting_from_string(j.at("setting").get<std::string>());
    if (j.contains("app_id"))
        plan.app_id = j.at("app_id").get<int>();
    plan.train_traces = j.at("train_traces").get<std::vector<std::string>>();
    plan.test_traces = j.at("test_traces").get<std::vector<std::string>>();
    for (const auto& [id, end] : j.at("peeked_segments").items())
        plan.peeked_segments[id] = end.get<std::size_t>();
    return plan;
}

inline json pca_to_json(const PcaModel& model) {
    json j;
    j["mean"] = model.mean_vector;
    j["components"] = model.components.data;
    j["ratios"] = model.explained_ratios;
    j["k"] = model.k;
    return j;
}

inline PcaModel pca_from_json(const json& j) {
    PcaModel model;
    model.mean_vector = j.at("mean").get<std::vector<double>>();
    model.explained_ratios = j.at("ratios").get<std::vector<double>>();
    model.k = j.at("k").get<std::size_t>();
    model.components.rows = model.k;
    model.components.cols = model.mean_vector.size();
    model.components.data = j.at("components").get<std::vector<double>>();
    return model;
}

inline json explanation_to_json(const Explanation& e) {
    json j;
    j["kind"] = e.kind == ExplanationKind::Predicate ? "predicate" : "weights";
    j["features"] = e.feature_set;
    json preds = json::array();
    for (const auto& p : e.predicates)
        preds.push_back({{"feature", p.feature}, {"lo", p.lo}, {"hi", p.hi}});
    j["predicates"] = preds;
    json weights = json::array();
    for (const auto& w : e.weights)
        weights.push_back({{"feature", w.feature}, {"weight", w.weight}});
    j["weights"] = weights;
    j["build_time_seconds"] = e.build_time_seconds;
    j["degenerate"] = e.degenerate;
    return j;
}

inline json prf_to_json(const Prf& prf) {
    return {{"precision", prf.precision}, {"recall", prf.recall}, {"f_score", prf.f_score}};
}

inline json opt_to_json(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Run state and result
// ---------------------------------------------------------------------------

struct StageStatus {
    std::string name;
    bool cached = false;
    double seconds = 0.0;
};

struct RunResult {
    fs::path out_dir;
    std::vector<StageStatus> stages;
    std::vector<std::string> warnings;
    json ad_report;
    json ed_report; // null when the explain stage is disabled
    json timings;
};

namespace detail {

struct LoadedDataset {
    std::vector<Trace> traces; // sorted by trace_id
    GroundTruthTable truth;
    std::uint64_t content_hash = 0;
};

inline int app_from_trace_id(const std::string& trace_id) {
    if (trace_id.rfind("app", 0) != 0)
        return 0;
    std::size_t i = 3;
    int value = 0;
    bool any = false;
    while (i < trace_id.size() && trace_id[i] >= '0' && trace_id[i] <= '9') {
        value = value * 10 + (trace_id[i] - '0');
        any = true;
        ++i;
    }
    return any ? value : 0;
}

inline LoadedDataset load_dataset(const RunConfig& config) {
    LoadedDataset data;
    data.truth = read_ground_truth(config.ground_truth);
    std::uint64_t h = hash_file(config.ground_truth);

    std::map<std::string, int> app_by_trace;
    for (const auto& e : data.truth)
        app_by_trace[e.trace_id] = e.app_id;

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(config.traces_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv" &&
            entry.path().filename() != "ground_truth.csv")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw ConfigError("no trace files in '" + config.traces_dir.string() + "'");

    for (const auto& file : files) {
        h = fnv1a(file.filename().string(), h);
        h = hash_file(file, h);
        Trace t = read_trace(file, config.fill_value);
        auto it = app_by_trace.find(t.trace_id);
        t.app_id = it != app_by_trace.end() ? it->second : app_from_trace_id(t.trace_id);
        data.traces.push_back(std::move(t));
    }
    data.content_hash = h;
    return data;
}

inline const Trace& trace_by_id(const std::vector<Trace>& traces, const std::string& id) {
    for (const auto& t : traces)
        if (t.trace_id == id)
            return t;
    throw IntegrityError("trace '" + id + "' not found");
}

/// Ground truth with EEIs stripped, for RCI-only evaluation.
inline GroundTruthTable rci_only_view(const GroundTruthTable& truth) {
    GroundTruthTable out = truth;
    for (auto& e : out) {
        e.extended_effect_start.reset();
        e.extended_effect_end.reset();
    }
    return out;
}

// Detector handle shared between the score and explain stages.
struct FittedDetector {
    DetectorKind kind = DetectorKind::Reconstruct;
    EwmaForecaster forecaster;
    PcaReconstructor reconstructor;

    json to_json() const {
        json j;
        switch (kind) {
        case DetectorKind::Forecast:
            j["kind"] = "forecast";
            j["lambda"] = forecaster.smoothing;
            j["state"] = forecaster.state;
            j["epsilon"] = forecaster.epsilon;
            break;
        case DetectorKind::Reconstruct:
            j["kind"] = "reconstruct";
            j["window"] = reconstructor.window;
            j["feature_count"] = reconstructor.feature_count;
            j["pca"] = pca_to_json(reconstructor.model);
            break;
        case DetectorKind::External:
            j["kind"] = "external";
            break;
        }
        return j;
    }

    static FittedDetector from_json(const json& j) {
        FittedDetector d;
        std::string kind = j.at("kind").get<std::string>();
        if (kind == "forecast") {
            d.kind = DetectorKind::Forecast;
            d.forecaster.smoothing = j.at("lambda").get<double>();
            d.forecaster.state = j.at("state").get<std::vector<double>>();
            d.forecaster.epsilon = j.at("epsilon").get<double>();
        } else if (kind == "reconstruct") {
            d.kind = DetectorKind::Reconstruct;
            d.reconstructor.window = j.at("window").get<std::size_t>();
            d.reconstructor.feature_count = j.at("feature_count").get<std::size_t>();
            d.reconstructor.model = pca_from_json(j.at("pca"));
        } else {
            d.kind = DetectorKind::External;
        }
        return d;
    }

    ScoreSeries score(const Trace& trace) const {
        if (kind == DetectorKind::Forecast)
            return score_forecast(forecaster, trace);
        if (kind == DetectorKind::Reconstruct)
            return score_reconstruction(reconstructor, trace);
        throw UnsupportedError("external detector cannot score traces");
    }
};

} // namespace detail

// ---------------------------------------------------------------------------
// The run itself
// ---------------------------------------------------------------------------

inline RunResult run_pipeline(const RunConfig& config) {
    config.validate();
    RunResult result;
    result.out_dir = config.output_dir;
    fs::create_directories(config.output_dir);
    fs::create_directories(config.output_dir / "scores");
    fs::create_directories(config.output_dir / "transformed");
    detail::StageCache cache(config.output_dir / "cache");

    auto config_fingerprint = [&](std::initializer_list<std::string> parts) {
        std::uint64_t h = fnv1a("adex-stage");
        for (const auto& p : parts)
            h = fnv1a(p, h);
        return h;
    };

    // ---------------- load ----------------
    detail::LoadedDataset dataset = detail::load_dataset(config);

    // ---------------- S1: partition ----------------
    detail::StageTimer t1;
    fs::path plan_path = config.output_dir / "plan.json";
    std::ostringstream part_cfg;
    part_cfg << to_string(config.setting) << "/" << (config.app_id ? *config.app_id : -1)
             << "/" << dataset.content_hash;
    std::uint64_t h_partition = config_fingerprint({part_cfg.str()});

    PartitionPlan plan;
    bool cached_partition = cache.fresh("partition", h_partition, {plan_path});
    if (cached_partition) {
        plan = detail::plan_from_json(detail::read_json(plan_path));
    } else {
        plan = partition(dataset.traces, dataset.truth, config.setting, config.app_id,
                         &result.warnings);
        detail::write_json_atomic(plan_path, detail::plan_to_json(plan));
        cache.record("partition", h_partition);
    }
    result.stages.push_back({"partition", cached_partition, t1.seconds()});

    // ---------------- S2: transform ----------------
    detail::StageTimer t2;
    fs::path transform_path = config.output_dir / "transform.json";
    std::ostringstream tf_cfg;
    tf_cfg << h_partition << "/" << config.resample_seconds << "/"
           << static_cast<int>(config.features.strategy) << "/" << config.features.pca_k << "/"
           << config.features.pca_coverage << "/" << config.fill_value;
    for (const auto& s : config.features.subset)
        tf_cfg << "," << s;
    std::uint64_t h_transform = config_fingerprint({tf_cfg.str()});

    std::vector<std::string> all_ids = plan.train_traces;
    all_ids.insert(all_ids.end(), plan.test_traces.begin(), plan.test_traces.end());
    std::vector<fs::path> transformed_paths;
    transformed_paths.reserve(all_ids.size());
    for (const auto& id : all_ids)
        transformed_paths.push_back(config.output_dir / "transformed" / (id + ".csv"));
    {
        auto with_meta = transformed_paths;
        with_meta.push_back(transform_path);
        bool cached_transform = cache.fresh("transform", h_transform, with_meta);

        if (!cached_transform) {
            // resample -> feature strategy -> per-trace rescale
            std::vector<Trace> resampled;
            resampled.reserve(all_ids.size());
            for (const auto& id : all_ids)
                resampled.push_back(
                    resample(detail::trace_by_id(dataset.traces, id), config.resample_seconds));

            std::optional<PcaModel> pca_model;
            std::vector<Trace> selected;
            if (config.features.strategy == FeatureStrategy::Subset) {
                if (config.features.subset.empty())
                    throw ConfigError("feature subset strategy needs a nonempty subset");
                for (const auto& t : resampled) {
                    Trace out = t;
                    out.features = config.features.subset;
                    out.values = Matrix(t.record_count(), config.features.subset.size());
                    for (std::size_t c = 0; c < config.features.subset.size(); ++c) {
                        int idx = t.feature_index(config.features.subset[c]);
                        if (idx < 0)
                            throw ConfigError("feature '" + config.features.subset[c] +
                                              "' missing from trace '" + t.trace_id + "'");
                        for (std::size_t r = 0; r < t.record_count(); ++r)
                            out.values.at(r, c) = t.values.at(r, static_cast<std::size_t>(idx));
                    }
                    selected.push_back(std::move(out));
                }
            } else if (config.features.strategy == FeatureStrategy::Pca) {
                Matrix training;
                for (const auto& id : plan.train_traces) {
                    const Trace& t = detail::trace_by_id(resampled, id);
                    training.cols = t.feature_count();
                    training.rows += t.record_count();
                    training.data.insert(training.data.end(), t.values.data.begin(),
                                         t.values.data.end());
                }
                for (const auto& [id, end] : plan.peeked_segments) {
                    const Trace& t = detail::trace_by_id(resampled, id);
                    std::size_t rows = std::min(end / config.resample_seconds, t.record_count());
                    training.rows += rows;
                    training.data.insert(training.data.end(), t.values.data.begin(),
                                         t.values.data.begin() +
                                             static_cast<std::ptrdiff_t>(rows * t.feature_count()));
                }
                PcaTarget target = config.features.pca_k > 0
                                       ? PcaTarget::fixed(config.features.pca_k)
                                       : PcaTarget::variance(config.features.pca_coverage);
                pca_model = fit_pca(training, target);
                for (const auto& t : resampled)
                    selected.push_back(apply_pca(*pca_model, t));
            } else {
                selected = std::move(resampled);
            }

            for (std::size_t i = 0; i < selected.size(); ++i) {
                Trace scaled = rescale(selected[i]).first;
                write_trace(scaled, transformed_paths[i]);
            }

            json meta;
            meta["alpha"] = 1.0 / static_cast<double>(config.resample_seconds);
            meta["dimensionality"] = selected.empty() ? 0 : selected.front().feature_count();
            meta["feature_names"] = selected.empty() ? std::vector<std::string>{}
                                                     : selected.front().features;
            if (pca_model)
                meta["pca"] = detail::pca_to_json(*pca_model);
            json peek = json::object();
            for (const auto& [id, end] : plan.peeked_segments)
                peek[id] = end / config.resample_seconds;
            meta["peek_rows"] = peek;
            json apps = json::object();
            for (const auto& id : all_ids)
                apps[id] = detail::trace_by_id(dataset.traces, id).app_id;
            meta["trace_apps"] = apps;
            detail::write_json_atomic(transform_path, meta);
            cache.record("transform", h_transform);
        }
        result.stages.push_back({"transform", cached_transform, t2.seconds()});
    }

    json transform_meta = detail::read_json(transform_path);
    const auto dimensionality = transform_meta.at("dimensionality").get<std::size_t>();
    const double alpha = transform_meta.at("alpha").get<double>();

    std::vector<Trace> transformed;
    transformed.reserve(all_ids.size());
    for (std::size_t i = 0; i < all_ids.size(); ++i) {
        Trace t = read_trace(transformed_paths[i]);
        t.app_id = transform_meta.at("trace_apps").at(t.trace_id).get<int>();
        transformed.push_back(std::move(t));
    }

    // ---------------- S3: split, fit, score ----------------
    detail::StageTimer t3;
    fs::path score_meta_path = config.output_dir / "score_meta.json";
    std::ostringstream sc_cfg;
    sc_cfg << h_transform << "/" << static_cast<int>(config.detector.kind) << "/"
           << config.detector.smoothing << "/" << config.detector.window << "/"
           << config.detector.k << "/" << config.detector.coverage << "/"
           << config.detector.scores_dir.string() << "/" << config.split_f0 << "/"
           << config.split_f1 << "/" << config.split_f2 << "/" << config.seed;
    std::uint64_t h_score = config_fingerprint({sc_cfg.str()});

    // Peeked normal prefixes (Many-Examples settings) behave like extra
    // training units: they join the internal split alongside whole traces,
    // so thresholds can calibrate against test-trace contexts. External
    // scores cannot cover them, so that mode splits whole traces only.
    std::vector<Trace> units = transformed;
    std::vector<std::string> peek_ids;
    if (config.detector.kind != DetectorKind::External) {
        for (const auto& [id, end_records] : plan.peeked_segments) {
            const Trace& t = detail::trace_by_id(transformed, id);
            std::size_t rows = std::min(
                transform_meta.at("peek_rows").at(id).get<std::size_t>(), t.record_count());
            if (rows < 2)
                continue;
            Trace prefix = t;
            prefix.trace_id = id + "#peek";
            prefix.timestamps.assign(t.timestamps.begin(),
                                     t.timestamps.begin() + static_cast<std::ptrdiff_t>(rows));
            prefix.values = t.values.slice_rows(0, rows);
            peek_ids.push_back(prefix.trace_id);
            units.push_back(std::move(prefix));
        }
    }

    TrainSplit split = split_train(plan.train_traces, derive_seed(config.seed, "split_train"),
                                   config.split_f0, config.split_f1, config.split_f2);
    if (peek_ids.size() >= 3) {
        TrainSplit peek_split =
            split_train(peek_ids, derive_seed(config.seed, "split_peeks"), config.split_f0,
                        config.split_f1, config.split_f2);
        split.d0.insert(split.d0.end(), peek_split.d0.begin(), peek_split.d0.end());
        split.d1.insert(split.d1.end(), peek_split.d1.begin(), peek_split.d1.end());
        split.d2.insert(split.d2.end(), peek_split.d2.begin(), peek_split.d2.end());
    } else {
        // Too few prefixes to split: give them to threshold fitting, where
        // context coverage matters most.
        split.d2.insert(split.d2.end(), peek_ids.begin(), peek_ids.end());
    }

    std::vector<std::string> scored_ids = split.d2;
    scored_ids.insert(scored_ids.end(), plan.test_traces.begin(), plan.test_traces.end());
    std::sort(scored_ids.begin(), scored_ids.end());
    scored_ids.erase(std::unique(scored_ids.begin(), scored_ids.end()), scored_ids.end());

    std::vector<fs::path> score_paths;
    for (const auto& id : scored_ids)
        score_paths.push_back(config.output_dir / "scores" / (id + ".csv"));
    double fit_seconds = 0.0, score_seconds = 0.0;
    detail::FittedDetector detector;
    {
        auto artifacts = score_paths;
        artifacts.push_back(score_meta_path);
        bool cached_score = cache.fresh("score", h_score, artifacts);
        if (cached_score) {
            json meta = detail::read_json(score_meta_path);
            fit_seconds = meta.at("fit_seconds").get<double>();
            score_seconds = meta.at("score_seconds").get<double>();
            detector = detail::FittedDetector::from_json(meta.at("detector"));
        } else {
            if (config.detector.kind == DetectorKind::External) {
                detail::StageTimer timer;
                detector.kind = DetectorKind::External;
                for (std::size_t i = 0; i < scored_ids.size(); ++i) {
                    fs::path src = config.detector.scores_dir / (scored_ids[i] + ".csv");
                    ScoreSeries s = read_score_series(src);
                    const Trace& t = detail::trace_by_id(units, scored_ids[i]);
                    if (s.scores.size() != t.record_count())
                        throw IntegrityError("external scores for '" + scored_ids[i] +
                                             "' have wrong length");
                    write_score_series(s, t.timestamps, score_paths[i]);
                }
                score_seconds = timer.seconds();
            } else {
                std::vector<Trace> fit_set;
                for (const auto& id : split.d0)
                    fit_set.push_back(detail::trace_by_id(units, id));

                detail::StageTimer fit_timer;
                detector.kind = config.detector.kind;
                if (config.detector.kind == DetectorKind::Forecast) {
                    detector.forecaster = fit_forecaster(fit_set, config.detector.smoothing);
                } else {
                    PcaTarget target = config.detector.k > 0
                                           ? PcaTarget::fixed(config.detector.k)
                                           : PcaTarget::variance(config.detector.coverage);
                    detector.reconstructor =
                        fit_reconstructor(fit_set, config.detector.window, target,
                                          &result.warnings);
                }
                fit_seconds = fit_timer.seconds();

                detail::StageTimer score_timer;
                std::vector<ScoreSeries> series(scored_ids.size());
                parallel_for(scored_ids.size(), config.workers, [&](std::size_t i) {
                    series[i] = detector.score(detail::trace_by_id(units, scored_ids[i]));
                });
                score_seconds = score_timer.seconds();
                for (std::size_t i = 0; i < scored_ids.size(); ++i)
                    write_score_series(series[i],
                                       detail::trace_by_id(units, scored_ids[i]).timestamps,
                                       score_paths[i]);
            }
            json meta;
            meta["fit_seconds"] = fit_seconds;
            meta["score_seconds"] = score_seconds;
            meta["detector"] = detector.to_json();
            meta["d0"] = split.d0;
            meta["d1"] = split.d1;
            meta["d2"] = split.d2;
            detail::write_json_atomic(score_meta_path, meta);
            cache.record("score", h_score);
        }
        result.stages.push_back({"score", cached_score, t3.seconds()});
    }

    std::map<std::string, ScoreSeries> scores;
    for (std::size_t i = 0; i < scored_ids.size(); ++i) {
        ScoreSeries s = read_score_series(score_paths[i]);
        s.trace_id = scored_ids[i];
        scores[scored_ids[i]] = std::move(s);
    }

    // ---------------- S4: thresholds, detection, AD evaluation ----------------
    detail::StageTimer t4;
    fs::path thresholds_path = config.output_dir / "thresholds.json";
    fs::path detections_path = config.output_dir / "detections.json";
    fs::path ad_report_path = config.output_dir / "ad_report.json";
    std::ostringstream ad_cfg;
    ad_cfg << h_score << "/";
    for (auto m : config.threshold.methods)
        ad_cfg << to_string(m) << ",";
    for (double c : config.threshold.factors)
        ad_cfg << c << ",";
    for (int it : config.threshold.iterations)
        ad_cfg << it << ",";
    for (auto lv : config.ad_levels)
        ad_cfg << to_string(lv) << ",";
    ad_cfg << config.eval.rci_only << "/" << config.eval.auprc_thresholds;
    for (auto g : config.eval.granularities)
        ad_cfg << to_string(g);
    std::uint64_t h_ad = config_fingerprint({ad_cfg.str()});

    GroundTruthTable eval_truth =
        config.eval.rci_only ? detail::rci_only_view(dataset.truth) : dataset.truth;

    bool cached_ad = cache.fresh("detect_eval", h_ad,
                                 {thresholds_path, detections_path, ad_report_path});
    if (!cached_ad) {
        std::vector<double> pooled;
        for (const auto& id : split.d2) {
            const auto& s = scores.at(id).scores;
            pooled.insert(pooled.end(), s.begin(), s.end());
        }
        if (pooled.size() < 4)
            throw DegenerateError("threshold selection needs at least 4 held-out scores");

        auto grid =
            threshold_grid(config.threshold.methods, config.threshold.factors,
                           config.threshold.iterations);
        json thresholds_json = json::array();
        json detections_json = json::object();
        json combos_json = json::array();

        // Typed real ranges per test trace, in the resampled index space.
        std::map<std::string, std::vector<AnomalyRange>> real_by_trace;
        std::size_t real_total = 0;
        for (const auto& id : plan.test_traces) {
            const Trace& t = detail::trace_by_id(transformed, id);
            real_by_trace[id] = anomaly_ranges(eval_truth, t, &result.warnings);
            real_total += real_by_trace[id].size();
        }

        std::map<std::string, std::map<std::string, std::vector<double>>> metric_samples;
        std::map<std::string, std::map<std::string, std::vector<double>>> type_samples;

        for (const auto& rule : grid) {
            ThresholdResult thr = select_threshold(pooled, rule);
            thresholds_json.push_back({{"name", rule.name()},
                                       {"method", to_string(rule.method)},
                                       {"c", rule.c},
                                       {"iterations", rule.iterations},
                                       {"value", thr.value},
                                       {"degenerate", thr.degenerate}});

            std::vector<TraceRanges> eval_input;
            json combo_detections = json::object();
            for (const auto& id : plan.test_traces) {
                auto binary = detect(scores.at(id).scores, thr.value);
                auto predicted = ranges_from_binary(binary);
                json ranges_json = json::array();
                for (const auto& r : predicted)
                    ranges_json.push_back({r.start, r.end});
                combo_detections[id] = ranges_json;
                eval_input.push_back({real_by_trace[id], std::move(predicted)});
            }
            detections_json[rule.name()] = combo_detections;

            AdReport report = evaluate_ad(eval_input, config.ad_levels);
            json combo;
            combo["name"] = rule.name();
            combo["threshold"] = thr.value;
            combo["degenerate"] = thr.degenerate;
            json levels_json = json::object();
            json types_json = json::object();
            for (const auto& lv : report.levels) {
                levels_json[to_string(lv.level)] = detail::prf_to_json(lv.prf);
                json tr = json::object();
                for (const auto& [type, rec] : lv.type_recall)
                    tr[to_string(type)] = rec;
                types_json[to_string(lv.level)] = tr;

                auto& ms = metric_samples[to_string(lv.level)];
                ms["precision"].push_back(lv.prf.precision);
                ms["recall"].push_back(lv.prf.recall);
                ms["f_score"].push_back(lv.prf.f_score);
                for (const auto& [type, rec] : lv.type_recall)
                    type_samples[to_string(lv.level)][to_string(type)].push_back(rec);
            }
            combo["levels"] = levels_json;
            combo["type_recall"] = types_json;
            combos_json.push_back(combo);
        }

        json median_json;
        {
            json levels_json = json::object();
            json types_json = json::object();
            for (auto& [level, metrics] : metric_samples) {
                json lv;
                for (auto& [metric, values] : metrics)
                    lv[metric] = median(values);
                levels_json[level] = lv;
            }
            for (auto& [level, types] : type_samples) {
                json tv;
                for (auto& [type, values] : types)
                    tv[type] = median(values);
                types_json[level] = tv;
            }
            median_json["levels"] = levels_json;
            median_json["type_recall"] = types_json;
        }

        // Threshold-free separation ability.
        std::vector<ScoredTrace> scored_traces;
        for (const auto& id : plan.test_traces) {
            const Trace& t = detail::trace_by_id(transformed, id);
            scored_traces.push_back({id, t.app_id, scores.at(id).scores, real_by_trace[id]});
        }
        json auprc_json = json::object();
        json curves_json = json::object();
        for (auto level : config.ad_levels) {
            json per_gran = json::object();
            for (auto gran : config.eval.granularities) {
                try {
                    per_gran[to_string(gran)] =
                        auprc(scored_traces, level, gran, config.eval.auprc_thresholds,
                              &result.warnings);
                } catch (const DegenerateError& e) {
                    per_gran[to_string(gran)] = nullptr;
                    result.warnings.push_back(e.what());
                }
            }
            auprc_json[to_string(level)] = per_gran;
            json curve = json::array();
            for (const auto& p : pr_curve(scored_traces, level, config.eval.auprc_thresholds))
                curve.push_back({p.recall, p.precision, p.threshold});
            curves_json[to_string(level)] = curve;
        }

        json ad_report;
        json order = json::array();
        for (auto lv : config.ad_levels)
            order.push_back(to_string(lv));
        ad_report["levels_order"] = order;
        ad_report["combos"] = combos_json;
        ad_report["median"] = median_json;
        ad_report["auprc"] = auprc_json;
        ad_report["curves"] = curves_json;
        ad_report["counts"] = {{"real_ranges", real_total},
                               {"test_traces", plan.test_traces.size()}};
        detail::write_json_atomic(thresholds_path, thresholds_json);
        detail::write_json_atomic(detections_path, detections_json);
        detail::write_json_atomic(ad_report_path, ad_report);
        cache.record("detect_eval", h_ad);
    }
    result.ad_report = detail::read_json(ad_report_path);
    result.stages.push_back({"detect_eval", cached_ad, t4.seconds()});

    // ---------------- S5: explanation + ED evaluation ----------------
    detail::StageTimer t5;
    double explain_mean_seconds = 0.0;
    json ed_type_seconds = json::object();
    if (config.explain.kind != ExplainerKind::None) {
        fs::path explanations_path = config.output_dir / "explanations.json";
        fs::path ed_report_path = config.output_dir / "ed_report.json";
        fs::path ed_meta_path = config.output_dir / "ed_meta.json";
        std::ostringstream ed_cfg;
        ed_cfg << h_ad << "/" << static_cast<int>(config.explain.kind) << "/"
               << config.explain.config.exstream.correlation_cutoff << "/"
               << config.explain.config.macrobase.bins << "/"
               << config.explain.config.macrobase.min_support << "/"
               << config.explain.config.macrobase.min_risk_ratio << "/"
               << config.explain.config.macrobase.max_itemset_size << "/"
               << config.explain.config.surrogate.k << "/"
               << config.explain.config.surrogate.perturbation_count << "/"
               << config.explain.config.surrogate.kernel_width << "/"
               << config.explain.stability_samples << "/" << config.explain.combo;
        std::uint64_t h_ed = config_fingerprint({ed_cfg.str()});

        bool cached_ed =
            cache.fresh("explain", h_ed, {explanations_path, ed_report_path, ed_meta_path});
        if (cached_ed) {
            json meta = detail::read_json(ed_meta_path);
            explain_mean_seconds = meta.at("P3_mean_seconds").get<double>();
            ed_type_seconds = meta.at("per_type_seconds");
        } else {
            // Pick the threshold combo whose detections feed the explainers.
            std::string combo_name = config.explain.combo;
            if (combo_name.empty()) {
                std::string level_key = "AD2";
                bool has_ad2 = false;
                for (auto lv : config.ad_levels)
                    has_ad2 |= lv == AdLevel::AD2;
                if (!has_ad2)
                    level_key = to_string(config.ad_levels.front());
                std::vector<std::pair<double, std::string>> by_f;
                for (const auto& combo : result.ad_report.at("combos"))
                    by_f.push_back({combo.at("levels").at(level_key).at("f_score").get<double>(),
                                    combo.at("name").get<std::string>()});
                std::stable_sort(by_f.begin(), by_f.end(),
                                 [](const auto& a, const auto& b) { return a.first < b.first; });
                combo_name = by_f[(by_f.size() - 1) / 2].second;
            }

            json detections_json = detail::read_json(detections_path);
            if (!detections_json.contains(combo_name))
                throw ConfigError("explain: no detections for combo '" + combo_name + "'");

            Explainer explainer;
            switch (config.explain.kind) {
            case ExplainerKind::Exstream:
                explainer = [cfg = config.explain.config.exstream](
                                const Matrix& anom, const Matrix& ref,
                                const std::vector<std::string>& feats, std::uint64_t) {
                    return explain_exstream({anom, ref, feats}, cfg);
                };
                break;
            case ExplainerKind::Macrobase:
                explainer = [cfg = config.explain.config.macrobase](
                                const Matrix& anom, const Matrix& ref,
                                const std::vector<std::string>& feats, std::uint64_t) {
                    return explain_macrobase({anom, ref, feats}, cfg);
                };
                break;
            case ExplainerKind::Surrogate: {
                WindowScoreFn score_fn;
                if (detector.kind == DetectorKind::Forecast) {
                    score_fn = [model = detector.forecaster](const Matrix& w) {
                        Trace t;
                        t.trace_id = "window";
                        t.values = w;
                        for (std::size_t c = 0; c < w.cols; ++c)
                            t.features.push_back("f" + std::to_string(c));
                        for (std::size_t r = 0; r < w.rows; ++r)
                            t.timestamps.push_back(static_cast<std::int64_t>(r));
                        auto s = score_forecast(model, t);
                        return mean(s.scores);
                    };
                } else {
                    score_fn = [model = detector.reconstructor](const Matrix& w) {
                        const std::size_t s = model.window;
                        std::vector<double> flat(s * w.cols);
                        if (w.rows >= s) {
                            double sum = 0.0;
                            std::size_t count = 0;
                            for (std::size_t start = 0; start + s <= w.rows; ++start) {
                                for (std::size_t r = 0; r < s; ++r)
                                    for (std::size_t c = 0; c < w.cols; ++c)
                                        flat[r * w.cols + c] = w.at(start + r, c);
                                sum += model.model.reconstruction_mse(flat);
                                ++count;
                            }
                            return sum / static_cast<double>(count);
                        }
                        // Short slice: cycle rows to fill one window.
                        for (std::size_t r = 0; r < s; ++r)
                            for (std::size_t c = 0; c < w.cols; ++c)
                                flat[r * w.cols + c] = w.at(r % w.rows, c);
                        return model.model.reconstruction_mse(flat);
                    };
                }
                explainer = [cfg = config.explain.config.surrogate, score_fn](
                                const Matrix& anom, const Matrix& ref,
                                const std::vector<std::string>& feats, std::uint64_t seed) {
                    std::vector<double> ref_means(anom.cols, 0.0);
                    for (std::size_t c = 0; c < ref.cols; ++c)
                        ref_means[c] = mean(ref.column(c));
                    return explain_surrogate(score_fn, anom, ref_means, feats, cfg, seed);
                };
                break;
            }
            case ExplainerKind::None:
                break;
            }

            // Build typed instances from this combo's detections.
            std::vector<AnomalyInstance> instances;
            json explanations_json = json::array();
            std::size_t unmatched = 0;
            std::size_t no_reference = 0;
            double time_sum = 0.0;
            std::size_t time_count = 0;
            std::map<std::string, double> type_time_sum;
            std::map<std::string, std::size_t> type_time_count;

            for (const auto& id : plan.test_traces) {
                const Trace& t = detail::trace_by_id(transformed, id);
                auto real = anomaly_ranges(eval_truth, t);
                std::vector<PredictedRange> predicted;
                for (const auto& r : detections_json.at(combo_name).at(id))
                    predicted.push_back({r.at(0).get<std::size_t>(), r.at(1).get<std::size_t>()});

                for (const auto& p : predicted) {
                    // Type = real range with the largest overlap.
                    std::size_t best_overlap = 0;
                    const AnomalyRange* best = nullptr;
                    for (const auto& ri : real) {
                        std::size_t lo = std::max(p.start, ri.start);
                        std::size_t hi = std::min(p.end, ri.end);
                        if (hi > lo && hi - lo > best_overlap) {
                            best_overlap = hi - lo;
                            best = &ri;
                        }
                    }
                    if (!best) {
                        ++unmatched;
                        continue;
                    }
                    // Reference rows: immediately preceding, not inside any
                    // predicted range, up to the anomaly's own length.
                    std::size_t ref_start = p.start;
                    std::size_t want = p.length();
                    while (ref_start > 0 && (p.start - (ref_start - 1)) <= want) {
                        std::size_t cand = ref_start - 1;
                        bool inside = false;
                        for (const auto& q : predicted)
                            inside |= cand >= q.start && cand < q.end;
                        if (inside)
                            break;
                        ref_start = cand;
                    }
                    if (ref_start == p.start) {
                        ++no_reference;
                        continue;
                    }

                    AnomalyInstance inst;
                    inst.type = best->anomaly_type;
                    inst.features = t.features;
                    inst.anomalous = t.values.slice_rows(p.start, p.end);
                    inst.preceding_normal = t.values.slice_rows(ref_start, p.start);
                    instances.push_back(std::move(inst));

                    const AnomalyInstance& ref_inst = instances.back();
                    auto t0 = std::chrono::steady_clock::now();
                    try {
                        Explanation e = explainer(
                            ref_inst.anomalous, ref_inst.preceding_normal, ref_inst.features,
                            derive_seed(config.seed, "explain",
                                        id + ":" + std::to_string(p.start)));
                        double dt = std::chrono::duration<double>(
                                        std::chrono::steady_clock::now() - t0)
                                        .count();
                        time_sum += dt;
                        ++time_count;
                        type_time_sum[to_string(ref_inst.type)] += dt;
                        ++type_time_count[to_string(ref_inst.type)];
                        e.build_time_seconds = dt;
                        json je = detail::explanation_to_json(e);
                        je["trace"] = id;
                        je["range"] = {p.start, p.end};
                        je["type"] = to_string(ref_inst.type);
                        explanations_json.push_back(je);
                    } catch (const Error& e) {
                        result.warnings.push_back("explain: '" + id + "' range [" +
                                                  std::to_string(p.start) + "," +
                                                  std::to_string(p.end) + "): " + e.what());
                    }
                }
            }

            EdEvalConfig ed_config;
            ed_config.stability_samples = config.explain.stability_samples;
            ed_config.seed = derive_seed(config.seed, "ed_eval");
            EdReport ed = evaluate_ed(instances, explainer, ed_config);

            auto row_to_json = [](const EdTypeRow& row, bool with_type) {
                json j;
                if (with_type)
                    j["type"] = to_string(row.type);
                j["instances"] = row.instance_count;
                j["conciseness_ed1"] = row.conciseness_ed1;
                j["conciseness_ed2"] = detail::opt_to_json(row.conciseness_ed2);
                j["consistency_ed1"] = detail::opt_to_json(row.consistency_ed1);
                j["normalized_consistency_ed1"] = detail::opt_to_json(row.normalized_ed1);
                j["consistency_ed2"] = detail::opt_to_json(row.consistency_ed2);
                j["normalized_consistency_ed2"] = detail::opt_to_json(row.normalized_ed2);
                if (row.accuracy_ed1) {
                    j["precision_ed1"] = row.accuracy_ed1->precision;
                    j["recall_ed1"] = row.accuracy_ed1->recall;
                    j["f_ed1"] = row.accuracy_ed1->f_score;
                } else {
                    j["precision_ed1"] = nullptr;
                    j["recall_ed1"] = nullptr;
                    j["f_ed1"] = nullptr;
                }
                if (row.accuracy_ed2) {
                    j["precision_ed2"] = row.accuracy_ed2->precision;
                    j["recall_ed2"] = row.accuracy_ed2->recall;
                    j["f_ed2"] = row.accuracy_ed2->f_score;
                } else {
                    j["precision_ed2"] = nullptr;
                    j["recall_ed2"] = nullptr;
                    j["f_ed2"] = nullptr;
                }
                return j;
            };

            json ed_report;
            ed_report["explainer"] = to_string(config.explain.kind);
            ed_report["combo"] = combo_name;
            ed_report["skipped_unmatched"] = unmatched;
            ed_report["skipped_no_reference"] = no_reference;
            ed_report["explained"] = time_count;
            json rows = json::array();
            for (const auto& row : ed.rows)
                rows.push_back(row_to_json(row, true));
            ed_report["rows"] = rows;
            ed_report["average"] = row_to_json(ed.average, false);

            explain_mean_seconds =
                time_count > 0 ? time_sum / static_cast<double>(time_count) : 0.0;
            for (const auto& [type, sum] : type_time_sum)
                ed_type_seconds[type] = sum / static_cast<double>(type_time_count[type]);

            json ed_meta;
            ed_meta["P3_mean_seconds"] = explain_mean_seconds;
            ed_meta["per_type_seconds"] = ed_type_seconds;
            detail::write_json_atomic(explanations_path, explanations_json);
            detail::write_json_atomic(ed_report_path, ed_report);
            detail::write_json_atomic(ed_meta_path, ed_meta);
            cache.record("explain", h_ed);
        }
        result.ed_report = detail::read_json(ed_report_path);
        result.stages.push_back({"explain", cached_ed, t5.seconds()});
    }

    // ---------------- timings ----------------
    json timings;
    timings["P1_fit_seconds"] = fit_seconds;
    timings["P2_score_seconds"] = score_seconds;
    timings["P3_mean_explain_seconds"] = explain_mean_seconds;
    timings["M_dimensionality"] = dimensionality;
    timings["alpha_cardinality_factor"] = alpha;
    timings["per_type_explain_seconds"] = ed_type_seconds;
    json stage_json = json::object();
    for (const auto& s : result.stages)
        stage_json[s.name] = {{"seconds", s.seconds}, {"cached", s.cached}};
    timings["stages"] = stage_json;
    detail::write_json_atomic(config.output_dir / "timings.json", timings);
    result.timings = timings;
    return result;
}

} // namespace adex
