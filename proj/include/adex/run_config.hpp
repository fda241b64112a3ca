#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "adex/ad_metrics.hpp"
#include "adex/auprc.hpp"
#include "adex/error.hpp"
#include "adex/explain.hpp"
#include "adex/partition.hpp"
#include "adex/threshold.hpp"

namespace adex {

enum class FeatureStrategy { All, Subset, Pca };
enum class DetectorKind { Forecast, Reconstruct, External };
enum class ExplainerKind { None, Exstream, Macrobase, Surrogate };

inline const char* to_string(ExplainerKind k) {
    switch (k) {
    case ExplainerKind::None: return "none";
    case ExplainerKind::Exstream: return "exstream";
    case ExplainerKind::Macrobase: return "macrobase";
    case ExplainerKind::Surrogate: return "surrogate";
    }
    return "?";
}

struct FeatureConfig {
    FeatureStrategy strategy = FeatureStrategy::All;
    std::vector<std::string> subset;
    std::size_t pca_k = 0;     // 0: use coverage
    double pca_coverage = 0.9;
};

struct DetectorConfig {
    DetectorKind kind = DetectorKind::Reconstruct;
    double smoothing = 0.01;    // forecast
    std::size_t window = 20;    // reconstruct
    std::size_t k = 5;          // reconstruct components (0: use coverage)
    double coverage = 0.0;
    std::filesystem::path scores_dir; // external
};

struct ThresholdGridConfig {
    std::vector<ThresholdMethod> methods = {ThresholdMethod::Std, ThresholdMethod::Mad,
                                            ThresholdMethod::Iqr};
    std::vector<double> factors = {1.5, 2.0, 2.5, 3.0};
    std::vector<int> iterations = {1, 2};
};

struct EvalConfig {
    bool rci_only = false; // default scores against RCI + EEI
    std::size_t auprc_thresholds = 200;
    std::vector<Granularity> granularities = {Granularity::Global, Granularity::App,
                                              Granularity::TraceLevel};
};

struct ExplainStageConfig {
    ExplainerKind kind = ExplainerKind::Exstream;
    ExplainerConfig config;
    std::size_t stability_samples = 5;
    // Threshold combination whose detections feed the explainers; empty
    // selects the combo with the median AD2 F-score.
    std::string combo;
};

struct RunConfig {
    std::filesystem::path traces_dir;
    std::filesystem::path ground_truth;
    LearningSetting setting = LearningSetting::LS4;
    std::optional<int> app_id;
    double fill_value = 0.0;
    std::size_t resample_seconds = 1;
    FeatureConfig features;
    DetectorConfig detector;
    ThresholdGridConfig threshold;
    std::vector<AdLevel> ad_levels = {AdLevel::AD1, AdLevel::AD2, AdLevel::AD3, AdLevel::AD4};
    EvalConfig eval;
    ExplainStageConfig explain;
    double split_f0 = 0.7, split_f1 = 0.15, split_f2 = 0.15;
    std::filesystem::path output_dir = "run_out";
    std::uint64_t seed = 1;
    std::size_t workers = 1;

    void validate() const {
        namespace fs = std::filesystem;
        if (!fs::exists(traces_dir))
            throw ConfigError("config: traces_dir '" + traces_dir.string() + "' does not exist");
        if (!fs::exists(ground_truth))
            throw ConfigError("config: ground_truth '" + ground_truth.string() +
                              "' does not exist");
        if (resample_seconds < 1)
            throw ConfigError("config: resample_seconds must be >= 1");
        if (detector.kind == DetectorKind::External && !fs::exists(detector.scores_dir))
            throw ConfigError("config: external scores_dir does not exist");
        if (explain.kind == ExplainerKind::Surrogate && detector.kind == DetectorKind::External)
            throw ConfigError("config: the surrogate explainer needs a fitted detector");
        explain.config.validate();
    }
};

// ---------------------------------------------------------------------------
// JSON binding
// ---------------------------------------------------------------------------

inline RunConfig run_config_from_json(const nlohmann::json& j) {
    RunConfig c;
    const auto& dataset = j.at("dataset");
    c.traces_dir = dataset.at("traces_dir").get<std::string>();
    c.ground_truth = dataset.at("ground_truth").get<std::string>();
    c.setting = learning_setting_from_string(j.value("learning_setting", "LS4"));
    if (j.contains("app_id"))
        c.app_id = j.at("app_id").get<int>();
    c.fill_value = j.value("fill_value", 0.0);
    c.resample_seconds = j.value("resample_seconds", std::size_t{1});

    if (j.contains("features")) {
        const auto& f = j.at("features");
        std::string strategy = f.value("strategy", "all");
        if (strategy == "all")
            c.features.strategy = FeatureStrategy::All;
        else if (strategy == "subset")
            c.features.strategy = FeatureStrategy::Subset;
        else if (strategy == "pca")
            c.features.strategy = FeatureStrategy::Pca;
        else
            throw ConfigError("config: unknown feature strategy '" + strategy + "'");
        c.features.subset = f.value("subset", std::vector<std::string>{});
        c.features.pca_k = f.value("k", std::size_t{0});
        c.features.pca_coverage = f.value("coverage", 0.9);
    }

    if (j.contains("detector")) {
        const auto& d = j.at("detector");
        std::string kind = d.value("kind", "reconstruct");
        if (kind == "forecast")
            c.detector.kind = DetectorKind::Forecast;
        else if (kind == "reconstruct")
            c.detector.kind = DetectorKind::Reconstruct;
        else if (kind == "external")
            c.detector.kind = DetectorKind::External;
        else
            throw ConfigError("config: unknown detector kind '" + kind + "'");
        c.detector.smoothing = d.value("lambda", 0.01);
        c.detector.window = d.value("window", std::size_t{20});
        c.detector.k = d.value("k", std::size_t{5});
        c.detector.coverage = d.value("coverage", 0.0);
        c.detector.scores_dir = d.value("scores_dir", std::string{});
    }

    if (j.contains("threshold")) {
        const auto& t = j.at("threshold");
        if (t.contains("methods")) {
            c.threshold.methods.clear();
            for (const auto& name : t.at("methods"))
                c.threshold.methods.push_back(
                    threshold_method_from_string(name.get<std::string>()));
        }
        if (t.contains("factors"))
            c.threshold.factors = t.at("factors").get<std::vector<double>>();
        if (t.contains("iterations"))
            c.threshold.iterations = t.at("iterations").get<std::vector<int>>();
    }

    if (j.contains("ad_levels")) {
        c.ad_levels.clear();
        for (const auto& lv : j.at("ad_levels")) {
            int v = lv.get<int>();
            if (v < 1 || v > 4)
                throw ConfigError("config: ad_levels entries must be 1..4");
            c.ad_levels.push_back(static_cast<AdLevel>(v));
        }
    }

    if (j.contains("eval")) {
        const auto& e = j.at("eval");
        c.eval.rci_only = e.value("real_ranges", "rci_eei") == std::string("rci_only");
        c.eval.auprc_thresholds = e.value("auprc_thresholds", std::size_t{200});
        if (e.contains("granularities")) {
            c.eval.granularities.clear();
            for (const auto& g : e.at("granularities")) {
                std::string name = g.get<std::string>();
                if (name == "global")
                    c.eval.granularities.push_back(Granularity::Global);
                else if (name == "app")
                    c.eval.granularities.push_back(Granularity::App);
                else if (name == "trace")
                    c.eval.granularities.push_back(Granularity::TraceLevel);
                else
                    throw ConfigError("config: unknown granularity '" + name + "'");
            }
        }
    }

    if (j.contains("explainer")) {
        const auto& e = j.at("explainer");
        std::string kind = e.value("kind", "exstream");
        if (kind == "none")
            c.explain.kind = ExplainerKind::None;
        else if (kind == "exstream")
            c.explain.kind = ExplainerKind::Exstream;
        else if (kind == "macrobase")
            c.explain.kind = ExplainerKind::Macrobase;
        else if (kind == "surrogate")
            c.explain.kind = ExplainerKind::Surrogate;
        else
            throw ConfigError("config: unknown explainer kind '" + kind + "'");
        auto& cfg = c.explain.config;
        cfg.exstream.correlation_cutoff = e.value("correlation_cutoff", 0.9);
        cfg.macrobase.bins = e.value("bins", std::size_t{10});
        cfg.macrobase.min_support = e.value("min_support", 0.5);
        cfg.macrobase.min_risk_ratio = e.value("min_risk_ratio", 3.0);
        cfg.macrobase.max_itemset_size = e.value("max_itemset_size", std::size_t{3});
        cfg.surrogate.k = e.value("k", std::size_t{5});
        cfg.surrogate.perturbation_count = e.value("perturbation_count", std::size_t{1000});
        cfg.surrogate.kernel_width = e.value("kernel_width", 0.75);
        c.explain.stability_samples = e.value("stability_samples", std::size_t{5});
        c.explain.combo = e.value("combo", std::string{});
    }

    if (j.contains("split")) {
        c.split_f0 = j.at("split").value("f0", 0.7);
        c.split_f1 = j.at("split").value("f1", 0.15);
        c.split_f2 = j.at("split").value("f2", 0.15);
    }
    c.output_dir = j.value("output_dir", std::string{"run_out"});
    c.seed = j.value("seed", std::uint64_t{1});
    c.workers = j.value("workers", std::size_t{1});
    return c;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("config '" + path.string() + "': " + e.what());
    }
    try {
        return run_config_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config '" + path.string() + "': " + e.what());
    }
}

} // namespace adex
