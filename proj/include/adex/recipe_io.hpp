#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "adex/csv_io.hpp"
#include "adex/datagen.hpp"
#include "adex/error.hpp"

namespace adex {
namespace datagen {

inline GeneratorConfig generator_config_from_json(const nlohmann::json& j) {
    GeneratorConfig config;
    config.duration_seconds = j.value("duration_seconds", config.duration_seconds);
    config.base_input_rate = j.value("base_input_rate", config.base_input_rate);
    config.batch_interval = j.value("batch_interval", config.batch_interval);
    config.node_count = j.value("node_count", config.node_count);
    config.noise_sigma = j.value("noise_sigma", config.noise_sigma);
    config.seed = j.value("seed", config.seed);
    config.validate();
    return config;
}

inline DatasetRecipe recipe_from_json(const nlohmann::json& j) {
    DatasetRecipe recipe;
    if (j.contains("config"))
        recipe.config = generator_config_from_json(j.at("config"));
    if (!j.contains("traces") || !j.at("traces").is_array())
        throw FormatError("recipe: missing 'traces' array");
    for (const auto& jt : j.at("traces")) {
        TraceRecipe tr;
        tr.trace_id = jt.at("trace_id").get<std::string>();
        tr.app_id = jt.value("app_id", 1);
        if (jt.contains("seed"))
            tr.seed = jt.at("seed").get<std::uint64_t>();
        for (const auto& ji : jt.value("injections", nlohmann::json::array())) {
            InjectionSpec spec;
            spec.anomaly_type = anomaly_type_from_string(ji.at("type").get<std::string>());
            spec.start_second = ji.at("start_second").get<std::int64_t>();
            spec.duration_seconds = ji.value("duration_seconds", std::int64_t{0});
            spec.magnitude = ji.value("magnitude", 2.0);
            tr.injections.push_back(spec);
        }
        recipe.traces.push_back(std::move(tr));
    }
    return recipe;
}

inline DatasetRecipe read_recipe(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open recipe '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("recipe '" + path.string() + "': " + e.what());
    }
    try {
        return recipe_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("recipe '" + path.string() + "': " + e.what());
    }
}

/// Build the recipe's dataset and write one trace CSV per trace plus
/// ground_truth.csv. Everything is simulated (and so validated) before the
/// first file is written.
inline DatasetSummary generate_dataset(const DatasetRecipe& recipe,
                                       const std::filesystem::path& out_dir) {
    auto [traces, truth] = build_dataset(recipe);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw IoError("cannot create output directory '" + out_dir.string() + "'");

    DatasetSummary summary;
    summary.trace_count = traces.size();
    for (const auto& trace : traces)
        write_trace(trace, out_dir / (trace.trace_id + ".csv"));
    write_ground_truth(truth, out_dir / "ground_truth.csv");

    std::map<std::string, bool> disturbed;
    for (const auto& e : truth) {
        ++summary.anomaly_counts[e.anomaly_type];
        disturbed[e.trace_id] = true;
    }
    summary.disturbed_count = disturbed.size();
    return summary;
}

} // namespace datagen
} // namespace adex
