#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "adex/csv_io.hpp"
#include "adex/error.hpp"
#include "adex/pipeline.hpp"
#include "adex/types.hpp"

namespace adex {

struct ReportSummary {
    std::vector<std::filesystem::path> csv_files;
    std::vector<std::filesystem::path> curve_files;
    std::vector<std::string> notices;
};

namespace detail {

inline std::string num_or_na(const json& v) {
    return v.is_null() ? "na" : format_double(v.get<double>());
}

} // namespace detail

/// Turn a run directory's reports into flat CSV tables plus plot-ready
/// precision/recall-curve data files under <run>/report/.
inline ReportSummary emit_report(const std::filesystem::path& run_dir) {
    namespace fs = std::filesystem;
    fs::path ad_path = run_dir / "ad_report.json";
    if (!fs::exists(ad_path))
        throw IoError("report: missing ad_report.json in '" + run_dir.string() + "'");
    json ad = detail::read_json(ad_path);

    fs::path report_dir = run_dir / "report";
    fs::create_directories(report_dir);
    ReportSummary summary;

    // --- AD per-level precision/recall/F per combo + median row ---
    {
        std::ostringstream out;
        out << "combo";
        for (const auto& lv : ad.at("levels_order"))
            out << "," << lv.get<std::string>() << "_precision,"
                << lv.get<std::string>() << "_recall," << lv.get<std::string>() << "_f";
        out << "\n";
        auto emit_row = [&](const std::string& name, const json& levels) {
            out << name;
            for (const auto& lv : ad.at("levels_order")) {
                const auto& p = levels.at(lv.get<std::string>());
                out << "," << detail::format_double(p.at("precision").get<double>()) << ","
                    << detail::format_double(p.at("recall").get<double>()) << ","
                    << detail::format_double(p.at("f_score").get<double>());
            }
            out << "\n";
        };
        for (const auto& combo : ad.at("combos"))
            emit_row(combo.at("name").get<std::string>(), combo.at("levels"));
        emit_row("median", ad.at("median").at("levels"));
        fs::path path = report_dir / "ad_levels.csv";
        detail::write_atomic(path, out.str());
        summary.csv_files.push_back(path);
    }

    // --- Per-type recall (median over combos), T1..T6 columns ---
    {
        std::ostringstream out;
        out << "level";
        for (int i = 1; i <= kAnomalyTypeCount; ++i)
            out << ",T" << i;
        out << ",auprc_global,auprc_app,auprc_trace\n";
        const json& median_types = ad.at("median").at("type_recall");
        for (const auto& lv : ad.at("levels_order")) {
            std::string level = lv.get<std::string>();
            out << level;
            for (int i = 1; i <= kAnomalyTypeCount; ++i) {
                std::string type = "T" + std::to_string(i);
                if (median_types.contains(level) && median_types.at(level).contains(type))
                    out << "," << detail::format_double(
                                      median_types.at(level).at(type).get<double>());
                else
                    out << ",na";
            }
            const json& auprc = ad.at("auprc").at(level);
            for (const char* g : {"global", "app", "trace"})
                out << ","
                    << (auprc.contains(g) ? detail::num_or_na(auprc.at(g)) : std::string("na"));
            out << "\n";
        }
        fs::path path = report_dir / "ad_type_recall.csv";
        detail::write_atomic(path, out.str());
        summary.csv_files.push_back(path);
    }

    // --- PR curve data files ---
    for (const auto& [level, points] : ad.at("curves").items()) {
        std::ostringstream out;
        out << "recall precision threshold\n";
        for (const auto& p : points)
            out << detail::format_double(p.at(0).get<double>()) << " "
                << detail::format_double(p.at(1).get<double>()) << " "
                // Sentinel thresholds (+-inf) serialize as JSON null.
                << detail::num_or_na(p.at(2)) << "\n";
        fs::path path = report_dir / ("pr_curve_" + level + ".dat");
        detail::write_atomic(path, out.str());
        summary.curve_files.push_back(path);
    }

    // --- ED table (per-type rows + average), joined with timing ---
    fs::path ed_path = run_dir / "ed_report.json";
    if (!fs::exists(ed_path)) {
        summary.notices.push_back("ed_report.json absent; ED table skipped");
        return summary;
    }
    json ed = detail::read_json(ed_path);
    json ed_meta;
    if (fs::exists(run_dir / "ed_meta.json"))
        ed_meta = detail::read_json(run_dir / "ed_meta.json");

    {
        std::ostringstream out;
        out << "type,instances,concise_ed1,concise_ed2,consistency_ed1,consistency_ed2,"
               "norm_cons_ed1,norm_cons_ed2,prec_ed1,rec_ed1,prec_ed2,rec_ed2,time_seconds\n";
        auto emit_row = [&](const std::string& label, const json& row) {
            out << label << "," << row.at("instances").get<std::size_t>() << ","
                << detail::format_double(row.at("conciseness_ed1").get<double>()) << ","
                << detail::num_or_na(row.at("conciseness_ed2")) << ","
                << detail::num_or_na(row.at("consistency_ed1")) << ","
                << detail::num_or_na(row.at("consistency_ed2")) << ","
                << detail::num_or_na(row.at("normalized_consistency_ed1")) << ","
                << detail::num_or_na(row.at("normalized_consistency_ed2")) << ","
                << detail::num_or_na(row.at("precision_ed1")) << ","
                << detail::num_or_na(row.at("recall_ed1")) << ","
                << detail::num_or_na(row.at("precision_ed2")) << ","
                << detail::num_or_na(row.at("recall_ed2")) << ",";
            std::string type_key = label;
            if (!ed_meta.is_null() && ed_meta.contains("per_type_seconds") &&
                ed_meta.at("per_type_seconds").contains(type_key))
                out << detail::format_double(
                    ed_meta.at("per_type_seconds").at(type_key).get<double>());
            else if (!ed_meta.is_null() && label == "average" &&
                     ed_meta.contains("P3_mean_seconds"))
                out << detail::format_double(ed_meta.at("P3_mean_seconds").get<double>());
            else
                out << "na";
            out << "\n";
        };
        for (const auto& row : ed.at("rows"))
            emit_row(row.at("type").get<std::string>(), row);
        emit_row("average", ed.at("average"));
        fs::path path = report_dir / "ed_table.csv";
        detail::write_atomic(path, out.str());
        summary.csv_files.push_back(path);
    }
    return summary;
}

} // namespace adex
