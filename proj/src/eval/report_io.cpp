#include "bdiplay/evaluation.hpp"

#include <cstdio>
#include <cstdlib>
#include <ostream>

namespace bdiplay::eval {

namespace {

// Shortest form that reads back to the same double.
std::string num(double v) {
    char buf[32];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

std::string stats(const SimilarityReport& r) {
    std::string s = std::to_string(r.values.size());
    for (double v : {r.mean, r.min, r.q1, r.median, r.q3, r.max}) s += "," + num(v);
    return s;
}

const char* kStatsHeader = "n,mean,min,q1,median,q3,max";

nlohmann::json bits_json(const profile::BinaryProfile& b) {
    return {{"f", int(b.f)}, {"gE", int(b.gE)}, {"pE", int(b.pE)}, {"p", int(b.p)}};
}

profile::BinaryProfile bits_from_json(const nlohmann::json& j) {
    return {j.at("f").get<int>() != 0, j.at("gE").get<int>() != 0, j.at("pE").get<int>() != 0,
            j.at("p").get<int>() != 0};
}

nlohmann::json report_body(const SimilarityReport& r) {
    return {{"values", r.values}, {"mean", r.mean},     {"min", r.min}, {"q1", r.q1},
            {"median", r.median}, {"q3", r.q3},         {"max", r.max}};
}

SimilarityReport report_body_from(const nlohmann::json& j) {
    SimilarityReport r;
    r.values = j.at("values").get<std::vector<double>>();
    r.mean = j.at("mean").get<double>();
    r.min = j.at("min").get<double>();
    r.q1 = j.at("q1").get<double>();
    r.median = j.at("median").get<double>();
    r.q3 = j.at("q3").get<double>();
    r.max = j.at("max").get<double>();
    return r;
}

void check_schema(const nlohmann::json& j, std::string_view kind) {
    if (j.at("schema_version").get<int>() != kSchemaVersion)
        throw std::invalid_argument("unsupported schema_version " + j.at("schema_version").dump());
    if (j.at("kind").get<std::string>() != kind)
        throw std::invalid_argument("expected a " + std::string(kind) + " document");
}

}  // namespace

void write_csv(std::ostream& out, const SimilarityReport& r) {
    out << "run,jaccard\n";
    for (std::size_t i = 0; i < r.values.size(); ++i) out << i << ',' << num(r.values[i]) << '\n';
}

void write_csv(std::ostream& out, const GridSearchResult& r) {
    out << "f,gE,pE,p," << kStatsHeader << ",values\n";
    for (const auto& [bp, rep] : r.reports) {
        out << bp.f << ',' << bp.gE << ',' << bp.pE << ',' << bp.p << ',' << stats(rep) << ',';
        for (std::size_t i = 0; i < rep.values.size(); ++i) out << (i ? ";" : "") << num(rep.values[i]);
        out << '\n';
    }
}

void write_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
    out << "session_id,reported,best,reported_equals_best";
    for (const char* prefix : {"reported_", "best_", "uninformed_"})
        for (const char* col : {"n", "mean", "min", "q1", "median", "q3", "max"}) out << ',' << prefix << col;
    out << '\n';
    for (const auto& row : rows) {
        out << row.session_id << ',' << profile::binarize(row.reported_profile).bits() << ',' << row.best_profile.bits()
            << ',' << (row.reported_equals_best ? 1 : 0) << ',' << stats(row.reported) << ',' << stats(row.best) << ','
            << stats(row.uninformed) << '\n';
    }
}

nlohmann::json to_json(const SimilarityReport& r) {
    auto j = report_body(r);
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "similarity";
    return j;
}

nlohmann::json to_json(const GridSearchResult& r) {
    nlohmann::json j{{"schema_version", kSchemaVersion}, {"kind", "grid_search"}};
    j["best_profile"] = bits_json(r.best_profile);
    j["best_mean"] = r.best_mean;
    auto& reports = j["reports"] = nlohmann::json::array();
    for (const auto& [bp, rep] : r.reports) reports.push_back({{"profile", bits_json(bp)}, {"report", report_body(rep)}});
    return j;
}

nlohmann::json to_json(const std::vector<ComparisonRow>& rows) {
    nlohmann::json j{{"schema_version", kSchemaVersion}, {"kind", "comparison"}};
    auto& arr = j["rows"] = nlohmann::json::array();
    for (const auto& row : rows) {
        arr.push_back({{"session_id", row.session_id},
                       {"reported_profile", bdiplay::to_json(row.reported_profile)},
                       {"reported", report_body(row.reported)},
                       {"best_profile", bits_json(row.best_profile)},
                       {"best", report_body(row.best)},
                       {"uninformed", report_body(row.uninformed)},
                       {"reported_equals_best", row.reported_equals_best}});
    }
    return j;
}

SimilarityReport report_from_json(const nlohmann::json& j) {
    check_schema(j, "similarity");
    return report_body_from(j);
}

GridSearchResult grid_from_json(const nlohmann::json& j) {
    check_schema(j, "grid_search");
    GridSearchResult r;
    r.best_profile = bits_from_json(j.at("best_profile"));
    r.best_mean = j.at("best_mean").get<double>();
    for (const auto& e : j.at("reports")) r.reports[bits_from_json(e.at("profile"))] = report_body_from(e.at("report"));
    return r;
}

std::vector<ComparisonRow> comparison_from_json(const nlohmann::json& j) {
    check_schema(j, "comparison");
    std::vector<ComparisonRow> rows;
    for (const auto& e : j.at("rows")) {
        ComparisonRow row;
        row.session_id = e.at("session_id").get<std::string>();
        row.reported_profile = profile_from_json(e.at("reported_profile"));
        row.reported = report_body_from(e.at("reported"));
        row.best_profile = bits_from_json(e.at("best_profile"));
        row.best = report_body_from(e.at("best"));
        row.uninformed = report_body_from(e.at("uninformed"));
        row.reported_equals_best = e.at("reported_equals_best").get<bool>();
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace bdiplay::eval
