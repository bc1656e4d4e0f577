#include "electorate/report.hpp"

#include <cmath>
#include <fstream>

namespace electorate::report {
namespace {

// NaN serializes as null; keep finite doubles as-is.
json num_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

bool type_matches(const json& value, const std::string& type) {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "number") return value.is_number();
    if (type == "integer") return value.is_number_integer() || value.is_number_unsigned();
    if (type == "boolean") return value.is_boolean();
    if (type == "null") return value.is_null();
    return false;
}

}  // namespace

json envelope(const std::string& subcommand, std::uint64_t seed, json inputs, json results) {
    json j;
    j["version"] = 1;
    j["subcommand"] = subcommand;
    j["seed"] = seed;
    j["inputs"] = std::move(inputs);
    j["results"] = std::move(results);
    return j;
}

json to_json(const stats::ZTestResult& r, const std::string& cohort_before,
             const std::string& cohort_after) {
    json j;
    j["z"] = num_or_null(r.z);
    j["p_value"] = num_or_null(r.p_value);
    j["p1"] = r.p1;
    j["p2"] = r.p2;
    j["pooled_p"] = r.pooled_p;
    j["n1"] = r.n1;
    j["n2"] = r.n2;
    j["tested_class"] = to_string(r.tested_class);
    j["degenerate"] = r.degenerate;
    j["cohort_before"] = cohort_before;
    j["cohort_after"] = cohort_after;
    return j;
}

json to_json(const stats::GenderComposition& c, std::uint64_t cohort_size) {
    json j;
    j["cohort"] = c.cohort;
    j["male"] = c.male_count;
    j["female"] = c.female_count;
    j["classified"] = c.total();
    j["cohort_size"] = cohort_size;
    return j;
}

void write_json(const json& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / "report.json", std::ios::trunc | std::ios::binary);
    if (!out) throw std::runtime_error("report: cannot open " + (dir / "report.json").string());
    out << report.dump(2) << "\n";
    if (!out) throw std::runtime_error("report: write failed in " + dir.string());
}

void write_text(const std::string& text, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / "report.txt", std::ios::trunc | std::ios::binary);
    if (!out) throw std::runtime_error("report: cannot open " + (dir / "report.txt").string());
    out << text;
    if (!out) throw std::runtime_error("report: write failed in " + dir.string());
}

std::string format_table(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths;
    for (const auto& row : rows) {
        if (widths.size() < row.size()) widths.resize(row.size(), 0);
        for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
    }
    std::string out;
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out += row[i];
            if (i + 1 < row.size()) out.append(widths[i] - row[i].size() + 2, ' ');
        }
        out += '\n';
    }
    return out;
}

std::optional<std::string> validate_schema(const json& value, const json& schema,
                                           const std::string& path) {
    if (schema.contains("type")) {
        const auto& t = schema["type"];
        bool ok = false;
        if (t.is_string()) {
            ok = type_matches(value, t.get<std::string>());
        } else if (t.is_array()) {
            for (const auto& alt : t)
                if (type_matches(value, alt.get<std::string>())) {
                    ok = true;
                    break;
                }
        }
        if (!ok) return path + ": expected type " + t.dump() + ", got " + value.type_name();
    }
    if (schema.contains("enum")) {
        bool ok = false;
        for (const auto& alt : schema["enum"])
            if (alt == value) {
                ok = true;
                break;
            }
        if (!ok) return path + ": value " + value.dump() + " not in enum";
    }
    if (value.is_object()) {
        if (schema.contains("required")) {
            for (const auto& key : schema["required"])
                if (!value.contains(key.get<std::string>()))
                    return path + ": missing required key '" + key.get<std::string>() + "'";
        }
        if (schema.contains("properties")) {
            for (const auto& [key, sub] : schema["properties"].items()) {
                if (!value.contains(key)) continue;
                if (auto err = validate_schema(value.at(key), sub, path + "." + key)) return err;
            }
            if (schema.value("additionalProperties", true) == false) {
                for (const auto& [key, ignored] : value.items())
                    if (!schema["properties"].contains(key))
                        return path + ": unexpected key '" + key + "'";
            }
        }
    }
    if (value.is_array() && schema.contains("items")) {
        std::size_t i = 0;
        for (const auto& item : value) {
            if (auto err = validate_schema(item, schema["items"], path + "[" + std::to_string(i) + "]"))
                return err;
            ++i;
        }
    }
    return std::nullopt;
}

std::optional<std::string> validate_report(const json& report, const json& schema_doc) {
    if (!report.contains("subcommand") || !report["subcommand"].is_string())
        return "$: missing 'subcommand'";
    const std::string sub = report["subcommand"].get<std::string>();
    if (!schema_doc.contains("reports") || !schema_doc["reports"].contains(sub))
        return "$: no schema for subcommand '" + sub + "'";
    if (schema_doc.contains("envelope"))
        if (auto err = validate_schema(report, schema_doc["envelope"])) return err;
    return validate_schema(report["results"], schema_doc["reports"][sub], "$.results");
}

}  // namespace electorate::report
