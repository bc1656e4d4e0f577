#pragma once
// Report plumbing for the CLI: a common JSON envelope, deterministic
// serialization to disk, and a small structural validator for the shipped
// schema file (a subset of JSON Schema: type, properties, required, items,
// enum, additionalProperties).

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "electorate/stats.hpp"

namespace electorate::report {

using json = nlohmann::json;

// {"version": 1, "subcommand": ..., "seed": ..., "inputs": ..., "results": ...}
// Nothing time-dependent goes inside, so reruns with identical inputs and
// seed serialize byte-identically.
json envelope(const std::string& subcommand, std::uint64_t seed, json inputs, json results);

json to_json(const stats::ZTestResult& r, const std::string& cohort_before,
             const std::string& cohort_after);
json to_json(const stats::GenderComposition& c, std::uint64_t cohort_size);

// Writes report.json (2-space indent, trailing newline) into `dir`.
void write_json(const json& report, const std::filesystem::path& dir);
// Writes report.txt with the given content.
void write_text(const std::string& text, const std::filesystem::path& dir);

// Aligned text table; first row is the header.
std::string format_table(const std::vector<std::vector<std::string>>& rows);

// Validates `value` against the schema under `reports/<subcommand>` in the
// shipped schema document. Returns an error description or nullopt on
// success.
std::optional<std::string> validate_report(const json& report, const json& schema_doc);

// Subset-of-JSON-Schema structural check.
std::optional<std::string> validate_schema(const json& value, const json& schema,
                                           const std::string& path = "$");

}  // namespace electorate::report
