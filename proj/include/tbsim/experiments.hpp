#pragma once

// Experiment registry, run configuration and report/CSV output.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace tbsim::experiments {

using Json = nlohmann::json;

enum class ParamKind { Real, Integer, String };

struct ParamSpec {
    std::string name;
    ParamKind kind = ParamKind::Real;
    Json default_value;
    std::string description;
    double min = -1e300;  // numeric bounds, inclusive
    double max = 1e300;
    std::vector<std::string> choices;  // String params: allowed values, empty = any
};

using Cell = std::variant<std::int64_t, std::uint64_t, double, std::string>;

struct CsvTable {
    std::string file;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

struct ExperimentOutput {
    Json summary = Json::object();
    std::vector<CsvTable> tables;
    /// How the master seed is split into per-sample streams.
    std::string seed_scheme;
};

/// Parameters after defaults and validation.
class Params {
public:
    explicit Params(Json values) : values_(std::move(values)) {}

    double real(const std::string& name) const;
    std::int64_t integer(const std::string& name) const;
    std::string string(const std::string& name) const;
    const Json& json() const noexcept { return values_; }

private:
    Json values_;
};

struct Experiment {
    std::string name;
    std::string description;
    std::vector<ParamSpec> params;
    /// Output files and their fixed column order.
    std::vector<std::pair<std::string, std::vector<std::string>>> csv_schema;
    std::function<ExperimentOutput(const Params&, std::uint64_t seed)> run;
};

/// Every experiment, sorted by name.
const std::vector<Experiment>& registry();
const Experiment& find(const std::string& name);

struct ExperimentConfig {
    std::string experiment;
    Json params = Json::object();  // validated, defaults filled in
    std::uint64_t seed = 0;
    unsigned threads = 0;  // 0 = auto
    std::string output_dir = "tbsim_out";

    /// Flat document: experiment, seed, threads, output_dir and the
    /// experiment's own parameters. Anything else is a Config error.
    static ExperimentConfig from_json(const Json& doc);
    Json to_json() const;
};

struct RunReport {
    Json report;  // what goes into report.json
    std::vector<CsvTable> tables;
};

/// Runs without touching the filesystem.
RunReport execute(const ExperimentConfig& cfg);

/// Runs and writes report.json plus the CSV tables into cfg.output_dir.
RunReport run(const ExperimentConfig& cfg);

void write_csv(std::ostream& out, const CsvTable& table);
std::string format_double(double v);

/// Human-readable registry listing.
void list(std::ostream& out);

std::string tool_version();

}  // namespace tbsim::experiments
