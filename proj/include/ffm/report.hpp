#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace ffm {

/// One verification row. `anchor` names the statement being checked and
/// must be listed in anchor_registry().
struct CheckRow {
    std::string suite;
    std::string check;
    std::string anchor;
    std::string subject;
    bool pass = false;
    double measured = 0;
    double reference = 0;
    std::string detail;
};

const std::vector<std::string>& anchor_registry();
bool anchor_known(std::string_view anchor);

/// Shortest round-tripping decimal; identical across runs and platforms.
std::string fmt(double x);

class CsvTable {
  public:
    explicit CsvTable(std::vector<std::string> header = {});
    void add(std::vector<std::string> row);
    const std::vector<std::string>& header() const noexcept { return header_; }
    std::size_t size() const noexcept { return rows_.size(); }
    std::string str() const;

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

struct SuiteResult {
    std::vector<CheckRow> checks;
    std::map<std::string, CsvTable> tables;      // file name -> rows
    std::map<std::string, double> measurements;  // fixture key -> value
    nlohmann::json json_files = nlohmann::json::object();  // file name -> document
    nlohmann::json metadata = nlohmann::json::object();

    bool all_pass() const;
    std::size_t failures() const;
    void append(SuiteResult&& other);
};

CsvTable checks_table(const std::vector<CheckRow>& rows);

/// Writes every table, every JSON document, checks.csv, and metadata.json
/// into `dir` (created if needed). Only metadata.json carries timestamps.
void write_outputs(const SuiteResult& r, const std::string& dir);

/// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

}  // namespace ffm
