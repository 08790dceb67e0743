#include "ffm/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace ffm {

const std::vector<std::string>& anchor_registry() {
    static const std::vector<std::string> anchors{
        "prime-count",          "prime-count-error",    "modulus-factorization", "unit-group-bijection",
        "totient",              "primitive-count",      "orthogonality",         "multiplicativity",
        "conjugate-closure",    "lpoly-degree",         "rh-roots",              "conjugation-symmetry",
        "pointwise-log-bound",  "simplified-log-bound", "single-value-bound",    "shifted-log-bound",
        "shifted-moment-zeta",  "shifted-moment-min",   "crude-moment",          "charsum-identity",
        "charsum-moment",       "integral-moment",      "perron-identity",       "mertens-log",
        "mertens-recip",        "mertens-cos",          "F-sum",                 "prime-power-tail",
        "self-test",
    };
    return anchors;
}

bool anchor_known(std::string_view anchor) {
    const auto& a = anchor_registry();
    return std::find(a.begin(), a.end(), anchor) != a.end();
}

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add(std::vector<std::string> row) {
    if (row.size() != header_.size()) throw std::logic_error("CSV row width does not match header");
    rows_.push_back(std::move(row));
}

namespace {

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

void put_row(std::string& out, const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        out += quote(row[i]);
    }
    out += '\n';
}

}  // namespace

std::string CsvTable::str() const {
    std::string out;
    put_row(out, header_);
    for (const auto& r : rows_) put_row(out, r);
    return out;
}

bool SuiteResult::all_pass() const { return failures() == 0; }

std::size_t SuiteResult::failures() const {
    return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const CheckRow& r) { return !r.pass; }));
}

void SuiteResult::append(SuiteResult&& other) {
    checks.insert(checks.end(), std::make_move_iterator(other.checks.begin()), std::make_move_iterator(other.checks.end()));
    for (auto& [k, v] : other.tables) tables.insert_or_assign(k, std::move(v));
    for (auto& [k, v] : other.measurements) measurements[k] = v;
    for (auto& [k, v] : other.json_files.items()) json_files[k] = std::move(v);
    for (auto& [k, v] : other.metadata.items()) metadata[k] = std::move(v);
}

CsvTable checks_table(const std::vector<CheckRow>& rows) {
    CsvTable t({"suite", "check", "anchor", "subject", "pass", "measured", "reference", "detail"});
    for (const auto& r : rows) {
        t.add({r.suite, r.check, r.anchor, r.subject, r.pass ? "1" : "0", fmt(r.measured), fmt(r.reference), r.detail});
    }
    return t;
}

void write_outputs(const SuiteResult& r, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto write = [&](const std::string& name, const std::string& text) {
        std::ofstream out(fs::path(dir) / name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
        out << text;
    };
    for (const auto& [name, table] : r.tables) write(name, table.str());
    for (const auto& [name, doc] : r.json_files.items()) write(name, doc.dump(2) + "\n");
    write("checks.csv", checks_table(r.checks).str());
    write("metadata.json", r.metadata.dump(2) + "\n");
}

std::string fnv1a_hex(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    return out;
}

}  // namespace ffm
