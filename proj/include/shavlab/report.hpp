#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace shavlab {

// Shared configuration for a verification run.
struct RunConfig {
    std::uint64_t seed = 42;
    unsigned workers = 0;  // 0 means hardware default
    double tolerance_scale = 1.0;
    std::map<std::string, std::string> params;
    std::filesystem::path out_dir;

    unsigned effective_workers() const;

    // Named parameter lookup with defaults ("--param name=value" on the CLI).
    long long get_int(const std::string& name, long long fallback) const;
    double get_double(const std::string& name, double fallback) const;
    std::string get_string(const std::string& name,
                           const std::string& fallback) const;

    // Agreement-type tolerances scale with --tolerance-scale; hard bounds
    // from the verified statements do not.
    double tol(double base) const { return base * tolerance_scale; }
};

struct CheckResult {
    std::string id;
    bool pass = false;
    nlohmann::ordered_json data;
};

// Collects check outcomes and side tables, then writes a deterministic
// report: one JSON object per line, sorted by check id, no timestamps.
class Reporter {
public:
    void add(const std::string& id, bool pass, nlohmann::ordered_json data);

    // Convenience for checks that assert a named error is raised.
    template <class Exc, class Fn>
    void expect_error(const std::string& id, Fn&& fn) {
        bool threw = false;
        std::string message;
        try {
            fn();
        } catch (const Exc& e) {
            threw = true;
            message = e.what();
        }
        add(id, threw,
            {{"expected_error", true}, {"raised", threw}, {"message", message}});
    }

    // A side table written as <name>.csv next to the JSON report.
    void add_table(const std::string& name,
                   const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows);

    std::size_t failures() const;
    std::size_t size() const { return results_.size(); }
    const std::vector<CheckResult>& results() const { return results_; }

    // Writes checks.jsonl plus all side tables into out_dir. Returns the
    // number of failing checks.
    std::size_t write(const std::filesystem::path& out_dir) const;

    // Prints "pass nnn fail nnn" style summary lines to stdout.
    void print_summary() const;

private:
    struct Table {
        std::string name;
        std::vector<std::string> header;
        std::vector<std::vector<std::string>> rows;
    };

    mutable std::mutex mu_;
    std::vector<CheckResult> results_;
    std::vector<Table> tables_;
};

// Formats doubles for CSV cells (shortest round-trip form).
std::string csv_num(double v);

}  // namespace shavlab
