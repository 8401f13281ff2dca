#include "shavlab/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "shavlab/errors.hpp"
#include "shavlab/parallel.hpp"

namespace shavlab {

unsigned RunConfig::effective_workers() const {
    return workers == 0 ? default_workers() : workers;
}

long long RunConfig::get_int(const std::string& name,
                             long long fallback) const {
    auto it = params.find(name);
    if (it == params.end()) return fallback;
    try {
        return std::stoll(it->second);
    } catch (const std::exception&) {
        throw ParseError("parameter '" + name + "' is not an integer: " +
                         it->second);
    }
}

double RunConfig::get_double(const std::string& name, double fallback) const {
    auto it = params.find(name);
    if (it == params.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw ParseError("parameter '" + name + "' is not a number: " +
                         it->second);
    }
}

std::string RunConfig::get_string(const std::string& name,
                                  const std::string& fallback) const {
    auto it = params.find(name);
    return it == params.end() ? fallback : it->second;
}

void Reporter::add(const std::string& id, bool pass,
                   nlohmann::ordered_json data) {
    std::lock_guard<std::mutex> lock(mu_);
    for (const auto& r : results_) {
        if (r.id == id)
            throw std::logic_error("duplicate check id: " + id);
    }
    results_.push_back({id, pass, std::move(data)});
}

void Reporter::add_table(const std::string& name,
                         const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows) {
    std::lock_guard<std::mutex> lock(mu_);
    tables_.push_back({name, header, rows});
}

std::size_t Reporter::failures() const {
    std::lock_guard<std::mutex> lock(mu_);
    std::size_t n = 0;
    for (const auto& r : results_)
        if (!r.pass) ++n;
    return n;
}

std::size_t Reporter::write(const std::filesystem::path& out_dir) const {
    std::lock_guard<std::mutex> lock(mu_);
    std::filesystem::create_directories(out_dir);

    std::vector<const CheckResult*> ordered;
    ordered.reserve(results_.size());
    for (const auto& r : results_) ordered.push_back(&r);
    std::sort(ordered.begin(), ordered.end(),
              [](const CheckResult* a, const CheckResult* b) {
                  return a->id < b->id;
              });

    {
        std::ofstream out(out_dir / "checks.jsonl", std::ios::binary);
        if (!out) throw Error("cannot write report in " + out_dir.string());
        for (const auto* r : ordered) {
            nlohmann::ordered_json line;
            line["check"] = r->id;
            line["pass"] = r->pass;
            line["data"] = r->data;
            out << line.dump() << "\n";
        }
    }

    auto tables = tables_;
    std::sort(tables.begin(), tables.end(),
              [](const Table& a, const Table& b) { return a.name < b.name; });
    for (const auto& t : tables) {
        std::ofstream out(out_dir / (t.name + ".csv"), std::ios::binary);
        if (!out) throw Error("cannot write table " + t.name);
        for (std::size_t i = 0; i < t.header.size(); ++i)
            out << (i ? "," : "") << t.header[i];
        out << "\n";
        for (const auto& row : t.rows) {
            for (std::size_t i = 0; i < row.size(); ++i)
                out << (i ? "," : "") << row[i];
            out << "\n";
        }
    }

    std::size_t n = 0;
    for (const auto& r : results_)
        if (!r.pass) ++n;
    return n;
}

void Reporter::print_summary() const {
    std::lock_guard<std::mutex> lock(mu_);
    std::size_t fail = 0;
    for (const auto& r : results_)
        if (!r.pass) ++fail;
    std::printf("checks: %zu  pass: %zu  fail: %zu\n", results_.size(),
                results_.size() - fail, fail);
    if (fail) {
        for (const auto& r : results_)
            if (!r.pass) std::printf("FAIL %s\n", r.id.c_str());
    }
}

std::string csv_num(double v) {
    // nlohmann's serializer already emits shortest-round-trip doubles; reuse
    // it so CSV and JSON agree byte for byte.
    return nlohmann::json(v).dump();
}

}  // namespace shavlab
