#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace etl {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct Criterion {
    int id = 0;
    std::string title;
    std::function<CriterionResult()> run;
};

/// Built-in criteria. `smoke` selects downscaled variants.
std::vector<Criterion> suite_criteria(const std::string& name);
bool known_suite(const std::string& name);

/// "criterion  3 PASS   12.4s  title: detail".
std::string format_result(const CriterionResult& r);

/// The configs the suites run, exposed for tests and `etl` users.
nlohmann::json criterion_config(const std::string& suite, const std::string& key);

/// Runs a suite, prints one line per criterion to `log`, writes
/// suite_report.json into `out_dir` and returns the process exit code
/// (3 for an unknown suite, 1 when any criterion fails).
int run_suite(const std::string& name, const std::string& out_dir, const std::function<void(const std::string&)>& log);

}  // namespace etl
