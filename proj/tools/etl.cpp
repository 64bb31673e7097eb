#include <iostream>

#include <CLI11.hpp>

#include "etl/config.hpp"
#include "etl/parallel.hpp"
#include "etl/runner.hpp"
#include "etl/suite.hpp"

int main(int argc, char** argv) {
    CLI::App app{"etl: numerical checks for ergodic averaging limits"};
    app.require_subcommand(1);

    std::string config_path;
    std::size_t workers = 0;
    std::string out_dir;
    auto* run = app.add_subcommand("run", "Run one experiment from a JSON config");
    run->add_option("config", config_path, "Experiment config (JSON)")->required();
    run->add_option("--workers", workers, "Worker threads (0 = all cores)");
    run->add_option("--out", out_dir, "Output directory for report.json and series.csv");

    std::string suite_name;
    std::string suite_out = ".";
    std::size_t suite_workers = 0;
    auto* suite = app.add_subcommand("suite", "Run a built-in suite: acceptance or smoke");
    suite->add_option("name", suite_name, "Suite name")->required();
    suite->add_option("--out", suite_out, "Directory for suite_report.json");
    suite->add_option("--workers", suite_workers, "Worker threads (0 = all cores)");

    auto* schema = app.add_subcommand("schema", "Print the experiment config schema");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : etl::kExitSchema;
    }

    if (*schema) {
        std::cout << etl::config::schema().dump(2) << "\n";
        return 0;
    }
    if (*suite) {
        etl::set_workers(suite_workers);
        return etl::run_suite(suite_name, suite_out, [](const std::string& line) { std::cout << line << std::endl; });
    }

    etl::RunOptions opts;
    opts.workers = workers;
    if (!out_dir.empty()) opts.out_dir = out_dir;
    const auto res = etl::run_file(config_path, opts);
    if (!res.error.empty()) std::cerr << "etl: " << res.error << "\n";
    std::cout << "verdict: " << etl::to_string(res.verdict);
    if (res.report.contains("reason") && !res.report["reason"].get<std::string>().empty())
        std::cout << " (" << res.report["reason"].get<std::string>() << ")";
    std::cout << "\n";
    return res.exit_code;
}
