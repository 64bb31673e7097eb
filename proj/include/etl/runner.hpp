#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "etl/transfer.hpp"

namespace etl {

/// Process exit codes of the runner and the suites.
enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitInconclusive = 2, kExitSchema = 3 };

int exit_code_for(Verdict v);

struct SeriesRow {
    std::string series;
    std::int64_t t_index = -1;  // -1 when the row is not tied to a t-sample
    std::int64_t scale_index = 0;
    Vec window_lo;
    Vec window_hi;
    Complex estimate;
    double estimate_norm = 0.0;
    double residual = 0.0;
};

/// RFC 4180 CSV with the fixed columns series, t_index, scale_index,
/// window_lo_1.., window_hi_1.., estimate_re, estimate_im, estimate_norm,
/// residual. Doubles are printed with 17 significant digits.
std::string series_csv(const std::vector<SeriesRow>& rows);

struct RunOptions {
    std::size_t workers = 0;       // 0 keeps the current setting
    std::optional<std::string> out_dir;  // overrides output.dir
    bool write_files = true;
    bool honor_env_seed = true;    // ETL_SEED replaces the config seed
};

struct RunResult {
    int exit_code = kExitFail;
    Verdict verdict = Verdict::Fail;
    nlohmann::json report;  // also written as report.json
    std::vector<SeriesRow> series;
    std::string error;      // schema or evaluation error message
};

/// Validates, materializes defaults, runs the experiment and writes
/// report.json and series.csv. Never throws for bad configs or failing
/// samplers; those become exit codes 3 and 1.
RunResult run_experiment(const nlohmann::json& config, const RunOptions& opts = {});
RunResult run_file(const std::string& path, const RunOptions& opts = {});

}  // namespace etl
