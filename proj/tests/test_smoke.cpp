#include <doctest.h>

#include <chrono>
#include <iostream>

#include "etl/runner.hpp"
#include "etl/suite.hpp"

TEST_CASE("smoke suite passes within 60 seconds") {
    const auto start = std::chrono::steady_clock::now();
    const int code = etl::run_suite("smoke", ETL_TEST_TMP, [](const std::string& line) { std::cout << line << "\n"; });
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(code == etl::kExitPass);
    CHECK(seconds < 60.0);
}
