// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
#include <cstdio>
#include <exception>

#include "etl/suite.hpp"

int main() {
    int failed = 0;
    for (const auto& c : etl::suite_criteria("acceptance")) {
        etl::CriterionResult r;
        try {
            r = c.run();
        } catch (const std::exception& e) {
            r = {c.id, c.title, false, std::string("exception: ") + e.what(), 0.0};
        }
        std::printf("%s\n", etl::format_result(r).c_str());
        std::fflush(stdout);
        if (!r.pass) ++failed;
    }
    std::printf("%d criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
