// Runs the acceptance criteria and prints one PASS/FAIL line each.
// Exit status 0 only when every selected criterion passes.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "jmgt/acceptance.hpp"

int main(int argc, char** argv) {
    CLI::App app{"jmgt acceptance suite"};
    std::string criteria = "all", json_path;
    jmgt::AcceptanceOptions opt;
    app.add_option("--criteria", criteria, "comma-separated ids or all");
    app.add_option("--cli", opt.cli, "jmgt executable for the determinism criterion");
    app.add_option("--json", json_path, "write the results here");
    app.add_option("--seed", opt.seed, "random seed");
    CLI11_PARSE(app, argc, argv);

    std::vector<int> ids;
    if (criteria == "all") {
        for (int i = 1; i <= jmgt::kCriterionCount; ++i) ids.push_back(i);
    } else {
        std::stringstream ss(criteria);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                const int id = std::stoi(tok);
                if (id < 1 || id > jmgt::kCriterionCount) throw std::out_of_range(tok);
                ids.push_back(id);
            } catch (const std::exception&) {
                std::fprintf(stderr, "bad criterion id '%s'\n", tok.c_str());
                return 2;
            }
        }
    }

    int failed = 0;
    nlohmann::json out = nlohmann::json::array();
    for (int id : ids) {
        const auto r = jmgt::run_criterion(id, opt);
        std::printf("%s\n", jmgt::format_result_line(r).c_str());
        std::fflush(stdout);
        failed += !r.passed;
        nlohmann::json m = nlohmann::json::object();
        for (const auto& [k, v] : r.metrics) m[k] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
        out.push_back({{"id", r.id},
                       {"title", r.title},
                       {"passed", r.passed},
                       {"seconds", r.seconds},
                       {"budget_seconds", r.budget_seconds},
                       {"detail", r.detail},
                       {"metrics", m}});
    }
    std::printf("%zu/%zu criteria passed\n", ids.size() - failed, ids.size());
    if (!json_path.empty()) {
        std::ofstream f(json_path);
        f << out.dump(2) << '\n';
    }
    return failed ? 1 : 0;
}
