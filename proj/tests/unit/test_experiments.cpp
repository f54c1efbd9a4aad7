#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sys/wait.h>

#include "jmgt/errors.hpp"
#include "jmgt/experiments.hpp"

using namespace jmgt;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("jmgt_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string field_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "";
}

#ifdef JMGT_CLI
int run_cli(const std::string& args, const fs::path& err = {}) {
    std::string cmd = std::string(JMGT_CLI) + " " + args + " > /dev/null";
    cmd += err.empty() ? " 2>/dev/null" : " 2>" + err.string();
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}
#endif

}  // namespace

TEST_CASE("scenario names") {
    for (auto s : all_scenarios()) CHECK(scenario_from_name(scenario_name(s)) == s);
    CHECK(all_scenarios().size() == 11);
    CHECK(field_of([] { scenario_from_name("plot"); }) == "scenario");
    CHECK(std::string(scenario_name(Scenario::linear_decay)) == "linear-decay");
}

TEST_CASE("option tables are sorted and typed") {
    for (auto s : all_scenarios()) {
        const auto opts = scenario_options(s);
        for (std::size_t i = 1; i < opts.size(); ++i) CHECK(opts[i - 1].key < opts[i].key);
    }
    const auto cfg = resolve_config(Scenario::roots, nullptr, {});
    CHECK(cfg.number("tau") == 1.0);
    CHECK(cfg.text("sweep") == "0.001:1000:200");
    CHECK(cfg.output_dir == "out/roots");
}

TEST_CASE("configuration precedence") {
    unsetenv("JMGT_OUTPUT_DIR");
    unsetenv("JMGT_THREADS");
    const nlohmann::json file = {{"scenario", "simulate"}, {"N", 64}, {"amplitude", 0.01}, {"output", "from_file"}};
    auto cfg = resolve_config(Scenario::simulate, file, {});
    CHECK(cfg.integer("N") == 64);
    CHECK(cfg.number("amplitude") == 0.01);
    CHECK(cfg.output_dir == "from_file");

    cfg = resolve_config(Scenario::simulate, file, {{"N", "32"}});
    CHECK(cfg.integer("N") == 32);
    CHECK(cfg.number("amplitude") == 0.01);

    setenv("JMGT_OUTPUT_DIR", "from_env", 1);
    setenv("JMGT_THREADS", "3", 1);
    cfg = resolve_config(Scenario::simulate, file, {});
    CHECK(cfg.output_dir == "from_env");
    CHECK(cfg.threads == 3);
    cfg = resolve_config(Scenario::simulate, file, {{"output", "from_flag"}, {"threads", "1"}});
    CHECK(cfg.output_dir == "from_flag");
    CHECK(cfg.threads == 1);
    setenv("JMGT_THREADS", "many", 1);
    CHECK(field_of([&] { resolve_config(Scenario::simulate, file, {}); }) == "JMGT_THREADS");
    unsetenv("JMGT_OUTPUT_DIR");
    unsetenv("JMGT_THREADS");
}

TEST_CASE("configuration errors name the key") {
    CHECK(field_of([] { resolve_config(Scenario::roots, {{"bogus", 1}}, {}); }) == "bogus");
    CHECK(field_of([] { resolve_config(Scenario::roots, nullptr, {{"bogus", "1"}}); }) == "bogus");
    CHECK(field_of([] { resolve_config(Scenario::roots, nullptr, {{"N", "abc"}}); }) == "N");
    CHECK(field_of([] { resolve_config(Scenario::roots, {{"tau", "x"}}, {}); }) == "tau");
    CHECK(field_of([] { resolve_config(Scenario::roots, {{"scenario", "kernels"}}, {}); }) == "scenario");
    CHECK(field_of([] { resolve_config(Scenario::roots, nlohmann::json::array(), {}); }) == "config");
    CHECK(field_of([] { load_config_file("/nonexistent.json"); }) == "config");
}

TEST_CASE("config hash") {
    const auto a = resolve_config(Scenario::roots, nullptr, {});
    const auto b = resolve_config(Scenario::roots, nullptr, {{"tau", "2"}});
    CHECK(config_hash(a.values) == config_hash(resolve_config(Scenario::roots, nullptr, {}).values));
    CHECK(config_hash(a.values) != config_hash(b.values));
    CHECK(config_hash(a.values).size() == 16);
}

TEST_CASE("roots run writes the documented artifacts and is deterministic") {
    const auto d1 = scratch("roots1"), d2 = scratch("roots2");
    auto cfg = resolve_config(Scenario::roots, nullptr, {{"sweep", "0.01:100:50"}});
    cfg.output_dir = d1.string();
    const auto r = run_experiment(cfg);
    CHECK(r.exit_code == kExitOk);
    CHECK(r.results.at("rows") == 50);
    CHECK(r.results.at("N0").get<double>() == doctest::Approx(0.536621055628028));
    for (auto f : {"roots.csv", "manifest.json", "run_info.json"}) CHECK(fs::exists(d1 / f));

    std::ifstream csv(d1 / "roots.csv");
    std::string header, line;
    std::getline(csv, header);
    CHECK(header.rfind("xi,eta,symbol,mu1", 0) == 0);
    int rows = 0;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 50);

    const auto m = nlohmann::json::parse(slurp(d1 / "manifest.json"));
    CHECK(m.at("scenario") == "roots");
    CHECK(m.at("config_hash") == config_hash(cfg.values));
    CHECK(m.at("csv_schema").contains("roots.csv"));
    CHECK_FALSE(m.contains("wall_time_seconds"));

    cfg.output_dir = d2.string();
    run_experiment(cfg);
    CHECK(slurp(d1 / "manifest.json") == slurp(d2 / "manifest.json"));
    CHECK(slurp(d1 / "roots.csv") == slurp(d2 / "roots.csv"));

    const auto cmp = compare_runs(d1.string(), (d2 / "manifest.json").string());
    CHECK(cmp.config_equal);
    CHECK(cmp.diffs.empty());
    CHECK(cmp.within_tolerance());

    const auto d3 = scratch("roots3");
    cfg = resolve_config(Scenario::roots, nullptr, {{"sweep", "0.01:100:50"}, {"tau", "2"}});
    cfg.output_dir = d3.string();
    run_experiment(cfg);
    const auto diff = compare_runs(d1.string(), d3.string());
    CHECK_FALSE(diff.config_equal);
    CHECK_FALSE(diff.diffs.empty());
    CHECK_FALSE(diff.within_tolerance());
    CHECK(to_json(diff).at("within_tolerance") == false);

    const auto dk = scratch("kern");
    cfg = resolve_config(Scenario::kernels, nullptr, {{"samples", "11"}});
    cfg.output_dir = dk.string();
    run_experiment(cfg);
    CHECK(field_of([&] { compare_runs(d1.string(), dk.string()); }) == "b");
    for (const auto& d : {d1, d2, d3, dk}) fs::remove_all(d);
}

TEST_CASE("linear decay writes a fit summary") {
    const auto d = scratch("decay");
    auto cfg = resolve_config(Scenario::linear_decay, nullptr, {{"N", "64"}, {"period", "64"}, {"horizon", "50"}});
    cfg.output_dir = d.string();
    const auto r = run_experiment(cfg);
    CHECK(r.exit_code == kExitOk);
    const auto fit = nlohmann::json::parse(slurp(d / "fit.json"));
    CHECK(fit.at("expected_exponent").get<double>() == doctest::Approx(-0.75));
    CHECK(std::abs(fit.at("fitted_exponent").get<double>() + 0.75) < 0.1);
    fs::remove_all(d);
}

TEST_CASE("inadmissible nonlinear exponents are a config error") {
    auto cfg = resolve_config(Scenario::nonlinear_decay, nullptr, {{"m2", "1.2"}, {"N", "16"}});
    cfg.output_dir = scratch("nld").string();
    CHECK(field_of([&] { run_experiment(cfg); }) == "m2");
}

#ifdef JMGT_CLI
TEST_CASE("CLI exit codes and error lines") {
    const auto err = scratch("stderr.txt");
    const auto out = scratch("cli");
    CHECK(run_cli("--version") == 0);
    CHECK(run_cli("roots --sweep 0.1:10:5 --output " + out.string()) == 0);
    CHECK(fs::exists(out / "manifest.json"));
    CHECK(run_cli("roots --tau -1 --output " + out.string(), err) == 2);
    CHECK(slurp(err).find("error=config field=tau") != std::string::npos);
    CHECK(run_cli("roots --bogus 1 --output " + out.string()) == 2);
    CHECK(run_cli("simulate --N 16 --bandlimit 2 --amplitude 50 --horizon 10 --samples 201 --output " + out.string()) == 3);
    fs::remove_all(out);
    fs::remove(err);
}
#endif
