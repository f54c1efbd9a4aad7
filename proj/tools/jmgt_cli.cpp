// jmgt: one subcommand per scenario; every scenario key is also a --key flag.

#include <cstdio>
#include <exception>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jmgt/errors.hpp"
#include "jmgt/experiments.hpp"

namespace {

// Grid and parameter classes name their own fields; map them to flag names.
std::string cli_field(const std::string& f) {
    if (f == "dims") return "n";
    if (f == "modes_per_axis") return "N";
    return f;
}

std::string one_line(std::string s) {
    for (char& c : s)
        if (c == '\n' || c == '\r') c = ' ';
    return s;
}

int fail(const char* kind, const std::string& field, const std::string& what, int code) {
    if (field.empty())
        std::fprintf(stderr, "jmgt: error=%s: %s\n", kind, one_line(what).c_str());
    else
        std::fprintf(stderr, "jmgt: error=%s field=%s: %s\n", kind, field.c_str(), one_line(what).c_str());
    return code;
}

struct Sub {
    jmgt::Scenario scenario;
    CLI::App* app = nullptr;
    std::map<std::string, std::string> values;
    std::string config, output, threads;
};

const char* summary(jmgt::Scenario s) {
    using jmgt::Scenario;
    switch (s) {
        case Scenario::roots: return "characteristic roots and regimes over a |xi| sweep";
        case Scenario::kernels: return "kernel histories for one frequency";
        case Scenario::linear_decay: return "norm decay of the linear propagator with a power-law fit";
        case Scenario::simulate: return "nonlinear Picard solve with spectral dumps";
        case Scenario::nonlinear_decay: return "nonlinear decay with horizon doubling";
        case Scenario::norms: return "rough-space norms of random fields";
        case Scenario::inequalities: return "ensemble checks of the function-space inequalities";
        case Scenario::scaling_pipeline: return "scaling argument on random rough data";
        case Scenario::calibrate: return "regenerate the calibration constants";
        case Scenario::compare: return "compare two run manifests";
        case Scenario::acceptance: return "run the acceptance criteria";
    }
    return "";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical experiments for the fractional JMGT equation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("jmgt ") + JMGT_VERSION);

    std::vector<Sub> subs;
    subs.reserve(jmgt::all_scenarios().size());
    for (auto s : jmgt::all_scenarios()) {
        Sub& sub = subs.emplace_back();
        sub.scenario = s;
        sub.app = app.add_subcommand(jmgt::scenario_name(s), summary(s));
        sub.app->add_option("--config", sub.config, "JSON config file (flags override its values)");
        sub.app->add_option("--output", sub.output, "output directory (env JMGT_OUTPUT_DIR)");
        sub.app->add_option("--threads", sub.threads, "worker thread cap, 0 = default (env JMGT_THREADS)");
        for (const auto& o : jmgt::scenario_options(s)) {
            std::string help = o.help + " [default " + o.default_value.dump() + "]";
            auto* opt = sub.app->add_option("--" + o.key, sub.values[o.key], help);
            if (o.type == jmgt::OptionType::flag) opt->expected(0, 1);
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("config", "", e.what(), jmgt::kExitConfig);
    }

    Sub* chosen = nullptr;
    for (auto& s : subs)
        if (s.app->parsed()) chosen = &s;
    if (!chosen) return fail("config", "scenario", "no scenario given", jmgt::kExitConfig);

    try {
        std::map<std::string, std::string> flags;
        for (const auto& o : jmgt::scenario_options(chosen->scenario)) {
            const auto* opt = chosen->app->get_option("--" + o.key);
            if (opt->count() == 0) continue;
            std::string v = chosen->values[o.key];
            if (o.type == jmgt::OptionType::flag && v.empty()) v = "true";
            flags[o.key] = v;
        }
        if (chosen->app->get_option("--output")->count()) flags["output"] = chosen->output;
        if (chosen->app->get_option("--threads")->count()) flags["threads"] = chosen->threads;
        const nlohmann::json file = chosen->config.empty() ? nlohmann::json() : jmgt::load_config_file(chosen->config);
        const auto cfg = jmgt::resolve_config(chosen->scenario, file, flags);
        const auto r = jmgt::run_experiment(cfg);
        if (chosen->scenario != jmgt::Scenario::acceptance) std::printf("%s\n", r.results.dump(2).c_str());
        if (r.exit_code == jmgt::kExitNonConvergence)
            return fail("nonconvergence", "", r.message, r.exit_code);
        if (r.exit_code != jmgt::kExitOk) std::fprintf(stderr, "jmgt: %s\n", one_line(r.message).c_str());
        return r.exit_code;
    } catch (const jmgt::ConfigError& e) {
        const std::string f = cli_field(e.field());
        std::string what = e.what();
        // Drop the "field: " prefix the exception carries so the field appears once.
        if (what.rfind(e.field() + ": ", 0) == 0) what = what.substr(e.field().size() + 2);
        return fail("config", f, what, jmgt::kExitConfig);
    } catch (const jmgt::DomainError& e) {
        return fail("domain", "", e.what(), jmgt::kExitConfig);
    } catch (const jmgt::NonConvergence& e) {
        return fail("nonconvergence", "", e.what(), jmgt::kExitNonConvergence);
    } catch (const jmgt::InvariantViolation& e) {
        return fail("invariant", "", e.what(), jmgt::kExitInvariant);
    } catch (const jmgt::ContractViolation& e) {
        return fail("contract", "", e.what(), jmgt::kExitInvariant);
    } catch (const std::exception& e) {
        return fail("internal", "", e.what(), jmgt::kExitInvariant);
    }
}
