#include "jmgt/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Core>  // version macros for the manifest
#include <fftw3.h>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "jmgt/acceptance.hpp"
#include "jmgt/calibration.hpp"
#include "jmgt/dispersion.hpp"
#include "jmgt/errors.hpp"
#include "jmgt/field.hpp"
#include "jmgt/inequalities.hpp"
#include "jmgt/kernels.hpp"
#include "jmgt/linear.hpp"
#include "jmgt/nonlinear.hpp"
#include "jmgt/spaces.hpp"

namespace jmgt {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kManifestFormat = 1;
constexpr int kCsvSchemaVersion = 1;

struct ScenarioEntry {
    Scenario id;
    const char* name;
};

constexpr ScenarioEntry kScenarios[] = {
    {Scenario::roots, "roots"},
    {Scenario::kernels, "kernels"},
    {Scenario::linear_decay, "linear-decay"},
    {Scenario::simulate, "simulate"},
    {Scenario::nonlinear_decay, "nonlinear-decay"},
    {Scenario::norms, "norms"},
    {Scenario::inequalities, "inequalities"},
    {Scenario::scaling_pipeline, "scaling-pipeline"},
    {Scenario::calibrate, "calibrate"},
    {Scenario::compare, "compare"},
    {Scenario::acceptance, "acceptance"},
};

OptionInfo opt(const char* key, OptionType t, json def, const char* help) { return {key, t, std::move(def), help}; }

void add_model_grid(std::vector<OptionInfo>& v, int n_modes, double period) {
    v.push_back(opt("tau", OptionType::number, 1.0, "thermal relaxation"));
    v.push_back(opt("delta", OptionType::number, 1.0, "diffusivity of sound"));
    v.push_back(opt("b_over_a", OptionType::number, 2.0, "nonlinearity ratio B/A"));
    v.push_back(opt("sigma", OptionType::number, 1.0, "fractional order"));
    v.push_back(opt("lambda", OptionType::number, 1.0, "scaling parameter"));
    v.push_back(opt("n", OptionType::integer, 1, "space dimension"));
    v.push_back(opt("N", OptionType::integer, n_modes, "modes per axis"));
    v.push_back(opt("period", OptionType::number, period, "torus side in units of 2*pi"));
    v.push_back(opt("seed", OptionType::integer, 20240611, "random seed"));
}

std::vector<OptionInfo> build_options(Scenario s) {
    std::vector<OptionInfo> v;
    switch (s) {
        case Scenario::roots:
            add_model_grid(v, 64, 1.0);
            v.push_back(opt("sweep", OptionType::text, "0.001:1000:200", "|xi| sweep lo:hi:count"));
            v.push_back(opt("spacing", OptionType::text, "log", "log or linear"));
            break;
        case Scenario::kernels:
            add_model_grid(v, 64, 1.0);
            v.push_back(opt("xi", OptionType::number, 1.0, "frequency magnitude"));
            v.push_back(opt("horizon", OptionType::number, 10.0, "final time"));
            v.push_back(opt("samples", OptionType::integer, 101, "uniform time samples"));
            v.push_back(opt("compare_ode", OptionType::flag, false, "also integrate the mode ODE"));
            break;
        case Scenario::linear_decay:
            add_model_grid(v, 256, 256.0);
            v.push_back(opt("m", OptionType::number, 1.0, "Lebesgue exponent of the data, [1,2)"));
            v.push_back(opt("s", OptionType::number, 0.0, "regularity, -sigma or >= 0"));
            v.push_back(opt("horizon", OptionType::number, 200.0, "final time"));
            v.push_back(opt("per_octave", OptionType::integer, 8, "geometric time samples per octave"));
            v.push_back(opt("data", OptionType::text, "w1", "slot carrying the profile: w0, w1, w2 or all"));
            v.push_back(opt("inhomogeneous", OptionType::text, "none",
                            "none, hdot_only or with_lebesgue (second-derivative kernel of K2)"));
            break;
        case Scenario::simulate:
            add_model_grid(v, 128, 1.0);
            v.push_back(opt("amplitude", OptionType::number, 1e-3, "data amplitude"));
            v.push_back(opt("bandlimit", OptionType::number, 12.0, "data band limit"));
            v.push_back(opt("width", OptionType::number, 4.0, "Gaussian envelope width"));
            v.push_back(opt("horizon", OptionType::number, 10.0, "final time"));
            v.push_back(opt("samples", OptionType::integer, 1001, "uniform time samples"));
            v.push_back(opt("representation", OptionType::text, "complex", "complex or coupled"));
            v.push_back(opt("dealias", OptionType::text, "two_thirds", "two_thirds or none"));
            v.push_back(opt("picard_max_iters", OptionType::integer, 50, "Picard iteration cap"));
            v.push_back(opt("picard_tol", OptionType::number, 1e-12, "relative Picard increment"));
            v.push_back(opt("oracle", OptionType::flag, false, "run the method-of-lines oracle too"));
            v.push_back(opt("dumps", OptionType::integer, 5, "number of spectral state dumps"));
            break;
        case Scenario::nonlinear_decay:
            add_model_grid(v, 512, 256.0);
            v.push_back(opt("m1", OptionType::number, 1.0, "Lebesgue exponent of the u data"));
            v.push_back(opt("m2", OptionType::number, 1.0, "Lebesgue exponent of the v data"));
            v.push_back(opt("s", OptionType::number, 0.5, "regularity, > [n/2 - sigma]_+"));
            v.push_back(opt("horizon", OptionType::number, 100.0, "final time"));
            v.push_back(opt("dt", OptionType::number, 0.1, "time step"));
            v.push_back(opt("amplitude", OptionType::number, 1e-3, "u data amplitude"));
            v.push_back(opt("v_ratio", OptionType::number, 0.5, "v amplitude relative to u (0 gives the real reduction)"));
            v.push_back(opt("doubling", OptionType::flag, true, "repeat on half the horizon"));
            v.push_back(opt("picard_max_iters", OptionType::integer, 40, "Picard iteration cap"));
            v.push_back(opt("picard_tol", OptionType::number, 1e-12, "relative Picard increment"));
            break;
        case Scenario::norms:
            add_model_grid(v, 64, 4.0);
            v.push_back(opt("alpha", OptionType::number, -1.0, "radius exponent, <= 0"));
            v.push_back(opt("s", OptionType::number, 0.0, "regularity"));
            v.push_back(opt("bandlimit", OptionType::number, 6.0, "field band limit"));
            v.push_back(opt("width", OptionType::number, 3.0, "Gaussian envelope width"));
            v.push_back(opt("trials", OptionType::integer, 10, "random fields"));
            break;
        case Scenario::inequalities:
            add_model_grid(v, 64, 1.0);
            v.push_back(opt("kind", OptionType::text, "all", "checker name or all"));
            v.push_back(opt("trials", OptionType::integer, 50, "fields per ensemble"));
            v.push_back(opt("alpha", OptionType::number, -0.5, "radius exponent, <= 0"));
            v.push_back(opt("s", OptionType::number, 0.5, "regularity"));
            break;
        case Scenario::scaling_pipeline:
            add_model_grid(v, 1024, 1.0);
            v.push_back(opt("alpha", OptionType::number, -1.0, "radius exponent, < 0"));
            v.push_back(opt("s", OptionType::number, 0.0, "regularity"));
            v.push_back(opt("amplitude", OptionType::number, 1.0, "data amplitude"));
            v.push_back(opt("bandlimit", OptionType::number, 4.0, "data band limit"));
            v.push_back(opt("width", OptionType::number, 2.0, "Gaussian envelope width"));
            v.push_back(opt("instances", OptionType::integer, 10, "random data sets"));
            v.push_back(opt("horizon", OptionType::number, 5.0, "solve horizon"));
            v.push_back(opt("samples", OptionType::integer, 201, "uniform time samples"));
            v.push_back(opt("solve", OptionType::flag, true, "run the scaled Picard solve"));
            v.push_back(opt("calibration", OptionType::text, "", "calibration file (default: bundled)"));
            break;
        case Scenario::calibrate:
            v.push_back(opt("N", OptionType::integer, 64, "modes of the calibration grid"));
            v.push_back(opt("seed", OptionType::integer, 314159, "random seed"));
            v.push_back(opt("trials", OptionType::integer, 24, "random data sets"));
            v.push_back(opt("safety", OptionType::number, 2.0, "multiplier on ensemble maxima"));
            v.push_back(opt("alpha", OptionType::number, -1.0, "radius exponent"));
            v.push_back(opt("s", OptionType::number, 0.0, "regularity"));
            v.push_back(opt("with_inequalities", OptionType::flag, true, "also store inequality constants"));
            break;
        case Scenario::compare:
            v.push_back(opt("a", OptionType::text, "", "first manifest or run directory"));
            v.push_back(opt("b", OptionType::text, "", "second manifest or run directory"));
            v.push_back(opt("rtol", OptionType::number, 1e-9, "relative tolerance"));
            v.push_back(opt("atol", OptionType::number, 0.0, "absolute tolerance"));
            break;
        case Scenario::acceptance:
            v.push_back(opt("criteria", OptionType::text, "all", "comma-separated criterion ids or all"));
            v.push_back(opt("cli", OptionType::text, "", "jmgt executable for the determinism criterion"));
            v.push_back(opt("seed", OptionType::integer, 20240611, "random seed"));
            break;
    }
    std::sort(v.begin(), v.end(), [](const OptionInfo& a, const OptionInfo& b) { return a.key < b.key; });
    return v;
}

const char* type_name(OptionType t) {
    switch (t) {
        case OptionType::number: return "number";
        case OptionType::integer: return "integer";
        case OptionType::text: return "string";
        case OptionType::flag: return "boolean";
    }
    return "?";
}

json coerce_json(const OptionInfo& o, const json& v) {
    switch (o.type) {
        case OptionType::number:
            if (v.is_number()) return v.get<double>();
            break;
        case OptionType::integer:
            if (v.is_number_integer()) return v.get<long long>();
            if (v.is_number_float()) {
                const double d = v.get<double>();
                if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e15) return static_cast<long long>(d);
            }
            break;
        case OptionType::text:
            if (v.is_string()) return v;
            break;
        case OptionType::flag:
            if (v.is_boolean()) return v;
            break;
    }
    throw ConfigError(o.key, std::string("expected ") + type_name(o.type) + ", got " + v.dump());
}

json coerce_text(const OptionInfo& o, const std::string& s) {
    try {
        switch (o.type) {
            case OptionType::number: {
                std::size_t pos = 0;
                const double d = std::stod(s, &pos);
                if (pos == s.size()) return d;
                break;
            }
            case OptionType::integer: {
                std::size_t pos = 0;
                const long long i = std::stoll(s, &pos);
                if (pos == s.size()) return i;
                break;
            }
            case OptionType::text: return s;
            case OptionType::flag:
                if (s == "true" || s == "1" || s == "on" || s == "yes") return true;
                if (s == "false" || s == "0" || s == "off" || s == "no") return false;
                break;
        }
    } catch (const std::logic_error&) {
    }
    throw ConfigError(o.key, std::string("expected ") + type_name(o.type) + ", got '" + s + "'");
}

// ---------------------------------------------------------------- output

std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class Output {
public:
    explicit Output(const std::string& dir) : dir_(dir) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_)) throw ConfigError("output", "cannot create directory " + dir);
    }

    void csv(const std::string& name, const std::vector<std::string>& columns,
             const std::vector<std::vector<std::string>>& rows) {
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) throw ConfigError("output", "cannot write " + (dir_ / name).string());
        for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
        out << '\n';
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
            out << '\n';
        }
        schema_[name] = columns;
        files_.push_back(name);
    }

    void write_json(const std::string& name, const json& j, bool record = true) {
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) throw ConfigError("output", "cannot write " + (dir_ / name).string());
        out << j.dump(2) << '\n';
        if (record) files_.push_back(name);
    }

    const fs::path& dir() const { return dir_; }
    const std::vector<std::string>& files() const { return files_; }
    const std::map<std::string, std::vector<std::string>>& schema() const { return schema_; }

private:
    fs::path dir_;
    std::vector<std::string> files_;
    std::map<std::string, std::vector<std::string>> schema_;
};

// Row builder: numbers at full precision, everything else verbatim.
struct Row {
    std::vector<std::string> cells;
    Row& operator<<(double v) {
        cells.push_back(fmt_double(v));
        return *this;
    }
    Row& operator<<(long long v) {
        cells.push_back(std::to_string(v));
        return *this;
    }
    Row& operator<<(int v) { return *this << static_cast<long long>(v); }
    Row& operator<<(std::size_t v) { return *this << static_cast<long long>(v); }
    Row& operator<<(bool v) {
        cells.emplace_back(v ? "1" : "0");
        return *this;
    }
    Row& operator<<(const std::string& v) {
        cells.push_back(v);
        return *this;
    }
    Row& operator<<(const char* v) { return *this << std::string(v); }
};

// JSON cannot hold inf/nan; keep them as strings so dumps stay valid.
json num(double v) {
    if (std::isfinite(v)) return v;
    return fmt_double(v);
}

// ---------------------------------------------------------------- helpers

ModelParams model_of(const ExperimentConfig& c) {
    return ModelParams(c.number("tau"), c.number("delta"), c.number("b_over_a"), c.number("sigma"),
                       c.number("lambda"));
}

FrequencyGrid grid_of(const ExperimentConfig& c) {
    const long long n = c.integer("n"), N = c.integer("N");
    if (n < 1 || n > 3) throw ConfigError("n", "must be 1, 2 or 3");
    if (N < 4 || N > 1024 || N % 2) throw ConfigError("N", "must be even and in [4, 1024]");
    const double period = c.number("period");
    if (!(period > 0.0) || !std::isfinite(period)) throw ConfigError("period", "must be a finite positive number");
    return FrequencyGrid(static_cast<int>(n), static_cast<int>(N), 2.0 * std::numbers::pi * period);
}

std::uint64_t seed_of(const ExperimentConfig& c) {
    const long long s = c.integer("seed");
    if (s < 0) throw ConfigError("seed", "must be >= 0");
    return static_cast<std::uint64_t>(s);
}

long long positive_int(const ExperimentConfig& c, const char* key, long long min = 1) {
    const long long v = c.integer(key);
    if (v < min) throw ConfigError(key, "must be >= " + std::to_string(min));
    return v;
}

double positive_number(const ExperimentConfig& c, const char* key) {
    const double v = c.number(key);
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(key, "must be a finite positive number");
    return v;
}

std::vector<double> uniform_times(double horizon, std::size_t samples) {
    std::vector<double> t(samples);
    for (std::size_t i = 0; i < samples; ++i) t[i] = horizon * static_cast<double>(i) / static_cast<double>(samples - 1);
    return t;
}

json decay_json(const DecayReport& r) {
    return {{"fitted_exponent", num(r.fitted)},
            {"expected_exponent", num(r.expected)},
            {"error", num(r.fitted - r.expected)},
            {"r_squared", num(r.r_squared)},
            {"conclusive", r.conclusive},
            {"degenerate", r.degenerate},
            {"fit_t_min", r.fit_t_min},
            {"fit_t_max", r.fit_t_max},
            {"message", r.message}};
}

struct Outcome {
    json results;
    int exit_code = kExitOk;
    std::string message = "ok";
};

// ---------------------------------------------------------------- scenarios

Outcome run_roots(const ExperimentConfig& c, Output& out) {
    const ModelParams p = model_of(c);
    const std::string sweep = c.text("sweep");
    double lo = 0, hi = 0;
    long long count = 0;
    {
        char tail = 0;
        if (std::sscanf(sweep.c_str(), "%lf:%lf:%lld%c", &lo, &hi, &count, &tail) != 3)
            throw ConfigError("sweep", "expected lo:hi:count, got '" + sweep + "'");
    }
    if (count < 1 || count > 10000000) throw ConfigError("sweep", "count must be in [1, 1e7]");
    if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi)) throw ConfigError("sweep", "needs 0 < lo <= hi");
    const std::string spacing = c.text("spacing");
    if (spacing != "log" && spacing != "linear") throw ConfigError("spacing", "must be log or linear");

    const Thresholds th = thresholds(p);
    std::vector<std::vector<std::string>> rows;
    rows.reserve(static_cast<std::size_t>(count));
    double worst_res = 0.0;
    std::map<std::string, long long> by_regime;
    for (long long i = 0; i < count; ++i) {
        const double f = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        const double xi = spacing == "log" ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f;
        const RootTriple r = characteristic_roots(xi, p);
        double res = 0.0;
        for (auto mu : {r.mu1, r.mu2, r.mu3})
            res = std::max(res, cubic_residual(mu, xi, p) / (1.0 + std::pow(std::abs(mu), 3)));
        worst_res = std::max(worst_res, res);
        by_regime[regime_name(r.regime)]++;
        Row row;
        row << xi << r.eta_mag << symbol_at(xi, p) << r.mu1.real() << r.mu2.real() << r.mu2.imag() << r.mu3.real()
            << r.mu3.imag() << r.mu_R << r.mu_I << r.discriminant << regime_name(r.regime) << r.near_degenerate << res;
        rows.push_back(std::move(row.cells));
    }
    out.csv("roots.csv",
            {"xi", "eta", "symbol", "mu1", "mu2_re", "mu2_im", "mu3_re", "mu3_im", "mu_R", "mu_I", "discriminant",
             "regime", "near_degenerate", "scaled_residual"},
            rows);
    Outcome o;
    o.results = {{"rows", count},
                 {"N0", th.n0},
                 {"eps0", th.eps0},
                 {"N0_raw", th.n0_raw},
                 {"eps0_raw", th.eps0_raw},
                 {"worst_scaled_residual", num(worst_res)},
                 {"regime_counts", by_regime}};
    return o;
}

Outcome run_kernels(const ExperimentConfig& c, Output& out) {
    const ModelParams p = model_of(c);
    const double xi = c.number("xi");
    if (!(xi >= 0.0) || !std::isfinite(xi)) throw ConfigError("xi", "must be a finite number >= 0");
    const double T = positive_number(c, "horizon");
    const auto S = static_cast<std::size_t>(positive_int(c, "samples", 2));
    const auto t = uniform_times(T, S);
    const ModeKernel mk(xi, p);
    const auto ks = mk.at(t);
    const bool ode = c.flag("compare_ode");
    std::vector<KernelTriple> ko;
    if (ode) ko = kernel_eval_ode(t, xi, p);
    std::vector<std::string> cols = {"t", "K0", "K1", "K2", "dK0", "dK1", "dK2", "d2K0", "d2K1", "d2K2"};
    if (ode) cols.push_back("max_ode_diff");
    std::vector<std::vector<std::string>> rows;
    double worst = 0.0;
    for (std::size_t i = 0; i < S; ++i) {
        Row row;
        row << t[i];
        for (int d = 0; d < 3; ++d)
            for (int j = 0; j < 3; ++j) row << ks[i].value[d][j].real();
        if (ode) {
            double m = 0.0;
            for (int d = 0; d < 3; ++d)
                for (int j = 0; j < 3; ++j) m = std::max(m, std::abs(ks[i].value[d][j] - ko[i].value[d][j]));
            worst = std::max(worst, m);
            row << m;
        }
        rows.push_back(std::move(row.cells));
    }
    out.csv("kernels.csv", cols, rows);
    const auto& r = mk.roots();
    Outcome o;
    o.results = {{"xi", xi},
                 {"regime", regime_name(r.regime)},
                 {"ode_fallback", mk.uses_fallback()},
                 {"mu1", r.mu1.real()},
                 {"mu_R", r.mu_R},
                 {"mu_I", r.mu_I},
                 {"spectral_abscissa", spectral_abscissa(r)}};
    if (ode) o.results["max_ode_diff"] = num(worst);
    return o;
}

Outcome run_linear_decay(const ExperimentConfig& c, Output& out) {
    const ModelParams p = model_of(c);
    const FrequencyGrid g = grid_of(c);
    const double m = c.number("m"), s = c.number("s");
    const double T = positive_number(c, "horizon");
    const int ppo = static_cast<int>(positive_int(c, "per_octave"));
    const auto t = geometric_time_grid(T, ppo);
    const std::string inhom = c.text("inhomogeneous");
    const int n = g.dims();
    DecayReport rep;
    if (inhom == "none") {
        if (!(m >= 1.0 && m < 2.0)) throw ConfigError("m", "must lie in [1, 2)");
        const auto prof = decay_profile(g, n * (1.0 - 1.0 / m), false);
        const std::string slot = c.text("data");
        LinearData d = LinearData::zeros(g);
        if (slot == "w0" || slot == "all") d.w0 = prof;
        if (slot == "w1" || slot == "all") d.w1 = prof;
        if (slot == "w2" || slot == "all") d.w2 = prof;
        if (slot != "w0" && slot != "w1" && slot != "w2" && slot != "all")
            throw ConfigError("data", "must be w0, w1, w2 or all");
        rep = verify_decay_prop_4_3(g, p, d, m, s, t);
    } else if (inhom == "hdot_only") {
        rep = verify_decay_prop_4_4(g, p, decay_profile(g, 0.5 * n + s + p.sigma(), false), m, s, t,
                                    InhomDisplay::hdot_only);
    } else if (inhom == "with_lebesgue") {
        if (!(m >= 1.0 && m < 2.0)) throw ConfigError("m", "must lie in [1, 2)");
        rep = verify_decay_prop_4_4(g, p, decay_profile(g, n * (1.0 - 1.0 / m), false), m, s, t,
                                    InhomDisplay::with_lebesgue);
    } else {
        throw ConfigError("inhomogeneous", "must be none, hdot_only or with_lebesgue");
    }
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < rep.t.size(); ++i) {
        Row row;
        row << rep.t[i] << rep.norm[i];
        rows.push_back(std::move(row.cells));
    }
    out.csv("decay.csv", {"t", "norm"}, rows);
    Outcome o;
    o.results = decay_json(rep);
    out.write_json("fit.json", o.results);
    return o;
}

DealiasRule dealias_of(const ExperimentConfig& c) {
    const std::string d = c.text("dealias");
    if (d == "two_thirds") return DealiasRule::two_thirds;
    if (d == "none") return DealiasRule::none;
    throw ConfigError("dealias", "must be two_thirds or none");
}

Outcome run_simulate(const ExperimentConfig& c, Output& out) {
    const ModelParams p = model_of(c);
    const FrequencyGrid g = grid_of(c);
    MildSolverConfig cfg;
    cfg.horizon = positive_number(c, "horizon");
    cfg.samples = static_cast<std::size_t>(positive_int(c, "samples", 16));
    cfg.picard_max_iters = static_cast<int>(positive_int(c, "picard_max_iters"));
    cfg.picard_tol = positive_number(c, "picard_tol");
    cfg.dealias = dealias_of(c);
    const std::string rep_name = c.text("representation");
    if (rep_name == "complex")
        cfg.representation = Representation::complex_field;
    else if (rep_name == "coupled")
        cfg.representation = Representation::coupled_real;
    else
        throw ConfigError("representation", "must be complex or coupled");
    cfg.validate();

    std::mt19937_64 rng(seed_of(c));
    RandomFieldOptions ro;
    ro.bandlimit = positive_number(c, "bandlimit");
    ro.width = positive_number(c, "width");
    ro.amplitude = c.number("amplitude");
    if (!(ro.amplitude >= 0.0)) throw ConfigError("amplitude", "must be >= 0");
    LinearData d;
    d.w0 = random_field(g, rng, ro);
    d.w1 = random_field(g, rng, ro);
    d.w2 = random_field(g, rng, ro);

    const auto sol = picard_solve(g, d, p, cfg);
    NonlinearSolution ref;
    const bool oracle = c.flag("oracle");
    if (oracle) ref = method_of_lines_oracle(g, d, p, cfg);

    std::vector<std::string> cols = {"t", "dpsi_l2", "dpsi_hdot_sigma"};
    if (oracle) cols.insert(cols.end(), {"oracle_l2", "rel_diff"});
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < sol.t.size(); ++i) {
        Row row;
        const double l2 = sobolev_hom_norm(g, sol.dpsi[i], 0.0);
        row << sol.t[i] << l2 << sobolev_hom_norm(g, sol.dpsi[i], p.sigma());
        if (oracle) {
            double diff = 0.0, nr = 0.0;
            for (std::size_t k = 0; k < g.size(); ++k) {
                diff += std::norm(sol.dpsi[i][k] - ref.dpsi[i][k]);
                nr += std::norm(ref.dpsi[i][k]);
            }
            row << std::sqrt(g.cell_volume() * nr) << (nr > 0.0 ? std::sqrt(diff / nr) : std::sqrt(diff));
        }
        rows.push_back(std::move(row.cells));
    }
    out.csv("timeseries.csv", cols, rows);

    const long long dumps = c.integer("dumps");
    if (dumps < 0) throw ConfigError("dumps", "must be >= 0");
    if (dumps > 0) {
        std::vector<std::vector<std::string>> srows;
        const std::size_t S = sol.t.size();
        for (long long j = 0; j < dumps; ++j) {
            const std::size_t i = dumps == 1 ? S - 1 : static_cast<std::size_t>(j) * (S - 1) / (dumps - 1);
            for (std::size_t k = 0; k < g.size(); ++k) {
                const auto idx = g.mode_index(k);
                Row row;
                row << sol.t[i] << idx[0] << idx[1] << idx[2] << sol.dpsi[i][k].real() << sol.dpsi[i][k].imag();
                srows.push_back(std::move(row.cells));
            }
        }
        out.csv("states.csv", {"t", "k0", "k1", "k2", "dpsi_re", "dpsi_im"}, srows);
    }
    std::vector<std::vector<std::string>> irows;
    for (std::size_t i = 0; i < sol.residual_history.size(); ++i) {
        Row row;
        row << (i + 1) << sol.residual_history[i];
        irows.push_back(std::move(row.cells));
    }
    out.csv("picard.csv", {"iteration", "increment"}, irows);

    Outcome o;
    o.results = {{"converged", sol.converged},
                 {"diverged", sol.diverged},
                 {"iterations", sol.iterations_used},
                 {"final_increment", sol.residual_history.empty() ? json(0.0) : num(sol.residual_history.back())},
                 {"solver_message", sol.message}};
    if (oracle) o.results["oracle_distance"] = num(relative_l2_distance(g, sol.dpsi, ref.dpsi));
    if (!sol.converged) {
        o.exit_code = kExitNonConvergence;
        o.message = "picard did not converge: " + sol.message;
    }
    return o;
}

Outcome run_nonlinear_decay(const ExperimentConfig& c, Output& out) {
    const ModelParams p = model_of(c);
    const FrequencyGrid g = grid_of(c);
    NonlinearDecayOptions to;
    to.horizon = positive_number(c, "horizon");
    to.dt = positive_number(c, "dt");
    to.s = c.number("s");
    to.m1 = c.number("m1");
    to.m2 = c.number("m2");
    to.picard_max_iters = static_cast<int>(positive_int(c, "picard_max_iters"));
    to.picard_tol = positive_number(c, "picard_tol");
    to.check_horizon_doubling = c.flag("doubling");
    const double amp = c.number("amplitude"), ratio = c.number("v_ratio");
    if (!(amp >= 0.0)) throw ConfigError("amplitude", "must be >= 0");
    if (!(ratio >= 0.0)) throw ConfigError("v_ratio", "must be >= 0");
    for (auto [key, m] : {std::pair{"m1", to.m1}, std::pair{"m2", to.m2}})
        if (!(m >= 1.0 && m < 2.0)) throw ConfigError(key, "must lie in [1, 2)");
    const int n = g.dims();
    LinearData u = LinearData::zeros(g), v = LinearData::zeros(g);
    const auto pu = decay_profile(g, n * (1.0 - 1.0 / to.m1), false);
    const auto pv = decay_profile(g, n * (1.0 - 1.0 / to.m2), false);
    for (std::size_t i = 0; i < g.size(); ++i) {
        u.w1[i] = amp * pu[i];
        v.w1[i] = ratio * amp * pv[i];
    }
    const auto rep = verify_theorem_2_2_decay(g, u, v, p, to);
    Outcome o;
    o.results = {{"admissible", rep.admissible},
                 {"condition_lhs", rep.condition_lhs},
                 {"condition_rhs", rep.condition_rhs},
                 {"real_reduction", rep.real_reduction},
                 {"converged", rep.converged},
                 {"horizon_stable", rep.horizon_stable},
                 {"norm_drift", num(rep.norm_drift)},
                 {"exponent_drift", num(rep.exponent_drift)},
                 {"short_horizon", rep.short_horizon},
                 {"report", rep.message}};
    if (!rep.admissible)
        throw ConfigError("m2", "exponents violate 2/max(m1,m2) >= 1/min(m1,m2) + sigma/n (" +
                                    fmt_double(rep.condition_lhs) + " < " + fmt_double(rep.condition_rhs) + ")");
    if (!rep.converged) {
        o.exit_code = kExitNonConvergence;
        o.message = rep.message;
        return o;
    }
    json comps = json::object();
    std::vector<std::string> cols = {"t"};
    for (const auto& cd : rep.components) {
        comps[cd.name] = {{"m", cd.m}, {"l2", decay_json(cd.l2)}, {"hdot", decay_json(cd.hdot)}};
        cols.push_back(cd.name + "_l2");
        cols.push_back(cd.name + "_hdot");
    }
    o.results["components"] = comps;
    std::vector<std::vector<std::string>> rows;
    const auto& t = rep.components.front().l2.t;
    for (std::size_t i = 0; i < t.size(); ++i) {
        Row row;
        row << t[i];
        for (const auto& cd : rep.components) row << cd.l2.norm[i] << cd.hdot.norm[i];
        rows.push_back(std::move(row.cells));
    }
    out.csv("decay.csv", cols, rows);
    return o;
}

Outcome run_norms(const ExperimentConfig& c, Output& out) {
    const FrequencyGrid g = grid_of(c);
    const double alpha = c.number("alpha"), s = c.number("s");
    if (alpha > 0.0) throw ConfigError("alpha", "must be <= 0");
    const long long trials = positive_int(c, "trials");
    RandomFieldOptions ro;
    ro.bandlimit = positive_number(c, "bandlimit");
    ro.width = positive_number(c, "width");
    ro.hermitian = true;
    std::vector<std::vector<std::string>> rows;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (long long t = 0; t < trials; ++t) {
        std::mt19937_64 rng(seed_of(c) + 7919ULL * static_cast<std::uint64_t>(t));
        const auto f = random_field(g, rng, ro);
        const double e = e_norm(g, f, alpha, s), ed = e_norm_decomposed(g, f, alpha, s);
        const double ratio = e > 0.0 ? ed / e : 0.0;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        const auto phys = inverse_transform(g, f);
        Row row;
        row << t << sobolev_hom_norm(g, f, 0.0) << e << ed << ratio << sobolev_norm(g, f, s)
            << sobolev_hom_norm(g, f, std::max(s, 0.0)) << lebesgue_norm(g, phys, std::numeric_limits<double>::infinity());
        rows.push_back(std::move(row.cells));
    }
    out.csv("norms.csv", {"trial", "l2", "e_norm", "e_norm_decomposed", "ratio", "sobolev", "sobolev_hom", "linf"},
            rows);
    Outcome o;
    o.results = {{"trials", trials}, {"ratio_min", num(lo)}, {"ratio_max", num(hi)}};
    return o;
}

Outcome run_inequalities(const ExperimentConfig& c, Output& out) {
    const std::string kind = c.text("kind");
    std::vector<InequalityKind> kinds;
    if (kind == "all")
        kinds = {InequalityKind::algebra,  InequalityKind::gns,          InequalityKind::embedding,
                 InequalityKind::leibniz,  InequalityKind::data_estimates, InequalityKind::nonlinearity,
                 InequalityKind::e_norm_equivalence};
    else {
        try {
            kinds = {inequality_from_name(kind)};
        } catch (const ConfigError& e) {
            throw ConfigError("kind", e.what());
        }
    }
    EnsembleOptions eo;
    eo.dims = static_cast<int>(c.integer("n"));
    eo.modes = static_cast<int>(c.integer("N"));
    eo.period = 2.0 * std::numbers::pi * positive_number(c, "period");
    eo.trials = static_cast<int>(positive_int(c, "trials"));
    eo.seed = seed_of(c);
    eo.sigma = positive_number(c, "sigma");
    eo.s = c.number("s");
    eo.alpha = c.number("alpha");
    if (eo.alpha > 0.0) throw ConfigError("alpha", "must be <= 0");
    if (eo.dims < 1 || eo.dims > 3) throw ConfigError("n", "must be 1, 2 or 3");
    if (eo.modes < 4 || 2 * eo.modes > 1024 || eo.modes % 2) throw ConfigError("N", "must be even and in [4, 512]");
    std::vector<std::vector<std::string>> rows;
    json res = json::object();
    bool all_ok = true;
    for (auto k : kinds) {
        const auto r = run_inequality_ensemble(k, eo);
        Row row;
        row << r.name << r.trials << r.c_coarse << r.c_fine << r.c_min << r.drift << r.finite << r.stable
            << r.worst_balance_defect;
        rows.push_back(std::move(row.cells));
        res[r.name] = {{"c_coarse", num(r.c_coarse)}, {"c_fine", num(r.c_fine)}, {"c_min", num(r.c_min)},
                       {"drift", num(r.drift)},       {"finite", r.finite},       {"stable", r.stable},
                       {"worst_balance_defect", num(r.worst_balance_defect)}};
        all_ok = all_ok && r.stable;
    }
    out.csv("constants.csv",
            {"name", "trials", "c_coarse", "c_fine", "c_min", "drift", "finite", "stable", "balance_defect"}, rows);
    Outcome o;
    o.results = {{"ensembles", res}, {"all_stable", all_ok}};
    return o;
}

Outcome run_scaling_pipeline(const ExperimentConfig& c, Output& out) {
    const ModelParams p = model_of(c);
    const FrequencyGrid g = grid_of(c);
    const double alpha = c.number("alpha"), s = c.number("s");
    if (!(alpha < 0.0)) throw ConfigError("alpha", "must be < 0");
    const std::string cal_path = c.text("calibration");
    const Calibration cal = cal_path.empty() ? default_calibration() : load_calibration(cal_path);
    MildSolverConfig cfg;
    cfg.horizon = positive_number(c, "horizon");
    cfg.samples = static_cast<std::size_t>(positive_int(c, "samples", 16));
    cfg.validate();
    RandomFieldOptions ro;
    ro.bandlimit = positive_number(c, "bandlimit");
    ro.width = positive_number(c, "width");
    ro.amplitude = c.number("amplitude");
    if (!(ro.amplitude >= 0.0)) throw ConfigError("amplitude", "must be >= 0");
    ro.octant_radius = threshold_N0(p);
    const long long count = positive_int(c, "instances");
    const bool solve = c.flag("solve");
    std::vector<std::vector<std::string>> rows;
    bool all_met = true, all_conv = true;
    for (long long i = 0; i < count; ++i) {
        std::mt19937_64 rng(seed_of(c) + 104729ULL * static_cast<std::uint64_t>(i));
        LinearData d;
        d.w0 = random_field(g, rng, ro);
        d.w1 = random_field(g, rng, ro);
        d.w2 = random_field(g, rng, ro);
        const auto r = scaled_large_data_pipeline(g, d, alpha, s, p, cal.smallness(), cfg, solve);
        all_met = all_met && r.smallness_met && r.scaling_ok;
        if (solve) all_conv = all_conv && r.solved && r.solution.converged;
        Row row;
        row << i << r.data_norm << r.c_data << r.closed_form << r.lambda_formula << r.lambda << r.representable
            << r.scaled_norm << r.threshold << r.smallness_met << r.scaling_lhs << r.scaling_rhs << r.scaling_ok
            << r.alpha_after << (r.solved && r.solution.converged);
        rows.push_back(std::move(row.cells));
    }
    out.csv("instances.csv",
            {"instance", "data_norm", "c_data", "closed_form", "lambda_formula", "lambda", "representable",
             "scaled_norm", "threshold", "smallness_met", "scaling_lhs", "scaling_rhs", "scaling_ok", "alpha_after",
             "converged"},
            rows);
    Outcome o;
    o.results = {{"instances", count},
                 {"all_smallness_met", all_met},
                 {"all_converged", solve ? json(all_conv) : json(nullptr)},
                 {"C0", cal.C0},
                 {"C1", cal.C1},
                 {"C2", cal.C2}};
    if (solve && !all_conv) {
        o.exit_code = kExitNonConvergence;
        o.message = "at least one scaled solve did not converge";
    }
    return o;
}

Outcome run_calibrate(const ExperimentConfig& c, Output& out) {
    CalibrationOptions co;
    co.trials = static_cast<int>(positive_int(c, "trials"));
    co.seed = seed_of(c);
    co.safety = c.number("safety");
    co.alpha = c.number("alpha");
    co.s = c.number("s");
    co.modes = static_cast<int>(c.integer("N"));
    co.with_inequalities = c.flag("with_inequalities");
    if (co.modes < 4 || co.modes > 256 || co.modes % 2) throw ConfigError("N", "must be even and in [4, 256]");
    const Calibration cal = calibrate(co);
    save_calibration((out.dir() / "calibration.json").string(), cal);
    Outcome o;
    o.results = {{"C0", cal.C0},
                 {"C1", cal.C1},
                 {"C2", cal.C2},
                 {"equiv_band", {cal.equiv_lo, cal.equiv_hi}},
                 {"inequality_constants", cal.inequality_constants}};
    return o;
}

Outcome run_compare(const ExperimentConfig& c, Output& out) {
    const std::string a = c.text("a"), b = c.text("b");
    if (a.empty()) throw ConfigError("a", "path required");
    if (b.empty()) throw ConfigError("b", "path required");
    const double rtol = c.number("rtol"), atol = c.number("atol");
    if (!(rtol >= 0.0)) throw ConfigError("rtol", "must be >= 0");
    if (!(atol >= 0.0)) throw ConfigError("atol", "must be >= 0");
    const auto rep = compare_runs(a, b, rtol, atol);
    out.write_json("diff.json", to_json(rep));
    Outcome o;
    o.results = {{"scenario", rep.scenario},
                 {"config_equal", rep.config_equal},
                 {"numeric_diffs", rep.diffs.size()},
                 {"mismatched", rep.mismatched.size()},
                 {"within_tolerance", rep.within_tolerance()}};
    return o;
}

Outcome run_acceptance_scenario(const ExperimentConfig& c, Output& out) {
    std::vector<int> ids;
    const std::string spec = c.text("criteria");
    if (spec == "all") {
        for (int i = 1; i <= kCriterionCount; ++i) ids.push_back(i);
    } else {
        std::stringstream ss(spec);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            int id = 0;
            char tail = 0;
            if (std::sscanf(tok.c_str(), "%d%c", &id, &tail) != 1 || id < 1 || id > kCriterionCount)
                throw ConfigError("criteria", "expected ids in 1.." + std::to_string(kCriterionCount) + ", got '" +
                                                  tok + "'");
            ids.push_back(id);
        }
        if (ids.empty()) throw ConfigError("criteria", "empty list");
    }
    AcceptanceOptions ao;
    ao.seed = seed_of(c);
    ao.cli = c.text("cli");
    ao.work_dir = (out.dir() / "scratch").string();
    const auto results = run_acceptance(ids, ao);
    std::error_code ec;
    fs::remove_all(ao.work_dir, ec);
    json arr = json::array();
    std::string text;
    bool ok = true;
    for (const auto& r : results) {
        json m = json::object();
        for (const auto& [k, v] : r.metrics) m[k] = num(v);
        // Timings vary between runs; they go to the text report only.
        arr.push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"detail", r.detail}, {"metrics", m}});
        text += format_result_line(r) + "\n";
        ok = ok && r.passed;
    }
    {
        std::ofstream f(out.dir() / "acceptance.txt", std::ios::binary);
        f << text;
    }
    Outcome o;
    o.results = {{"criteria", arr}, {"all_passed", ok}};
    if (!ok) {
        o.exit_code = kExitCheckFailed;
        o.message = "some acceptance criteria failed";
    }
    std::printf("%s", text.c_str());
    return o;
}

json versions() {
    char eigen[32];
    std::snprintf(eigen, sizeof eigen, "%d.%d.%d", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION);
    return {{"jmgt", JMGT_VERSION},
            {"fftw", std::string(fftw_version)},
            {"eigen", eigen},
            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
            {"compiler", __VERSION__},
            {"manifest_format", kManifestFormat},
            {"csv_schema", kCsvSchemaVersion}};
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void collect_diffs(const json& a, const json& b, const std::string& path, double rtol, double atol,
                   CompareReport& rep) {
    if (a.is_object() && b.is_object()) {
        for (auto it = a.begin(); it != a.end(); ++it) {
            const std::string p = path + "/" + it.key();
            if (b.contains(it.key()))
                collect_diffs(*it, b.at(it.key()), p, rtol, atol, rep);
            else
                rep.mismatched.push_back(p + " (only in a)");
        }
        for (auto it = b.begin(); it != b.end(); ++it)
            if (!a.contains(it.key())) rep.mismatched.push_back(path + "/" + it.key() + " (only in b)");
        return;
    }
    if (a.is_array() && b.is_array()) {
        if (a.size() != b.size()) {
            rep.mismatched.push_back(path + " (array length " + std::to_string(a.size()) + " vs " +
                                     std::to_string(b.size()) + ")");
            return;
        }
        for (std::size_t i = 0; i < a.size(); ++i)
            collect_diffs(a[i], b[i], path + "/" + std::to_string(i), rtol, atol, rep);
        return;
    }
    if (a.is_number() && b.is_number() && !a.is_boolean() && !b.is_boolean()) {
        const double x = a.get<double>(), y = b.get<double>();
        if (x == y) return;
        FieldDiff d;
        d.path = path;
        d.a = x;
        d.b = y;
        d.abs_diff = std::abs(x - y);
        const double scale = std::max(std::abs(x), std::abs(y));
        d.rel_diff = scale > 0.0 ? d.abs_diff / scale : 0.0;
        d.within_tolerance = d.abs_diff <= atol + rtol * scale;
        rep.diffs.push_back(d);
        return;
    }
    if (a != b) rep.mismatched.push_back(path);
}

json read_manifest(const std::string& where, const char* field) {
    fs::path p(where);
    if (fs::is_directory(p)) p /= "manifest.json";
    std::ifstream in(p);
    if (!in) throw ConfigError(field, "cannot read " + p.string());
    try {
        json j;
        in >> j;
        if (!j.is_object() || !j.contains("scenario")) throw ConfigError(field, p.string() + " is not a manifest");
        return j;
    } catch (const json::exception& e) {
        throw ConfigError(field, p.string() + ": " + e.what());
    }
}

}  // namespace

// ---------------------------------------------------------------- public

const char* scenario_name(Scenario s) noexcept {
    for (const auto& e : kScenarios)
        if (e.id == s) return e.name;
    return "?";
}

Scenario scenario_from_name(const std::string& name) {
    for (const auto& e : kScenarios)
        if (name == e.name) return e.id;
    throw ConfigError("scenario", "unknown scenario '" + name + "'");
}

const std::vector<Scenario>& all_scenarios() {
    static const std::vector<Scenario> v = [] {
        std::vector<Scenario> out;
        for (const auto& e : kScenarios) out.push_back(e.id);
        return out;
    }();
    return v;
}

std::vector<OptionInfo> scenario_options(Scenario s) { return build_options(s); }

double ExperimentConfig::number(const std::string& key) const {
    if (!values.contains(key)) throw ConfigError(key, "not defined for this scenario");
    return values.at(key).get<double>();
}
long long ExperimentConfig::integer(const std::string& key) const {
    if (!values.contains(key)) throw ConfigError(key, "not defined for this scenario");
    return values.at(key).get<long long>();
}
std::string ExperimentConfig::text(const std::string& key) const {
    if (!values.contains(key)) throw ConfigError(key, "not defined for this scenario");
    return values.at(key).get<std::string>();
}
bool ExperimentConfig::flag(const std::string& key) const {
    if (!values.contains(key)) throw ConfigError(key, "not defined for this scenario");
    return values.at(key).get<bool>();
}

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot read " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config", path + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config", path + ": top level must be an object");
    return j;
}

ExperimentConfig resolve_config(Scenario s, const json& file, const std::map<std::string, std::string>& flags) {
    ExperimentConfig cfg;
    cfg.scenario = s;
    const auto options = scenario_options(s);
    auto find = [&](const std::string& key) -> const OptionInfo* {
        for (const auto& o : options)
            if (o.key == key) return &o;
        return nullptr;
    };
    cfg.values = json::object();
    for (const auto& o : options) cfg.values[o.key] = o.default_value;
    cfg.output_dir = std::string("out/") + scenario_name(s);

    if (!file.is_null()) {
        if (!file.is_object()) throw ConfigError("config", "top level must be an object");
        for (auto it = file.begin(); it != file.end(); ++it) {
            const std::string& k = it.key();
            if (k == "scenario") {
                if (!it->is_string() || scenario_from_name(it->get<std::string>()) != s)
                    throw ConfigError("scenario", "config file is for '" + it->dump() + "', not '" +
                                                      scenario_name(s) + "'");
            } else if (k == "output") {
                if (!it->is_string()) throw ConfigError("output", "expected string");
                cfg.output_dir = it->get<std::string>();
            } else if (k == "threads") {
                if (!it->is_number_integer()) throw ConfigError("threads", "expected integer");
                cfg.threads = it->get<int>();
            } else if (const OptionInfo* o = find(k)) {
                cfg.values[k] = coerce_json(*o, *it);
            } else {
                throw ConfigError(k, std::string("unknown key for scenario '") + scenario_name(s) + "'");
            }
        }
    }
    if (const char* env = std::getenv("JMGT_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
    if (const char* env = std::getenv("JMGT_THREADS"); env && *env) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (*end != '\0' || v < 0) throw ConfigError("JMGT_THREADS", std::string("expected integer >= 0, got '") + env + "'");
        cfg.threads = static_cast<int>(v);
    }
    for (const auto& [k, v] : flags) {
        if (k == "output") {
            cfg.output_dir = v;
        } else if (k == "threads") {
            char* end = nullptr;
            const long t = std::strtol(v.c_str(), &end, 10);
            if (v.empty() || *end != '\0') throw ConfigError("threads", "expected integer, got '" + v + "'");
            cfg.threads = static_cast<int>(t);
        } else if (const OptionInfo* o = find(k)) {
            cfg.values[k] = coerce_text(*o, v);
        } else {
            throw ConfigError(k, std::string("unknown option for scenario '") + scenario_name(s) + "'");
        }
    }
    if (cfg.threads < 0) throw ConfigError("threads", "must be >= 0");
    if (cfg.output_dir.empty()) throw ConfigError("output", "must not be empty");
    return cfg;
}

std::string config_hash(const json& config) {
    const std::string s = config.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
#ifdef _OPENMP
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif
    const auto t0 = std::chrono::steady_clock::now();
    const std::string started = utc_now();
    Output out(cfg.output_dir);
    Outcome o;
    switch (cfg.scenario) {
        case Scenario::roots: o = run_roots(cfg, out); break;
        case Scenario::kernels: o = run_kernels(cfg, out); break;
        case Scenario::linear_decay: o = run_linear_decay(cfg, out); break;
        case Scenario::simulate: o = run_simulate(cfg, out); break;
        case Scenario::nonlinear_decay: o = run_nonlinear_decay(cfg, out); break;
        case Scenario::norms: o = run_norms(cfg, out); break;
        case Scenario::inequalities: o = run_inequalities(cfg, out); break;
        case Scenario::scaling_pipeline: o = run_scaling_pipeline(cfg, out); break;
        case Scenario::calibrate: o = run_calibrate(cfg, out); break;
        case Scenario::compare: o = run_compare(cfg, out); break;
        case Scenario::acceptance: o = run_acceptance_scenario(cfg, out); break;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json schema = json::object();
    for (const auto& [name, cols] : out.schema()) schema[name] = cols;
    json manifest = {{"format", kManifestFormat},
                     {"scenario", scenario_name(cfg.scenario)},
                     {"config", cfg.values},
                     {"config_hash", config_hash(cfg.values)},
                     {"versions", versions()},
                     {"csv_schema", schema},
                     {"exit_code", o.exit_code},
                     {"results", o.results}};
    out.write_json("manifest.json", manifest);
    int threads = cfg.threads;
#ifdef _OPENMP
    if (threads == 0) threads = omp_get_max_threads();
#endif
    out.write_json("run_info.json",
                   {{"wall_time_seconds", wall}, {"threads", threads}, {"started_utc", started},
                    {"output_dir", fs::absolute(out.dir()).string()}});

    RunResult r;
    r.exit_code = o.exit_code;
    r.message = o.message;
    r.results = std::move(o.results);
    r.files = out.files();
    return r;
}

bool CompareReport::within_tolerance() const {
    if (!mismatched.empty()) return false;
    return std::all_of(diffs.begin(), diffs.end(), [](const FieldDiff& d) { return d.within_tolerance; });
}

CompareReport compare_runs(const std::string& manifest_a, const std::string& manifest_b, double rtol, double atol) {
    const json a = read_manifest(manifest_a, "a"), b = read_manifest(manifest_b, "b");
    CompareReport rep;
    rep.scenario = a.at("scenario").get<std::string>();
    if (a.at("scenario") != b.at("scenario"))
        throw ConfigError("b", "scenario mismatch: " + a.at("scenario").dump() + " vs " + b.at("scenario").dump());
    rep.config_equal = a.value("config", json()) == b.value("config", json());
    collect_diffs(a.value("results", json::object()), b.value("results", json::object()), "", rtol, atol, rep);
    return rep;
}

json to_json(const CompareReport& r) {
    json diffs = json::array();
    for (const auto& d : r.diffs)
        diffs.push_back({{"path", d.path},
                         {"a", d.a},
                         {"b", d.b},
                         {"abs_diff", d.abs_diff},
                         {"rel_diff", d.rel_diff},
                         {"within_tolerance", d.within_tolerance}});
    return {{"scenario", r.scenario},
            {"config_equal", r.config_equal},
            {"diffs", diffs},
            {"mismatched", r.mismatched},
            {"within_tolerance", r.within_tolerance()}};
}

}  // namespace jmgt
