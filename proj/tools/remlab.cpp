// remlab: command-line front end over the header-only library. Every
// subcommand stages its tables in memory, writes them atomically on success
// and records a manifest with per-file checksums; a failed run leaves no
// partial outputs behind.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "remlab/experiments.hpp"
#include "remlab/io.hpp"
#include "remlab/moments.hpp"
#include "remlab/quadrature.hpp"
#include "remlab/simulator.hpp"
#include "remlab/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace remlab;

namespace {

constexpr const char* kVersion = "1.0.0";

struct RunConfig {
    std::string subcommand;
    std::vector<double> betas{0.3};
    std::string regime_str = "SUBCRITICAL";
    std::vector<int> n_grid{16};
    std::string schedule_str = "power:0.25:1";
    std::vector<double> x_grid{0.0, 0.5, 1.0};
    std::vector<double> lambda_grid{-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};
    double delta = 0.3;
    long long replicas = 1000;
    uint64_t seed = 1;
    int workers = 1;
    std::string out_dir = "out";
    std::vector<std::string> formats{"csv", "json"};

    Regime regime() const {
        if (regime_str == "SUBCRITICAL") return Regime::Subcritical;
        if (regime_str == "CRITICAL") return Regime::Critical;
        throw std::domain_error("regime: must be SUBCRITICAL or CRITICAL");
    }

    ScalingSchedule schedule() const {
        ScalingSchedule s;
        std::istringstream in(schedule_str);
        std::string form, a, c;
        if (!std::getline(in, form, ':') || !std::getline(in, a, ':') || !std::getline(in, c))
            throw std::domain_error("schedule: expected <form>:<alpha>:<coef>");
        if (form == "power")
            s.form = ScalingSchedule::Form::PowerOfN;
        else if (form == "logpower")
            s.form = ScalingSchedule::Form::PowerOfLogN;
        else
            throw std::domain_error("schedule: form must be power or logpower");
        try {
            s.alpha = std::stod(a);
            s.coef = std::stod(c);
        } catch (const std::exception&) {
            throw std::domain_error("schedule: alpha/coef must be numeric");
        }
        s.validate();
        return s;
    }

    void validate() const {
        if (betas.empty()) throw std::domain_error("beta: grid must be non-empty");
        for (double b : betas)
            if (!(b >= 0)) throw std::domain_error("beta: must be nonnegative");
        if (n_grid.empty()) throw std::domain_error("n-grid: must be non-empty");
        for (int n : n_grid)
            if (n < 1 || n > kMaxN) throw std::domain_error("n-grid: N must be in [1, 34]");
        if (replicas < 0) throw std::domain_error("replicas: must be >= 0");
        if (workers < 1) throw std::domain_error("workers: must be >= 1");
        if (!(delta > 0)) throw std::domain_error("delta: must be positive");
        if (formats.empty()) throw std::domain_error("format: need at least one of csv,json");
        for (const auto& f : formats)
            if (f != "csv" && f != "json") throw std::domain_error("format: must be csv or json");
        (void)regime();
        (void)schedule();
    }

    bool wants(const std::string& f) const {
        return std::find(formats.begin(), formats.end(), f) != formats.end();
    }

    json to_json() const {
        return json{{"subcommand", subcommand}, {"beta", betas},
                    {"regime", regime_str},     {"n_grid", n_grid},
                    {"schedule", schedule_str}, {"x_grid", x_grid},
                    {"lambda_grid", lambda_grid}, {"delta", delta},
                    {"replicas", replicas},     {"seed", seed},
                    {"workers", workers},       {"out", out_dir},
                    {"format", formats}};
    }
};

std::string cell_to_csv(const CellValue& v) {
    if (std::holds_alternative<double>(v)) return format_double(std::get<double>(v));
    if (std::holds_alternative<long long>(v)) return format_int(std::get<long long>(v));
    if (std::holds_alternative<bool>(v)) return std::get<bool>(v) ? "true" : "false";
    return std::get<std::string>(v);
}

json cell_to_json(const CellValue& v) {
    if (std::holds_alternative<double>(v)) return std::get<double>(v);
    if (std::holds_alternative<long long>(v)) return std::get<long long>(v);
    if (std::holds_alternative<bool>(v)) return std::get<bool>(v);
    return std::get<std::string>(v);
}

std::string report_to_csv(const StudyReport& r) {
    std::string out;
    for (std::size_t i = 0; i < r.columns.size(); ++i) {
        if (i) out += ',';
        out += r.columns[i];
    }
    out += '\n';
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += cell_to_csv(row[i]);
        }
        out += '\n';
    }
    return out;
}

std::string report_to_json(const StudyReport& r) {
    json j{{"kind", r.kind}, {"seed", r.seed}, {"columns", r.columns}};
    j["rows"] = json::array();
    for (const auto& row : r.rows) {
        json jr = json::array();
        for (const auto& c : row) jr.push_back(cell_to_json(c));
        j["rows"].push_back(jr);
    }
    return j.dump(2) + "\n";
}

// All output files for one run, staged before anything touches the disk.
using Staged = std::map<std::string, std::string>;

void stage_report(Staged& files, const RunConfig& cfg, const std::string& name,
                  const StudyReport& rep) {
    if (cfg.wants("csv")) files[name + ".csv"] = report_to_csv(rep);
    if (cfg.wants("json")) files[name + ".json"] = report_to_json(rep);
}

// --- deterministic calculators ----------------------------------------------

void run_theory(const RunConfig& cfg, Staged& files) {
    StudyReport fe;
    fe.kind = "theory_free_energy";
    fe.columns = {"beta", "f_limit", "f_annealed"};
    for (double b : cfg.betas)
        fe.add_row({b, limiting_free_energy(b), annealed_free_energy(b)});

    StudyReport rate;
    rate.kind = "theory_ldp_rate";
    rate.columns = {"beta", "x", "finite", "rate"};
    for (double b : cfg.betas) {
        double f = limiting_free_energy(b);
        for (double d : cfg.x_grid) {
            for (int sgn : {1, -1}) {
                if (d == 0 && sgn < 0) continue;
                double x = f + sgn * d;
                ExtReal r = ldp_rate(b, x);
                rate.add_row({b, x, r.finite, r.finite ? r.v : 0.0});
            }
        }
    }

    StudyReport sc;
    sc.kind = "theory_scgf";
    sc.columns = {"beta", "regime", "lambda", "scgf_limit", "mdp_rate"};
    Regime reg = cfg.regime();
    RateFunctionKind kind = reg == Regime::Critical ? RateFunctionKind::MdpCritical
                                                    : RateFunctionKind::MdpGaussian;
    // the limiting SCGF and the scaling classification only exist up to
    // beta_crit; betas beyond that are simply absent from these tables
    auto covered = [&](double b) {
        return reg == Regime::Critical ? std::abs(b - kBetaCrit) <= 1e-12
                                       : b < kBetaCrit + 1e-12;
    };
    for (double b : cfg.betas) {
        if (!covered(b)) continue;
        auto lim = scgf_limit(b, reg);
        for (double l : cfg.lambda_grid)
            sc.add_row({b, std::string(cfg.regime_str), l, lim(l), mdp_rate(kind, l).v});
    }

    StudyReport cls;
    cls.kind = "theory_scaling";
    cls.columns = {"beta", "schedule", "regime", "scaling_class", "rate_kind"};
    for (double b : cfg.betas) {
        if (!covered(b)) continue;
        auto sclass = classify_scaling(cfg.schedule(), b, reg);
        cls.add_row({b, cfg.schedule_str, std::string(cfg.regime_str),
                     std::string(to_string(sclass.regime)), std::string(to_string(sclass.rate))});
    }

    stage_report(files, cfg, "theory_free_energy", fe);
    stage_report(files, cfg, "theory_ldp_rate", rate);
    stage_report(files, cfg, "theory_scgf", sc);
    stage_report(files, cfg, "theory_scaling", cls);
}

void run_moments(const RunConfig& cfg, Staged& files) {
    auto sched = cfg.schedule();
    StudyReport rep;
    rep.kind = "moments";
    rep.columns = {"beta", "n", "t", "c", "c_asymptotic", "m1", "m2", "m3abs",
                   "m1_scaled", "m3_scaled", "s2", "et2", "method", "fallback",
                   "rate_exact", "rate_predicted"};
    for (double b : cfg.betas) {
        for (int n : cfg.n_grid) {
            ModelParams p(b, n);
            double t = sched.t(n);
            auto spec = truncation_spec(p, t);
            auto m = truncated_moments(spec, MomentMethod::ClosedForm);
            auto [re, rp] = truncation_event_rate(spec);
            rep.add_row({b, static_cast<long long>(n), t, spec.c, spec.c_asymptotic,
                         m.m1, m.m2, m.m3abs, m.m1_scaled, m.m3_scaled, m.s2,
                         t_second_moment(p),
                         std::string(m.method == MomentMethod::ClosedForm ? "closed_form"
                                                                          : "quadrature"),
                         m.cancellation_fallback, re, rp});
        }
    }
    stage_report(files, cfg, "moments", rep);
}

void run_scgf(const RunConfig& cfg, Staged& files) {
    auto sched = cfg.schedule();
    Regime reg = cfg.regime();
    StudyReport rep;
    rep.kind = "scgf";
    rep.columns = {"beta", "n", "t", "lambda", "scgf_increment", "finite_scgf",
                   "chernoff_bound", "scgf_limit"};
    for (double b : cfg.betas) {
        auto lim = scgf_limit(b, reg);
        for (int n : cfg.n_grid) {
            ModelParams p(b, n);
            double t = sched.t(n);
            auto spec = truncation_spec(p, t);
            for (double l : cfg.lambda_grid)
                rep.add_row({b, static_cast<long long>(n), t, l, scgf_increment(spec, l),
                             finite_scgf(spec, l), chernoff_bound(spec, l), lim(l)});
        }
    }
    stage_report(files, cfg, "scgf", rep);
}

void run_simulate(const RunConfig& cfg, Staged& files) {
    ModelParams p(cfg.betas.front(), cfg.n_grid.front());
    double t = cfg.schedule().t(p.n);
    auto ds = run_replicas(p, t, cfg.replicas, RngSpec{cfg.seed}, cfg.workers);
    if (cfg.wants("csv")) files["simulate.csv"] = dataset_to_csv(ds);
    if (cfg.wants("json")) {
        json j{{"kind", "simulate"},
               {"beta", p.beta},
               {"n", p.n},
               {"t", t},
               {"seed", cfg.seed},
               {"replicas", cfg.replicas},
               {"summary",
                {{"count", ds.summary.count},
                 {"trunc_hits", ds.summary.trunc_hits},
                 {"f_n", {{"mean", ds.summary.f_n.mean}, {"variance", ds.summary.f_n.variance}}},
                 {"t_dev",
                  {{"mean", ds.summary.t_dev.mean}, {"variance", ds.summary.t_dev.variance}}},
                 {"w_log",
                  {{"mean", ds.summary.w_log.mean}, {"variance", ds.summary.w_log.variance}}},
                 {"w_linear",
                  {{"mean", ds.summary.w_linear.mean},
                   {"variance", ds.summary.w_linear.variance}}}}}};
        files["simulate.json"] = j.dump(2) + "\n";
    }
}

// --- Monte Carlo studies ----------------------------------------------------

void run_lln(const RunConfig& cfg, Staged& files) {
    stage_report(files, cfg, "lln",
                 lln_study(cfg.betas, cfg.n_grid, cfg.replicas, cfg.seed, cfg.workers));
}

void run_clt(const RunConfig& cfg, Staged& files) {
    stage_report(files, cfg, "clt",
                 clt_study(cfg.betas.front(), cfg.regime(), cfg.n_grid.front(), cfg.replicas,
                           cfg.seed, cfg.workers));
}

// per-N schedule evaluation glued onto the single-t study signature
void run_tails(const RunConfig& cfg, Staged& files) {
    auto sched = cfg.schedule();
    StudyReport all;
    for (int n : cfg.n_grid) {
        auto rep = tail_study(cfg.betas.front(), {n}, sched.t(n), cfg.x_grid, cfg.replicas,
                              cfg.seed, cfg.workers);
        if (all.columns.empty()) {
            all.kind = rep.kind;
            all.seed = rep.seed;
            all.columns = rep.columns;
        }
        for (auto& row : rep.rows) all.add_row(std::move(row));
    }
    stage_report(files, cfg, "tails", all);
}

void run_equiv(const RunConfig& cfg, Staged& files) {
    auto sched = cfg.schedule();
    StudyReport all;
    for (int n : cfg.n_grid) {
        auto rep = equivalence_study(cfg.betas.front(), {n}, sched.t(n), cfg.replicas,
                                     cfg.seed, cfg.workers);
        if (all.columns.empty()) {
            all.kind = rep.kind;
            all.seed = rep.seed;
            all.columns = rep.columns;
        }
        for (auto& row : rep.rows) all.add_row(std::move(row));
    }
    stage_report(files, cfg, "equiv", all);
}

void run_overscale(const RunConfig& cfg, Staged& files) {
    stage_report(files, cfg, "overscale",
                 overscaling_study(cfg.betas.front(), cfg.n_grid, cfg.replicas, cfg.seed,
                                   cfg.workers, cfg.schedule().gamma_exponent));
}

void run_ldp_check(const RunConfig& cfg, Staged& files) {
    stage_report(files, cfg, "ldp-check",
                 ldp_spot_check(cfg.betas.front(), cfg.n_grid.front(), cfg.delta, cfg.replicas,
                                cfg.seed, cfg.workers));
}

// --- config loading ---------------------------------------------------------

template <class T>
void from_config(const json& j, const char* key, T& target, bool flag_given) {
    if (flag_given) return;  // flags override the config file
    if (auto it = j.find(key); it != j.end()) target = it->get<T>();
}

void load_config_file(const std::string& path, const CLI::App& sub, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw std::domain_error("config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::domain_error(std::string("config: invalid JSON: ") + e.what());
    }
    auto given = [&](const char* name) {
        auto* opt = sub.get_option_no_throw(name);
        return opt != nullptr && opt->count() > 0;
    };
    if (j.contains("beta") && j["beta"].is_number()) j["beta"] = json::array({j["beta"]});
    from_config(j, "beta", cfg.betas, given("--beta"));
    from_config(j, "regime", cfg.regime_str, given("--regime"));
    from_config(j, "n_grid", cfg.n_grid, given("--n-grid"));
    from_config(j, "schedule", cfg.schedule_str, given("--schedule"));
    from_config(j, "x_grid", cfg.x_grid, given("--x-grid"));
    from_config(j, "lambda_grid", cfg.lambda_grid, given("--lambda-grid"));
    from_config(j, "delta", cfg.delta, given("--delta"));
    from_config(j, "replicas", cfg.replicas, given("--replicas"));
    from_config(j, "seed", cfg.seed, given("--seed"));
    from_config(j, "workers", cfg.workers, given("--workers"));
    from_config(j, "out", cfg.out_dir, given("--out"));
    from_config(j, "format", cfg.formats, given("--format"));
}

void write_outputs(const RunConfig& cfg, const Staged& files, double wall_ms) {
    fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    for (const auto& [name, content] : files) atomic_write(dir / name, content);

    json manifest{{"tool", "remlab"},
                  {"version", kVersion},
                  {"config", cfg.to_json()},
                  {"wall_time_ms", wall_ms},
                  {"files", json::object()}};
    for (const auto& [name, content] : files)
        manifest["files"][name] = {{"bytes", content.size()},
                                   {"fnv1a64", checksum_hex(content)}};
    atomic_write(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"verification laboratory for REM free-energy fluctuations"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;

    std::vector<CLI::App*> subs;
    for (const char* name : {"theory", "moments", "scgf", "simulate", "lln", "clt", "tails",
                             "equiv", "overscale", "ldp-check"}) {
        auto* s = app.add_subcommand(name);
        s->add_option("--config", config_path, "JSON config file; flags override it");
        s->add_option("--beta", cfg.betas, "beta grid")->delimiter(',');
        s->add_option("--regime", cfg.regime_str, "SUBCRITICAL or CRITICAL");
        s->add_option("--n-grid", cfg.n_grid, "system-size grid")->delimiter(',');
        s->add_option("--schedule", cfg.schedule_str,
                      "t_N rule: power:<alpha>:<coef> or logpower:<alpha>:<coef>");
        s->add_option("--x-grid", cfg.x_grid, "threshold grid")->delimiter(',');
        s->add_option("--lambda-grid", cfg.lambda_grid, "SCGF argument grid")->delimiter(',');
        s->add_option("--delta", cfg.delta, "LDP deviation size");
        s->add_option("--replicas", cfg.replicas, "Monte Carlo replica count");
        s->add_option("--seed", cfg.seed, "master seed");
        s->add_option("--workers", cfg.workers, "worker thread count");
        s->add_option("--out", cfg.out_dir, "output directory");
        s->add_option("--format", cfg.formats, "output formats: csv,json")->delimiter(',');
        subs.push_back(s);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    CLI::App* active = app.get_subcommands().front();
    cfg.subcommand = active->get_name();

    auto t0 = std::chrono::steady_clock::now();
    Staged files;
    try {
        if (!config_path.empty()) load_config_file(config_path, *active, cfg);
        cfg.validate();

        if (cfg.subcommand == "theory") run_theory(cfg, files);
        else if (cfg.subcommand == "moments") run_moments(cfg, files);
        else if (cfg.subcommand == "scgf") run_scgf(cfg, files);
        else if (cfg.subcommand == "simulate") run_simulate(cfg, files);
        else if (cfg.subcommand == "lln") run_lln(cfg, files);
        else if (cfg.subcommand == "clt") run_clt(cfg, files);
        else if (cfg.subcommand == "tails") run_tails(cfg, files);
        else if (cfg.subcommand == "equiv") run_equiv(cfg, files);
        else if (cfg.subcommand == "overscale") run_overscale(cfg, files);
        else if (cfg.subcommand == "ldp-check") run_ldp_check(cfg, files);
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "remlab: invalid configuration: %s\n", e.what());
        return 2;
    } catch (const QuadratureError& e) {
        std::fprintf(stderr, "remlab: numerical failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "remlab: numerical failure: %s\n", e.what());
        return 3;
    }
    double wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0).count();

    try {
        write_outputs(cfg, files, wall_ms);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "remlab: output error: %s\n", e.what());
        return 3;
    }
    return 0;
}
