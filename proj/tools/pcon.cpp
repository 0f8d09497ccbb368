// pcon: command-line front end for the pulse-coupled oscillator toolkit.

#include "pcon/io.hpp"
#include "pcon/isochronous.hpp"
#include "pcon/poincare.hpp"
#include "pcon/sweep.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <mutex>
#include <pthread.h>
#include <random>
#include <sstream>
#include <thread>
#include <unistd.h>

using namespace pcon;

namespace {

// ---- outputs and interrupts ------------------------------------------------

// Output files opened by the current command. On SIGINT every open file gets
// a FAILED marker appended before the process exits.
class Outputs
{
public:
    int open(const std::string& path)
    {
        std::lock_guard lock(mutex_);
        auto f = std::make_unique<std::ofstream>(path);
        if (!*f) {
            throw std::runtime_error("cannot open " + path + " for writing");
        }
        files_.push_back(std::move(f));
        paths_.push_back(path);
        return static_cast<int>(files_.size()) - 1;
    }

    void write(int id, const std::string& text)
    {
        std::lock_guard lock(mutex_);
        *files_[id] << text;
        files_[id]->flush();
    }

    void fail_all(const std::string& why)
    {
        std::lock_guard lock(mutex_);
        for (auto& f : files_) {
            *f << "# FAILED: " << why << '\n';
            f->flush();
        }
    }

    [[nodiscard]] const std::vector<std::string>& paths() const { return paths_; }

private:
    std::mutex mutex_;
    std::vector<std::unique_ptr<std::ofstream>> files_;
    std::vector<std::string> paths_;
};

Outputs g_outputs;

void start_interrupt_watcher()
{
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);
    std::thread([set] {
        int sig = 0;
        sigwait(&set, &sig);
        g_outputs.fail_all("interrupted");
        std::cerr << "FAILED: interrupted, partial outputs flushed\n";
        std::cout.flush();
        _exit(130);
    }).detach();
}

// ---- config ----------------------------------------------------------------

// Flags override the JSON config file. Each bound flag copies its value into
// the effective config only when it was given on the command line.
class Config
{
public:
    template <class T>
    CLI::Option* bind(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help)
    {
        auto storage = std::make_shared<T>();
        auto* opt = app->add_option(flag, *storage, help);
        appliers_.push_back([opt, key, storage](Json& j) {
            if (opt->count() > 0) {
                j[key] = *storage;
            }
        });
        return opt;
    }

    CLI::Option* bind_flag(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help)
    {
        auto* opt = app->add_flag(flag, help);
        appliers_.push_back([opt, key](Json& j) {
            if (opt->count() > 0) {
                j[key] = true;
            }
        });
        return opt;
    }

    void load(const std::string& path)
    {
        std::ifstream in(path);
        if (!in) {
            throw std::runtime_error("cannot read config file " + path);
        }
        file_ = Json::parse(in);
        if (!file_.is_object()) {
            throw std::runtime_error("config file must hold a JSON object");
        }
    }

    Json effective() const
    {
        Json j = file_.is_object() ? file_ : Json::object();
        for (const auto& apply : appliers_) {
            apply(j);
        }
        return j;
    }

private:
    Json file_;
    std::vector<std::function<void(Json&)>> appliers_;
};

template <class T>
T get(const Json& j, const std::string& key, T fallback)
{
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

int default_threads()
{
    if (const char* env = std::getenv("PCON_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) {
            return v;
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

Json with_defaults(Json j)
{
    auto put = [&j](const char* key, Json v) {
        if (!j.contains(key)) {
            j[key] = std::move(v);
        }
    };
    put("b", 3.0);
    put("epsilon", 0.58);
    put("n", 3);
    put("tau", 0.58);
    put("seed", 1);
    put("threads", default_threads());
    return j;
}

ModelParams params_of(const Json& cfg)
{
    return params_from_json(cfg);
}

// ---- state selection -------------------------------------------------------

NetworkState state_of(const Json& cfg, const ModelParams& params)
{
    if (cfg.contains("state")) {
        const auto& s = cfg.at("state");
        if (s.is_string()) {
            std::string text = s.get<std::string>();
            if (!text.empty() && text.front() == '@') {
                std::ifstream in(text.substr(1));
                if (!in) {
                    throw std::runtime_error("cannot read state file " + text.substr(1));
                }
                return state_from_json(Json::parse(in));
            }
            return state_from_json(Json::parse(text));
        }
        return state_from_json(s);
    }
    const auto kind = parse_region_kind(get<std::string>(cfg, "kind", "ir4"));
    std::vector<double> sigma = cfg.contains("sigma") ? cfg.at("sigma").get<std::vector<double>>()
                                                      : region_center(kind, params.tau());
    return section_embedding(kind, sigma, params);
}

void add_state_options(Config& config, CLI::App* app)
{
    config.bind<std::string>(app, "--state", "state",
                             "initial state as JSON {\"phases\":[..],\"ftds\":[[..],..]} or @file");
    config.bind<std::string>(app, "--kind", "kind", "region whose embedding S(sigma) gives the state (ir3|ir4|ir5)");
    config.bind<std::vector<double>>(app, "--sigma", "sigma", "region point, comma separated; default: center")
        ->delimiter(',');
}

void add_model_options(Config& config, CLI::App* app)
{
    config.bind<double>(app, "--b", "b", "state function curvature (default 3)");
    config.bind<double>(app, "--eps", "epsilon", "coupling strength (default 0.58)");
    config.bind<int>(app, "--n", "n", "number of oscillators (default 3)");
    config.bind<double>(app, "--tau", "tau", "pulse delay (default 0.58)");
    config.bind<int>(app, "--threads", "threads", "worker threads (default: PCON_THREADS or all cores)");
    config.bind<std::uint64_t>(app, "--seed", "seed", "random seed (default 1)");
    config.bind<std::string>(app, "--out", "out", "output path prefix; stdout if omitted");
}

std::string header_text(const std::string& command, const Json& cfg, const std::string& prefix = "# ")
{
    std::ostringstream os;
    write_header(os, make_header(command, cfg, get<std::uint64_t>(cfg, "seed", 1)), prefix);
    return os.str();
}

// Writes text to "<out><suffix>" when --out is set, to stdout otherwise.
void emit(const Json& cfg, const std::string& suffix, const std::string& text)
{
    if (cfg.contains("out")) {
        const int id = g_outputs.open(cfg.at("out").get<std::string>() + suffix);
        g_outputs.write(id, text);
    } else {
        std::cout << text;
    }
}

// ---- commands --------------------------------------------------------------

int cmd_simulate(const Json& cfg)
{
    const auto params = params_of(cfg);
    const auto state = state_of(cfg, params);
    const double horizon = get<double>(cfg, "horizon", 3.0 * params.tau());
    Engine engine(state, params);
    const auto trace = engine.simulate(horizon);

    std::ostringstream text;
    text << header_text("simulate", cfg);
    write_trace_text(text, trace);
    std::ostringstream jsonl;
    jsonl << Json{{"header", to_json(make_header("simulate", cfg, get<std::uint64_t>(cfg, "seed", 1)))}}.dump()
          << '\n';
    write_trace_jsonl(jsonl, trace);

    if (cfg.contains("out")) {
        emit(cfg, ".trace.txt", text.str());
        emit(cfg, ".trace.jsonl", jsonl.str());
    } else if (get<bool>(cfg, "jsonl", false)) {
        std::cout << jsonl.str();
    } else {
        std::cout << text.str();
    }
    return 0;
}

int cmd_poincare(const Json& cfg)
{
    const auto params = params_of(cfg);
    const auto state = state_of(cfg, params);
    PeriodicityOptions popt;
    popt.max_iter = get<int>(cfg, "max_iter", 10000);
    popt.tol = get<double>(cfg, "tol", 1e-9);

    Json out{{"header", to_json(make_header("poincare", cfg, get<std::uint64_t>(cfg, "seed", 1)))},
             {"initial_state", to_json(state)}};
    const int returns = get<int>(cfg, "returns", 0);
    if (returns > 0) {
        Json seq = Json::array();
        SectionState s = state;
        for (int k = 0; k < returns; ++k) {
            auto r = poincare_map(s, params);
            seq.push_back(Json{{"return_time", r.return_time}, {"state", to_json(r.state)}});
            s = std::move(r.state);
        }
        out["returns"] = seq;
    }
    const auto result = detect_periodicity(state, params, popt);
    if (result) {
        out["periodicity"] = to_json(*result);
        out["signature"] = to_json(pulse_signature(*result, params));
    } else {
        out["periodicity"] = nullptr;
    }
    emit(cfg, ".poincare.json", out.dump(2) + "\n");
    if (!result) {
        std::cerr << "not periodic within " << popt.max_iter << " returns\n";
        return 1;
    }
    return 0;
}

int cmd_scan_phases(const Json& cfg)
{
    const auto params = params_of(cfg);
    PhaseScanOptions opt;
    opt.step = get<double>(cfg, "step", 0.01);
    opt.max_iter = get<int>(cfg, "max_iter", 10000);
    opt.tol = get<double>(cfg, "tol", 1e-9);
    opt.threads = get<int>(cfg, "threads", 1);

    Json full = cfg;
    full["step"] = opt.step;
    full["max_iter"] = opt.max_iter;
    full["tol"] = opt.tol;

    int csv = -1;
    const bool to_files = cfg.contains("out");
    const std::string prefix = to_files ? cfg.at("out").get<std::string>() : "";
    if (to_files) {
        csv = g_outputs.open(prefix + ".csv");
        g_outputs.write(csv, header_text("scan phases", full));
    }
    const auto scan = phase_scan(params, opt);

    std::ostringstream body;
    write_scan_csv(body, scan);
    std::map<int, int> hist;
    for (const auto& r : scan.records) {
        ++hist[r.poincare_period];
    }
    if (to_files) {
        g_outputs.write(csv, body.str());
        Json records = Json::array();
        for (const auto& r : scan.records) {
            records.push_back(to_json(r));
        }
        Json sigs = Json::array();
        for (const auto& s : scan.signatures) {
            sigs.push_back(to_json(s));
        }
        Json doc{{"header", to_json(make_header("scan phases", full, get<std::uint64_t>(cfg, "seed", 1)))},
                 {"signatures", sigs},
                 {"records", records}};
        emit(cfg, ".json", doc.dump() + "\n");
        emit(cfg, ".gp", gnuplot_scan_script(prefix + ".csv", prefix + ".png"));
    } else {
        std::cout << header_text("scan phases", full) << body.str();
    }
    std::cerr << "scanned " << scan.records.size() << " orbits, " << scan.not_periodic << " not periodic, "
              << scan.signatures.size() << " signature classes\n";
    for (const auto& [tp, count] : hist) {
        std::cerr << "  T_P " << (tp < 0 ? std::string("none") : std::to_string(tp)) << ": " << count << '\n';
    }
    return 0;
}

std::pair<int, int> parse_grid(const std::string& text)
{
    const auto x = text.find('x');
    if (x == std::string::npos) {
        const int n = std::stoi(text);
        return {n, n};
    }
    return {std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
}

int cmd_scan_params(const Json& cfg)
{
    ParamScanOptions opt;
    const auto [ne, nt] = parse_grid(get<std::string>(cfg, "grid", "100x100"));
    opt.eps_points = ne;
    opt.tau_points = nt;
    opt.b = get<double>(cfg, "b", 3.0);
    opt.volumes = get<bool>(cfg, "volumes", false);
    opt.volume_samples = get<std::int64_t>(cfg, "samples", 100000);
    opt.seed = get<std::uint64_t>(cfg, "seed", 1);
    opt.threads = get<int>(cfg, "threads", 1);
    if (cfg.contains("kinds")) {
        opt.kinds.clear();
        for (const auto& k : cfg.at("kinds").get<std::vector<std::string>>()) {
            opt.kinds.push_back(parse_region_kind(k));
        }
    }
    const auto records = param_scan(opt);

    std::ostringstream body;
    body << header_text("scan params", cfg);
    write_param_csv(body, records);
    emit(cfg, ".csv", body.str());
    if (cfg.contains("out")) {
        const std::string prefix = cfg.at("out").get<std::string>();
        std::string scripts;
        for (std::size_t i = 0; i < opt.kinds.size(); ++i) {
            if (opt.kinds.size() == 3) {
                scripts += gnuplot_param_script(prefix + ".csv", prefix + "_" + std::string(to_string(opt.kinds[i])) +
                                                                     (opt.volumes ? "_volume.png" : "_exists.png"),
                                                opt.kinds[i], opt.volumes);
            }
        }
        if (!scripts.empty()) {
            emit(cfg, ".gp", scripts);
        }
    }
    int mismatches = 0;
    for (const auto& r : records) {
        for (const auto& c : r.regions) {
            mismatches += c.exists != c.center_member ? 1 : 0;
        }
    }
    std::cerr << "grid " << ne << "x" << nt << ", exists/center mismatches: " << mismatches << '\n';
    return mismatches == 0 ? 0 : 1;
}

// Three binomial standard errors under the exact volume.
bool volumes_agree(const VolumeReport& exact, const VolumeReport& mc, double& se)
{
    const double p = std::clamp(exact.volume / mc.simplex_volume, 0.0, 1.0);
    se = mc.simplex_volume * std::sqrt(p * (1.0 - p) / static_cast<double>(mc.samples));
    return std::abs(exact.volume - mc.volume) <= 3.0 * se + 1e-15;
}

int cmd_region(const std::string& sub, const Json& cfg)
{
    const auto params = params_of(cfg);
    const auto kind = parse_region_kind(get<std::string>(cfg, "kind", "ir4"));
    const auto spec = region_spec(kind, params);
    const auto seed = get<std::uint64_t>(cfg, "seed", 1);

    if (sub == "exists") {
        const bool ok = region_exists(kind, params);
        Json out{{"kind", std::string(to_string(kind))},
                 {"params", to_json(params)},
                 {"existence_value", existence_functional(kind, params)},
                 {"lower", firing_threshold(params, 1)},
                 {"upper", 1.0},
                 {"exists", ok}};
        std::cout << (ok ? "true" : "false") << '\n';
        if (cfg.contains("out")) {
            emit(cfg, ".exists.json", out.dump(2) + "\n");
        } else {
            std::cerr << out.dump() << '\n';
        }
        return 0;
    }
    if (sub == "member") {
        if (!cfg.contains("sigma")) {
            throw CLI::ValidationError("--sigma", "region member needs --sigma");
        }
        const auto sigma = cfg.at("sigma").get<std::vector<double>>();
        const bool in = membership(spec, sigma);
        Json values = Json::array();
        for (const auto& f : spec.functionals) {
            values.push_back(Json{{"label", f.label}, {"value", f.form(sigma)}, {"lower", f.lower}, {"upper", f.upper}});
        }
        std::cout << (in ? "true" : "false") << '\n';
        std::cerr << Json{{"sigma", sigma}, {"functionals", values}}.dump() << '\n';
        return 0;
    }
    if (sub == "volume") {
        const std::string method = get<std::string>(cfg, "method", spec.dim <= 3 ? "exact" : "montecarlo");
        const auto samples = get<std::int64_t>(cfg, "samples", 1000000);
        const int threads = get<int>(cfg, "threads", 1);
        Json out{{"header", to_json(make_header("region volume", cfg, seed))},
                 {"kind", std::string(to_string(kind))},
                 {"spec", to_json(spec)}};
        int code = 0;
        if (method == "exact") {
            out["exact"] = to_json(region_volume_exact(spec));
        } else if (method == "montecarlo") {
            out["montecarlo"] = to_json(region_volume_montecarlo(spec, samples, seed, threads));
        } else if (method == "both") {
            const auto ex = region_volume_exact(spec);
            const auto mc = region_volume_montecarlo(spec, samples, seed, threads);
            double se = 0.0;
            const bool agree = volumes_agree(ex, mc, se);
            out["exact"] = to_json(ex);
            out["montecarlo"] = to_json(mc);
            out["agreement"] = Json{{"difference", mc.volume - ex.volume}, {"std_error_at_exact", se},
                                    {"within_3_se", agree}};
            std::cout << (agree ? "PASS" : "FAIL") << " exact " << format_double(ex.volume) << " montecarlo "
                      << format_double(mc.volume) << " se " << format_double(se) << '\n';
            code = agree ? 0 : 1;
        } else {
            throw CLI::ValidationError("--method", "expected exact, montecarlo or both");
        }
        emit(cfg, ".volume.json", out.dump(2) + "\n");
        return code;
    }
    if (sub == "sample" || sub == "project") {
        const int count = get<int>(cfg, "count", 1000);
        std::ostringstream body;
        body << header_text("region " + sub, cfg);
        if (sub == "sample") {
            write_points_csv(body, spec.labels, sample_interior(spec, count, seed));
        } else {
            std::vector<std::vector<double>> rows;
            for (const auto& p : analytic_projection(kind, params, count, seed)) {
                rows.push_back({p[0], p[1]});
            }
            write_points_csv(body, {"theta1", "theta2"}, rows);
        }
        emit(cfg, "." + sub + ".csv", body.str());
        return 0;
    }
    throw CLI::ValidationError("region", "unknown subcommand " + sub);
}

// ---- verify ----------------------------------------------------------------

struct CheckLog
{
    int failures = 0;
    Json checks = Json::array();

    void record(const std::string& name, bool ok, const std::string& detail)
    {
        std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
        checks.push_back(Json{{"check", name}, {"pass", ok}, {"detail", detail}});
        failures += ok ? 0 : 1;
    }
};

double state_distance(const NetworkState& a, const NetworkState& b)
{
    if (a.phases.size() != b.phases.size() || a.ftds.size() != b.ftds.size()) {
        return std::numeric_limits<double>::infinity();
    }
    double d = 0.0;
    for (std::size_t i = 0; i < a.phases.size(); ++i) {
        d = std::max(d, std::abs(a.phases[i] - b.phases[i]));
        if (a.ftds[i].size() != b.ftds[i].size()) {
            return std::numeric_limits<double>::infinity();
        }
        for (std::size_t k = 0; k < a.ftds[i].size(); ++k) {
            d = std::max(d, std::abs(a.ftds[i][k] - b.ftds[i][k]));
        }
    }
    return d;
}

void verify_ir4(const ModelParams& params, int samples, std::uint64_t seed, CheckLog& log)
{
    const double tau = params.tau();
    const auto spec = ir4_spec(params);

    double worst = 0.0;
    for (const auto& s : sample_interior(spec, samples, seed)) {
        const Sigma3 sigma{s[0], s[1], s[2]};
        const auto back = poincare_map(section_embedding(RegionKind::IR4, s, params), params);
        worst = std::max(worst, state_distance(back.state,
                                               section_embedding(RegionKind::IR4, g_map(sigma, tau), params)));
    }
    log.record("intertwining", worst <= 1e-9,
               std::to_string(samples) + " samples, max |mu(S(s)) - S(g(s))| = " + format_double(worst));

    const auto alg = g_algebra(tau);
    IntMatrix3 id{};
    for (int i = 0; i < 3; ++i) {
        id[i][i] = 1;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    double g4 = 0.0;
    for (int k = 0; k < 100000; ++k) {
        const Sigma3 x{u(rng), u(rng), u(rng)};
        auto y = x;
        for (int r = 0; r < 4; ++r) {
            y = g_map(y, tau);
        }
        for (int c = 0; c < 3; ++c) {
            g4 = std::max(g4, std::abs(y[c] - x[c]));
        }
    }
    const auto gc = g_map(alg.center, tau);
    double fix = 0.0;
    double two = 0.0;
    for (int c = 0; c < 3; ++c) {
        fix = std::max(fix, std::abs(gc[c] - alg.center[c]));
    }
    for (int k = 0; k < 100; ++k) {
        const double t = u(rng) * tau;
        const Sigma3 x{alg.center[0], alg.center[1] + t, alg.center[2] + t};
        const auto y = g_map(g_map(x, tau), tau);
        for (int c = 0; c < 3; ++c) {
            two = std::max(two, std::abs(y[c] - x[c]));
        }
    }
    const bool alg_ok = matrix_power(alg.linear, 4) == id && g4 <= 1e-12 && fix <= 1e-12 && two <= 1e-12;
    log.record("g-algebra", alg_ok,
               "L^4 = I, max|g^4(s) - s| = " + format_double(g4) + ", |g(s*) - s*| = " + format_double(fix) +
                   ", max|g^2 - id| on s* + t(0,1,1) = " + format_double(two));

    const auto probe_sigma = sample_interior(spec, 1, seed + 7, 1e-3);
    const Sigma3 ps{probe_sigma[0][0], probe_sigma[0][1], probe_sigma[0][2]};
    const auto st = stability_probe(params, ps, 1e-4, 1e-4, 100, seed);
    log.record("stability", st.ok(),
               std::to_string(st.accepted) + " accepted, " + std::to_string(st.refused) + " refused, " +
                   std::to_string(st.counterexamples.size()) + " counterexamples, max error " +
                   format_double(st.max_error));
}

void verify_oracle(RegionKind kind, const ModelParams& params, int samples, std::uint64_t seed, CheckLog& log,
                   Json& reports)
{
    const auto rep = region_oracle(kind, params, samples, seed);
    reports.push_back(to_json(rep));
    std::string hist;
    for (const auto& [tp, c] : rep.period_histogram) {
        hist += " T_P=" + std::to_string(tp) + ":" + std::to_string(c);
    }
    log.record(std::string("oracle-") + std::string(to_string(kind)), rep.ok(),
               std::to_string(rep.counterexamples.size()) + " counterexamples," + hist);
}

int cmd_verify(const Json& cfg)
{
    const auto params = params_of(cfg);
    const std::string suite = get<std::string>(cfg, "suite", "ir4");
    const int samples = get<int>(cfg, "samples", 1000);
    const auto seed = get<std::uint64_t>(cfg, "seed", 1);
    if (suite != "ir3" && suite != "ir4" && suite != "ir5" && suite != "all") {
        throw CLI::ValidationError("--suite", "expected ir3, ir4, ir5 or all");
    }

    int report_id = -1;
    if (cfg.contains("out")) {
        report_id = g_outputs.open(cfg.at("out").get<std::string>() + ".verify.json");
    }
    std::cout << header_text("verify", cfg);
    CheckLog log;
    Json reports = Json::array();
    if (suite == "ir4" || suite == "all") {
        if (!exists_ir4(params)) {
            log.record("exists-ir4", false, "IR4 is empty at these parameters");
        } else {
            verify_ir4(params, samples, seed, log);
            verify_oracle(RegionKind::IR4, params, samples, seed, log, reports);
        }
    }
    for (auto kind : {RegionKind::IR3, RegionKind::IR5}) {
        if (suite != std::string(to_string(kind)) && suite != "all") {
            continue;
        }
        if (!region_exists(kind, params)) {
            log.record("exists-" + std::string(to_string(kind)), false, "region is empty at these parameters");
            continue;
        }
        verify_oracle(kind, params, samples, seed, log, reports);
    }
    std::cout << (log.failures == 0 ? "ALL PASS" : "FAILED: " + std::to_string(log.failures) + " check(s)")
              << std::endl;
    if (report_id >= 0) {
        Json doc{{"header", to_json(make_header("verify", cfg, seed))},
                 {"checks", log.checks},
                 {"oracles", reports},
                 {"pass", log.failures == 0}};
        g_outputs.write(report_id, doc.dump(2) + "\n");
    }
    return log.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
    start_interrupt_watcher();

    CLI::App app{"Pulse-coupled oscillator networks with delay: simulation, Poincare analysis and isochronous regions"};
    app.set_version_flag("--version", std::string("pcon ") + kToolVersion);
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file; flags override its keys")->check(CLI::ExistingFile);

    Config config;

    auto* simulate = app.add_subcommand("simulate", "event trace from an initial state");
    add_model_options(config, simulate);
    add_state_options(config, simulate);
    config.bind<double>(simulate, "--horizon", "horizon", "simulated time (default 3 tau)");
    config.bind_flag(simulate, "--jsonl", "jsonl", "print JSON lines instead of text on stdout");

    auto* poincare = app.add_subcommand("poincare", "section returns and periodicity of an orbit");
    add_model_options(config, poincare);
    add_state_options(config, poincare);
    config.bind<int>(poincare, "--returns", "returns", "also list this many section returns");
    config.bind<int>(poincare, "--max-iter", "max_iter", "returns before giving up (default 10000)");
    config.bind<double>(poincare, "--tol", "tol", "state matching tolerance (default 1e-9)");

    auto* scan = app.add_subcommand("scan", "initial-condition and parameter scans");
    scan->require_subcommand(1);
    auto* scan_phases = scan->add_subcommand("phases", "periodicity over the (theta1, theta2) grid");
    add_model_options(config, scan_phases);
    config.bind<double>(scan_phases, "--step", "step", "grid step (default 0.01)");
    config.bind<int>(scan_phases, "--max-iter", "max_iter", "returns before declaring not periodic (default 10000)");
    config.bind<double>(scan_phases, "--tol", "tol", "state matching tolerance (default 1e-9)");
    auto* scan_params = scan->add_subcommand("params", "region existence (and volume) over the (eps, tau) grid");
    add_model_options(config, scan_params);
    config.bind<std::string>(scan_params, "--grid", "grid", "points per axis, e.g. 100x100");
    config.bind<std::vector<std::string>>(scan_params, "--kind", "kinds", "regions to map (repeatable)");
    config.bind_flag(scan_params, "--volumes", "volumes", "also compute region volumes");
    config.bind<std::int64_t>(scan_params, "--samples", "samples", "Monte Carlo budget for ir5 volumes");

    auto* region = app.add_subcommand("region", "isochronous region queries");
    region->require_subcommand(1);
    std::map<std::string, CLI::App*> region_subs;
    for (const auto* name : {"exists", "member", "volume", "sample", "project"}) {
        auto* sub = region->add_subcommand(name);
        add_model_options(config, sub);
        config.bind<std::string>(sub, "--kind", "kind", "ir3, ir4 or ir5 (default ir4)");
        region_subs[name] = sub;
    }
    region_subs["exists"]->description("closed-form existence inequality");
    region_subs["member"]->description("membership of a sigma point");
    config.bind<std::vector<double>>(region_subs["member"], "--sigma", "sigma", "sigma point, comma separated")
        ->delimiter(',');
    region_subs["volume"]->description("region volume, exact or Monte Carlo");
    config.bind<std::string>(region_subs["volume"], "--method", "method", "exact, montecarlo or both");
    config.bind<std::int64_t>(region_subs["volume"], "--samples", "samples", "Monte Carlo samples (default 1e6)");
    region_subs["sample"]->description("uniform interior sigma points");
    config.bind<int>(region_subs["sample"], "--count", "count", "number of points (default 1000)");
    region_subs["project"]->description("analytic phase projection of S(Omega)");
    config.bind<int>(region_subs["project"], "--count", "count", "number of points (default 1000)");

    auto* verify = app.add_subcommand("verify", "oracle suite; exit status 0 iff every check passes");
    add_model_options(config, verify);
    config.bind<std::string>(verify, "--suite", "suite", "ir3, ir4, ir5 or all (default ir4)");
    config.bind<int>(verify, "--samples", "samples", "samples per oracle (default 1000)");

    try {
        app.parse(argc, argv);
        if (!config_path.empty()) {
            config.load(config_path);
        }
        const Json cfg = with_defaults(config.effective());
        if (simulate->parsed()) {
            return cmd_simulate(cfg);
        }
        if (poincare->parsed()) {
            return cmd_poincare(cfg);
        }
        if (scan_phases->parsed()) {
            return cmd_scan_phases(cfg);
        }
        if (scan_params->parsed()) {
            return cmd_scan_params(cfg);
        }
        for (const auto& [name, sub] : region_subs) {
            if (sub->parsed()) {
                return cmd_region(name, cfg);
            }
        }
        if (verify->parsed()) {
            return cmd_verify(cfg);
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
