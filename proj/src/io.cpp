#include "pcon/io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pcon {

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Json to_json(const ModelParams& params)
{
    return Json{{"b", params.b()}, {"epsilon", params.epsilon()}, {"n", params.n()}, {"tau", params.tau()}};
}

ModelParams params_from_json(const Json& j)
{
    return ModelParams(j.value("b", 3.0), j.at("epsilon").get<double>(), j.value("n", 3), j.at("tau").get<double>());
}

Json to_json(const NetworkState& state)
{
    return Json{{"phases", state.phases}, {"ftds", state.ftds}};
}

NetworkState state_from_json(const Json& j)
{
    NetworkState s;
    s.phases = j.at("phases").get<std::vector<double>>();
    s.ftds = j.at("ftds").get<std::vector<std::vector<double>>>();
    canonicalize(s);
    return s;
}

namespace {

std::vector<int> one_based(const std::vector<int>& v)
{
    std::vector<int> out(v);
    for (auto& x : out) {
        ++x;
    }
    return out;
}

}  // namespace

Json to_json(const TraceEvent& event)
{
    if (event.kind == EventKind::Fire) {
        return Json{{"kind", "F"}, {"t", event.time}, {"oscillator", event.oscillators.front() + 1}};
    }
    return Json{{"kind", "P"},
                {"t", event.time},
                {"recipients", one_based(event.oscillators)},
                {"multiplicity", event.multiplicity},
                {"senders", one_based(event.senders)}};
}

Json to_json(const PeriodicityResult& result)
{
    Json cycle = Json::array();
    for (const auto& s : result.cycle) {
        cycle.push_back(to_json(s));
    }
    return Json{{"transient_iters", result.transient_iters},
                {"poincare_period", result.poincare_period},
                {"orbit_period", result.orbit_period},
                {"periodic_state", to_json(result.periodic_state)},
                {"return_times", result.return_times},
                {"cycle", cycle}};
}

Json to_json(const PulseSignature& signature)
{
    Json rec = Json::array();
    for (const auto& r : signature.receptions) {
        rec.push_back(Json{{"recipient", r.recipient + 1}, {"multiplicity", r.multiplicity}, {"offset", r.offset}});
    }
    return Json{{"period", signature.period}, {"receptions", rec}};
}

Json to_json(const RegionSpec& spec)
{
    Json orderings = Json::array();
    for (const auto& o : spec.orderings) {
        orderings.push_back(Json{{"coeffs", o.coeffs}, {"constant", o.constant}, {"relation", "> 0"}});
    }
    Json functionals = Json::array();
    for (const auto& f : spec.functionals) {
        functionals.push_back(Json{{"label", f.label},
                                   {"coeffs", f.form.coeffs},
                                   {"constant", f.form.constant},
                                   {"lower", f.lower},
                                   {"upper", f.upper}});
    }
    return Json{{"kind", std::string(to_string(spec.kind))},
                {"dim", spec.dim},
                {"tau", spec.tau},
                {"variables", spec.labels},
                {"bound_tol", kBoundTol},
                {"orderings", orderings},
                {"functionals", functionals}};
}

Json to_json(const VolumeReport& report)
{
    Json j{{"method", std::string(to_string(report.method))},
           {"volume", report.volume},
           {"std_error", report.std_error},
           {"status", std::string(to_string(report.status))},
           {"simplex_volume", report.simplex_volume}};
    if (report.method == VolumeMethod::MonteCarlo) {
        j["samples"] = report.samples;
        j["hits"] = report.hits;
        j["seed"] = report.seed;
    }
    return j;
}

Json to_json(const OracleReport& report)
{
    Json hist = Json::object();
    for (const auto& [tp, count] : report.period_histogram) {
        hist[std::to_string(tp)] = count;
    }
    Json cx = Json::array();
    for (const auto& c : report.counterexamples) {
        cx.push_back(Json{{"sigma", c.sigma}, {"reason", c.reason}});
    }
    Json j{{"kind", std::string(to_string(report.kind))},
           {"samples", report.samples},
           {"seed", report.seed},
           {"expected_poincare_period", report.expected_poincare_period}};
    j["expected_orbit_period"] = report.expected_orbit_period ? Json(*report.expected_orbit_period) : Json(nullptr);
    j["period_histogram"] = hist;
    j["signatures_equivalent"] = report.signatures_equivalent;
    j["counterexamples"] = cx;
    j["ok"] = report.ok();
    return j;
}

Json to_json(const StabilityReport& report)
{
    Json cx = Json::array();
    for (const auto& t : report.counterexamples) {
        Json trace = Json::array();
        for (const auto& e : t.trace) {
            trace.push_back(to_json(e));
        }
        cx.push_back(Json{{"dtheta", t.dtheta}, {"dsigma", t.dsigma}, {"error", t.error}, {"trace", trace}});
    }
    return Json{{"trials", report.trials},       {"accepted", report.accepted},
                {"refused", report.refused},     {"max_error", report.max_error},
                {"counterexamples", cx},         {"ok", report.ok()}};
}

Json to_json(const ScanRecord& record)
{
    Json j{{"theta1", record.theta1}, {"theta2", record.theta2}, {"periodic", record.periodic}};
    if (record.periodic) {
        j["T0"] = record.transient_iters;
        j["TP"] = record.poincare_period;
        j["T"] = record.orbit_period;
        j["signature_id"] = record.signature_id;
        j["projection"] = record.projection;
    } else {
        j["TP"] = nullptr;
    }
    return j;
}

Json to_json(const ParamRecord& record)
{
    Json regions = Json::array();
    for (const auto& c : record.regions) {
        Json r{{"kind", std::string(to_string(c.kind))},
               {"existence_value", c.existence_value},
               {"exists", c.exists},
               {"center_member", c.center_member}};
        if (c.volume) {
            r["volume"] = to_json(*c.volume);
        }
        regions.push_back(std::move(r));
    }
    return Json{{"epsilon", record.epsilon}, {"tau", record.tau}, {"regions", regions}};
}

void write_trace_text(std::ostream& out, const std::vector<TraceEvent>& events)
{
    for (const auto& e : events) {
        out << format_event(e) << '\n';
    }
}

void write_trace_jsonl(std::ostream& out, const std::vector<TraceEvent>& events)
{
    for (const auto& e : events) {
        out << to_json(e).dump() << '\n';
    }
}

RunHeader make_header(std::string command, Json config, std::uint64_t seed)
{
    RunHeader h;
    h.command = std::move(command);
    h.config = std::move(config);
    h.seed = seed;
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    h.wall_clock = buf;
    return h;
}

void write_header(std::ostream& out, const RunHeader& header, const std::string& prefix)
{
    out << prefix << "tool: pcon " << kToolVersion << '\n';
    out << prefix << "command: " << header.command << '\n';
    out << prefix << "seed: " << header.seed << '\n';
    out << prefix << "wall_clock: " << header.wall_clock << '\n';
    out << prefix << "config: " << header.config.dump() << '\n';
}

Json to_json(const RunHeader& header)
{
    return Json{{"tool", std::string("pcon ") + kToolVersion},
                {"command", header.command},
                {"seed", header.seed},
                {"wall_clock", header.wall_clock},
                {"config", header.config}};
}

void write_scan_csv(std::ostream& out, const PhaseScan& scan)
{
    out << "theta1,theta2,periodic,T0,TP,T,signature_id,n_projection\n";
    for (const auto& r : scan.records) {
        out << format_double(r.theta1) << ',' << format_double(r.theta2) << ',' << (r.periodic ? 1 : 0) << ',';
        if (r.periodic) {
            out << r.transient_iters << ',' << r.poincare_period << ',' << format_double(r.orbit_period) << ','
                << r.signature_id << ',' << r.projection.size() << '\n';
        } else {
            out << ",,,,0\n";
        }
    }
}

void write_param_csv(std::ostream& out, const std::vector<ParamRecord>& records)
{
    out << "epsilon,tau";
    if (!records.empty()) {
        for (const auto& c : records.front().regions) {
            const std::string k(to_string(c.kind));
            out << ',' << k << "_value," << k << "_exists," << k << "_center_member";
            if (c.volume) {
                out << ',' << k << "_volume," << k << "_std_error";
            }
        }
    }
    out << '\n';
    for (const auto& r : records) {
        out << format_double(r.epsilon) << ',' << format_double(r.tau);
        for (const auto& c : r.regions) {
            out << ',' << format_double(c.existence_value) << ',' << (c.exists ? 1 : 0) << ','
                << (c.center_member ? 1 : 0);
            if (c.volume) {
                out << ',' << format_double(c.volume->volume) << ',' << format_double(c.volume->std_error);
            }
        }
        out << '\n';
    }
}

void write_points_csv(std::ostream& out, const std::vector<std::string>& names,
                      const std::vector<std::vector<double>>& rows)
{
    for (std::size_t i = 0; i < names.size(); ++i) {
        out << (i ? "," : "") << names[i];
    }
    out << '\n';
    for (const auto& row : rows) {
        if (row.size() != names.size()) {
            throw std::invalid_argument("CSV row width does not match the header");
        }
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << format_double(row[i]);
        }
        out << '\n';
    }
}

std::string gnuplot_scan_script(const std::string& csv_path, const std::string& png_path)
{
    std::ostringstream s;
    s << "set datafile separator ','\n"
      << "set datafile commentschars '#'\n"
      << "set terminal pngcairo size 800,760\n"
      << "set output '" << png_path << "'\n"
      << "set xlabel 'theta_1'\nset ylabel 'theta_2'\n"
      << "set xrange [0:1]\nset yrange [0:1]\nset size square\n"
      << "set palette defined (1 'black', 2 'gray', 3 'blue', 4 'red', 5 'dark-green')\n"
      << "set cbrange [1:5]\nset cblabel 'T_P'\n"
      << "plot '" << csv_path << "' every ::1 using 1:2:($3 == 1 ? $5 : 1/0) with points pt 5 ps 0.4 "
      << "palette notitle\n";
    return s.str();
}

std::string gnuplot_param_script(const std::string& csv_path, const std::string& png_path, RegionKind kind,
                                 bool volume)
{
    // Column layout follows write_param_csv: per region 3 columns, 5 with volumes.
    const int index = static_cast<int>(kind);
    const int width = volume ? 5 : 3;
    const int base = 3 + index * width;
    const int column = volume ? base + 3 : base + 1;
    std::ostringstream s;
    s << "# assumes the default region order ir3, ir4, ir5 in the CSV\n"
      << "set datafile separator ','\n"
      << "set datafile commentschars '#'\n"
      << "set terminal pngcairo size 800,760\n"
      << "set output '" << png_path << "'\n"
      << "set xlabel 'epsilon'\nset ylabel 'tau'\n"
      << "set xrange [0:1]\nset yrange [0:1]\nset size square\n"
      << "set title '" << to_string(kind) << (volume ? " volume" : " existence") << "'\n"
      << "plot '" << csv_path << "' every ::1 using 1:2:" << column << " with image notitle\n";
    return s.str();
}

std::string gnuplot_projection_script(const std::string& analytic_csv, const std::string& numeric_csv,
                                      const std::string& png_path)
{
    std::ostringstream s;
    s << "set datafile separator ','\n"
      << "set datafile commentschars '#'\n"
      << "set terminal pngcairo size 800,760\n"
      << "set output '" << png_path << "'\n"
      << "set xlabel 'theta_1'\nset ylabel 'theta_2'\n"
      << "set xrange [0:1]\nset yrange [0:1]\nset size square\n"
      << "plot '" << analytic_csv << "' every ::1 using 1:2 with dots lc rgb 'gray' title 'analytic', \\\n"
      << "     '" << numeric_csv << "' every ::1 using 1:2 with points pt 7 ps 0.6 lc rgb 'red' title 'scan'\n";
    return s.str();
}

}  // namespace pcon
