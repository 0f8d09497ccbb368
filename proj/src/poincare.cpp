#include "pcon/poincare.hpp"

#include <algorithm>
#include <cmath>

namespace pcon {

bool is_section_state(const NetworkState& state, double tol)
{
    if (state.phases.empty() || state.ftds.size() != state.phases.size()) {
        return false;
    }
    if (std::abs(state.phases.back()) > tol) {
        return false;
    }
    const auto& last = state.ftds.back();
    return !last.empty() && std::abs(last.front()) <= tol;
}

SectionReturn poincare_map(const SectionState& state, const ModelParams& params, const EngineOptions& options)
{
    Engine engine(state, params, options);
    auto crossing = engine.run_until_section(params.n() - 1);
    return SectionReturn{std::move(crossing.state), crossing.elapsed};
}

std::vector<double> phase_projection(const NetworkState& state)
{
    if (state.phases.empty()) {
        return {};
    }
    return {state.phases.begin(), state.phases.end() - 1};
}

bool states_match(const NetworkState& a, const NetworkState& b, double tol)
{
    if (a.phases.size() != b.phases.size() || a.ftds.size() != b.ftds.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.ftds.size(); ++i) {
        if (a.ftds[i].size() != b.ftds[i].size()) {
            return false;
        }
    }
    for (std::size_t i = 0; i < a.phases.size(); ++i) {
        if (std::abs(a.phases[i] - b.phases[i]) > tol) {
            return false;
        }
    }
    for (std::size_t i = 0; i < a.ftds.size(); ++i) {
        for (std::size_t j = 0; j < a.ftds[i].size(); ++j) {
            if (std::abs(a.ftds[i][j] - b.ftds[i][j]) > tol) {
                return false;
            }
        }
    }
    return true;
}

std::optional<PeriodicityResult> detect_periodicity(const SectionState& state, const ModelParams& params,
                                                    const PeriodicityOptions& options)
{
    if (options.max_iter < 1) {
        throw std::invalid_argument("max_iter must be at least 1");
    }
    if (!(options.tol > 0.0)) {
        throw std::invalid_argument("periodicity tolerance must be positive");
    }

    std::vector<SectionState> visited{state};
    std::vector<double> returns{0.0};  // returns[j] is the time from visited[j-1] to visited[j]
    visited.reserve(64);
    returns.reserve(64);

    for (int j = 1; j <= options.max_iter; ++j) {
        auto next = poincare_map(visited.back(), params, options.engine);
        visited.push_back(std::move(next.state));
        returns.push_back(next.return_time);

        const auto& current = visited.back();
        for (int i = 0; i < j; ++i) {
            if (!states_match(visited[i], current, options.tol)) {
                continue;
            }
            int length = j - i;
            // The first match is minimal up to tolerance; confirm over divisors.
            for (int d = 1; d < length; ++d) {
                if (length % d == 0 && states_match(visited[i], visited[i + d], options.tol)) {
                    length = d;
                    break;
                }
            }
            PeriodicityResult result;
            result.transient_iters = i;
            result.poincare_period = length;
            result.periodic_state = visited[i];
            for (int k = 0; k < length; ++k) {
                result.cycle.push_back(visited[i + k]);
                result.return_times.push_back(returns[i + k + 1]);
                result.orbit_period += returns[i + k + 1];
            }
            return result;
        }
    }
    return std::nullopt;
}

PulseSignature pulse_signature(const PeriodicityResult& result, const ModelParams& params,
                               const EngineOptions& options)
{
    Engine engine(result.periodic_state, params, options);
    const double period = result.orbit_period;
    const double tol = options.coincidence_tol;
    auto trace = engine.simulate(period);

    PulseSignature sig;
    sig.period = period;
    for (const auto& ev : trace) {
        if (ev.kind != EventKind::Pulse) {
            continue;
        }
        // The section state is taken after everything at t = 0 happened, so
        // receptions at t = 0 show up at the end of the window as t = T.
        double offset = ev.time;
        if (offset >= period - 1e3 * tol) {
            offset = std::max(0.0, offset - period);
        }
        for (int r : ev.oscillators) {
            sig.receptions.push_back(PulseReception{r, ev.multiplicity, offset});
        }
    }
    std::sort(sig.receptions.begin(), sig.receptions.end(), [](const PulseReception& a, const PulseReception& b) {
        if (a.recipient != b.recipient) {
            return a.recipient < b.recipient;
        }
        return a.offset < b.offset;
    });
    return sig;
}

bool pulse_equivalent(const PulseSignature& a, const PulseSignature& b, double tol)
{
    if (std::abs(a.period - b.period) > tol) {
        return false;
    }
    if (a.receptions.size() != b.receptions.size()) {
        return false;
    }
    for (std::size_t k = 0; k < a.receptions.size(); ++k) {
        if (a.receptions[k].recipient != b.receptions[k].recipient ||
            a.receptions[k].multiplicity != b.receptions[k].multiplicity) {
            return false;
        }
    }
    return true;
}

}  // namespace pcon
