#include "pcon/event_engine.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

namespace pcon {

namespace {

std::string shortest(double v)
{
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

void validate_state(const NetworkState& state, const ModelParams& params)
{
    const auto n = static_cast<std::size_t>(params.n());
    if (state.phases.size() != n) {
        throw InvalidStateError("state must hold exactly n = " + std::to_string(n) + " phases");
    }
    if (state.ftds.size() != n) {
        throw InvalidStateError("state must hold exactly n = " + std::to_string(n) + " firing-time-distance lists");
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double th = state.phases[i];
        if (!(th >= 0.0 && th < 1.0)) {
            throw InvalidStateError("phase of oscillator " + std::to_string(i + 1) + " must lie in [0,1), got " +
                                    shortest(th));
        }
        const auto& sig = state.ftds[i];
        for (double s : sig) {
            if (!(s >= 0.0 && s <= params.tau())) {
                throw InvalidStateError("firing time distance " + shortest(s) + " of oscillator " +
                                        std::to_string(i + 1) + " must lie in [0, tau = " + shortest(params.tau()) +
                                        "]");
            }
        }
        if (!std::is_sorted(sig.begin(), sig.end())) {
            throw InvalidStateError("firing time distances of oscillator " + std::to_string(i + 1) +
                                    " must be sorted ascending");
        }
        if (std::adjacent_find(sig.begin(), sig.end()) != sig.end()) {
            throw InvalidStateError("oscillator " + std::to_string(i + 1) + " cannot fire twice at the same moment");
        }
    }
}

void canonicalize(NetworkState& state)
{
    for (auto& sig : state.ftds) {
        std::sort(sig.begin(), sig.end());
    }
}

Engine::Engine(const NetworkState& state, const ModelParams& params, EngineOptions options)
    : params_(params), options_(options), response_(params), phases_(state.phases)
{
    validate_state(state, params);
    fired_now_.assign(phases_.size(), 0);
    for (std::size_t i = 0; i < state.ftds.size(); ++i) {
        for (double sigma : state.ftds[i]) {
            const double fired_at = -sigma;
            pending_.insert(PendingPulse{fired_at + params_.tau(), fired_at, static_cast<int>(i)});
        }
    }
}

std::vector<PendingPulse> Engine::pending_pulses() const
{
    return {pending_.begin(), pending_.end()};
}

double Engine::next_event_time() const
{
    const double top = *std::max_element(phases_.begin(), phases_.end());
    double t = clock_ + (1.0 - top);
    if (!pending_.empty()) {
        t = std::min(t, std::max(clock_, pending_.begin()->deliver_at));
    }
    return t;
}

void Engine::fire(int i, std::vector<TraceEvent>& events)
{
    phases_[i] = 0.0;
    fired_now_[i] = 1;
    pending_.insert(PendingPulse{clock_ + params_.tau(), clock_, i});
    events.push_back(TraceEvent{EventKind::Fire, clock_, {i}, 0, {}});
}

std::vector<TraceEvent> Engine::step()
{
    const double top = *std::max_element(phases_.begin(), phases_.end());
    double dt = 1.0 - top;
    if (!pending_.empty()) {
        dt = std::min(dt, std::max(0.0, pending_.begin()->deliver_at - clock_));
    }
    if (!std::isfinite(dt)) {
        throw EngineStall("no next event could be constructed");
    }
    // Unit flow: every phase advances by exactly the elapsed time.
    for (auto& th : phases_) {
        th += dt;
    }
    clock_ += dt;

    const double tol = options_.coincidence_tol;
    const int n = static_cast<int>(phases_.size());
    std::fill(fired_now_.begin(), fired_now_.end(), 0);
    std::vector<TraceEvent> events;
    std::vector<int> mult(n);
    bool first_round = true;

    for (;;) {
        std::vector<PendingPulse> due;
        while (!pending_.empty() && pending_.begin()->deliver_at <= clock_ + tol) {
            due.push_back(*pending_.begin());
            pending_.erase(pending_.begin());
        }

        if (!due.empty()) {
            std::fill(mult.begin(), mult.end(), 0);
            std::vector<int> senders;
            for (const auto& p : due) {
                senders.push_back(p.sender);
                for (int r = 0; r < n; ++r) {
                    // An oscillator that fired at this very instant ignores
                    // pulses arriving at the same instant (tau == 0 cascades).
                    if (r != p.sender && !fired_now_[r]) {
                        ++mult[r];
                    }
                }
            }
            std::sort(senders.begin(), senders.end());
            senders.erase(std::unique(senders.begin(), senders.end()), senders.end());

            std::map<int, std::vector<int>> by_mult;
            for (int r = 0; r < n; ++r) {
                if (mult[r] > 0) {
                    by_mult[mult[r]].push_back(r);
                }
            }
            for (const auto& [m, recipients] : by_mult) {
                events.push_back(TraceEvent{EventKind::Pulse, clock_, recipients, m, senders});
            }
            for (int r = 0; r < n; ++r) {
                if (mult[r] > 0) {
                    phases_[r] = std::min(1.0, response_(phases_[r], mult[r]));
                }
            }
        }

        bool fired = false;
        for (int i = 0; i < n; ++i) {
            if (phases_[i] >= 1.0 - tol) {
                fire(i, events);
                fired = true;
            }
        }

        if (first_round && due.empty() && !fired) {
            throw EngineStall("event time reached but no pulse or firing was due");
        }
        first_round = false;
        if (!fired || params_.tau() > tol) {
            break;
        }
    }
    return events;
}

SectionCrossing Engine::run_until_section(int k, std::vector<TraceEvent>* trace)
{
    if (k < 0 || k >= static_cast<int>(phases_.size())) {
        throw std::out_of_range("section oscillator index out of range");
    }
    const double start = clock_;
    for (;;) {
        if (next_event_time() - start > options_.section_horizon) {
            throw HorizonExceeded("oscillator " + std::to_string(k + 1) + " did not fire within " +
                                  shortest(options_.section_horizon) + " time units");
        }
        auto events = step();
        const bool hit = std::any_of(events.begin(), events.end(), [k](const TraceEvent& e) {
            return e.kind == EventKind::Fire && e.oscillators.front() == k;
        });
        if (trace) {
            trace->insert(trace->end(), events.begin(), events.end());
        }
        if (hit) {
            return SectionCrossing{export_state(), clock_ - start};
        }
    }
}

std::vector<TraceEvent> Engine::simulate(double horizon)
{
    const double end = clock_ + horizon;
    std::vector<TraceEvent> trace;
    while (next_event_time() <= end + options_.coincidence_tol) {
        auto events = step();
        trace.insert(trace.end(), events.begin(), events.end());
    }
    return trace;
}

NetworkState Engine::export_state() const
{
    NetworkState out;
    out.phases = phases_;
    out.ftds.assign(phases_.size(), {});
    for (const auto& p : pending_) {
        out.ftds[p.sender].push_back(clock_ - p.fired_at);
    }
    canonicalize(out);
    return out;
}

std::string format_event(const TraceEvent& event)
{
    std::ostringstream os;
    if (event.kind == EventKind::Pulse) {
        os << "P (";
        for (std::size_t i = 0; i < event.oscillators.size(); ++i) {
            os << (i ? "," : "") << event.oscillators[i] + 1;
        }
        os << ") t=" << shortest(event.time) << " m=" << event.multiplicity;
    } else {
        os << "F " << event.oscillators.front() + 1 << " t=" << shortest(event.time);
    }
    return os.str();
}

}  // namespace pcon
