#pragma once

#include "pcon/phase_model.hpp"

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcon {

/// Phases plus, per oscillator, the distances to its firings whose pulses have
/// not yet been delivered. Together they determine the future of the network.
///
/// Invariants: phases in [0,1); every distance in [0, tau]; each distance list
/// sorted ascending. Oscillator indices are 0-based.
struct NetworkState
{
    std::vector<double> phases;
    std::vector<std::vector<double>> ftds;

    bool operator==(const NetworkState&) const = default;
};

class InvalidStateError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

class HorizonExceeded : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class EngineStall : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Throws InvalidStateError naming the first violated invariant.
void validate_state(const NetworkState& state, const ModelParams& params);

/// Sorts every distance list in place.
void canonicalize(NetworkState& state);

/// A pulse in flight. deliver_at == fired_at + tau as constructed.
struct PendingPulse
{
    double deliver_at = 0.0;
    double fired_at = 0.0;
    int sender = 0;

    friend bool operator<(const PendingPulse& a, const PendingPulse& b)
    {
        if (a.deliver_at != b.deliver_at) {
            return a.deliver_at < b.deliver_at;
        }
        return a.sender < b.sender;
    }
};

enum class EventKind
{
    Pulse,
    Fire,
};

/// One line of the event trace. For a pulse, `oscillators` holds the
/// recipients that all received `multiplicity` simultaneous pulses from
/// `senders`. For a fire, `oscillators` holds the single firing oscillator.
struct TraceEvent
{
    EventKind kind = EventKind::Fire;
    double time = 0.0;
    std::vector<int> oscillators;
    int multiplicity = 0;
    std::vector<int> senders;
};

struct EngineOptions
{
    // Events closer than this (in time, equivalently in phase) are simultaneous.
    double coincidence_tol = 1e-12;
    // Time budget for run_until_section.
    double section_horizon = 100.0;
};

struct SectionCrossing
{
    NetworkState state;
    double elapsed = 0.0;
};

/// Exact event-driven integrator for the delayed all-to-all network.
///
/// Between events every phase grows at unit rate. At each event time the
/// engine delivers every due pulse first (aggregated per recipient into a
/// multiplicity m and applied as min{1, H_m(theta)}), then fires every
/// oscillator at threshold, and repeats until nothing else happens at that
/// timestamp (only possible for tau == 0). A firing oscillator resets to 0
/// and schedules one pulse to all others at time + tau.
class Engine
{
public:
    /// Every distance sigma in the state becomes a pulse from that oscillator
    /// delivered at tau - sigma. The clock starts at 0.
    Engine(const NetworkState& state, const ModelParams& params, EngineOptions options = {});

    [[nodiscard]] double clock() const noexcept { return clock_; }
    [[nodiscard]] const std::vector<double>& phases() const noexcept { return phases_; }
    [[nodiscard]] const ModelParams& params() const noexcept { return params_; }
    [[nodiscard]] std::vector<PendingPulse> pending_pulses() const;

    /// Earliest pending delivery or natural threshold crossing.
    [[nodiscard]] double next_event_time() const;

    /// Advances to the next event time and processes everything that happens
    /// there. Returns the events in processing order.
    std::vector<TraceEvent> step();

    /// Steps until oscillator k fires, then returns the state at that instant
    /// and the time elapsed since the call. Throws HorizonExceeded.
    SectionCrossing run_until_section(int k, std::vector<TraceEvent>* trace = nullptr);

    /// All events with time <= clock() + horizon.
    std::vector<TraceEvent> simulate(double horizon);

    /// Current state with distances measured back from clock().
    [[nodiscard]] NetworkState export_state() const;

private:
    void fire(int i, std::vector<TraceEvent>& events);

    ModelParams params_;
    EngineOptions options_;
    PulseResponse response_;
    double clock_ = 0.0;
    std::vector<double> phases_;
    std::set<PendingPulse> pending_;
    std::vector<char> fired_now_;
};

/// Paper-style one-line rendering with 1-based indices, e.g.
/// "P (1,2) t=0.145 m=1" or "F 1 t=0.145".
[[nodiscard]] std::string format_event(const TraceEvent& event);

}  // namespace pcon
