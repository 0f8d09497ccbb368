#pragma once

#include "pcon/event_engine.hpp"

#include <optional>
#include <vector>

namespace pcon {

/// A state on the section theta_N = 0: oscillator N has just fired, so its
/// phase is 0 and its distance list contains 0.
using SectionState = NetworkState;

[[nodiscard]] bool is_section_state(const NetworkState& state, double tol = 1e-12);

struct SectionReturn
{
    SectionState state;
    double return_time = 0.0;
};

/// One return to the section theta_N = 0.
[[nodiscard]] SectionReturn poincare_map(const SectionState& state, const ModelParams& params,
                                         const EngineOptions& options = {});

/// (theta_1, ..., theta_{N-1}); drops theta_N and the firing history.
[[nodiscard]] std::vector<double> phase_projection(const NetworkState& state);

/// Phases and distance lists agree within `tol`; distance lists must have
/// equal cardinalities before any numeric comparison.
[[nodiscard]] bool states_match(const NetworkState& a, const NetworkState& b, double tol);

struct PeriodicityOptions
{
    int max_iter = 10000;
    double tol = 1e-9;
    EngineOptions engine;
};

struct PeriodicityResult
{
    int transient_iters = 0;      // T_0
    int poincare_period = 0;      // T_P, minimal
    double orbit_period = 0.0;    // T
    SectionState periodic_state;  // first state on the cycle
    std::vector<double> return_times;  // one per section return along the cycle
    std::vector<SectionState> cycle;   // poincare_period states starting at periodic_state
};

/// Iterates the section map, keeping every visited state, until one matches an
/// earlier state. Returns std::nullopt (not periodic) after max_iter returns.
[[nodiscard]] std::optional<PeriodicityResult> detect_periodicity(const SectionState& state,
                                                                  const ModelParams& params,
                                                                  const PeriodicityOptions& options = {});

struct PulseReception
{
    int recipient = 0;
    int multiplicity = 1;
    double offset = 0.0;  // from the start of the cycle, in [0, T)

    bool operator==(const PulseReception&) const = default;
};

/// Every pulse received during one period, ordered by recipient and then time.
struct PulseSignature
{
    double period = 0.0;
    std::vector<PulseReception> receptions;
};

[[nodiscard]] PulseSignature pulse_signature(const PeriodicityResult& result, const ModelParams& params,
                                             const EngineOptions& options = {});

/// Equal periods, equal per-recipient cardinalities, and identical
/// per-recipient multiplicity sequences.
[[nodiscard]] bool pulse_equivalent(const PulseSignature& a, const PulseSignature& b, double tol = 1e-9);

}  // namespace pcon
