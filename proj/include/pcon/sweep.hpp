#pragma once

#include "pcon/isochronous.hpp"
#include "pcon/poincare.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace pcon {

// ---- phase scan ------------------------------------------------------------

struct ScanRecord
{
    double theta1 = 0.0;
    double theta2 = 0.0;
    bool periodic = false;
    int transient_iters = -1;   // T_0, -1 if not periodic
    int poincare_period = -1;   // T_P, -1 if not periodic
    double orbit_period = 0.0;  // T
    int signature_id = -1;      // index into PhaseScan::signatures
    std::vector<std::array<double, 2>> projection;  // (theta1, theta2) of each cycle state
};

struct PhaseScanOptions
{
    double step = 0.01;
    int max_iter = 10000;
    double tol = 1e-9;
    int threads = 1;
};

struct PhaseScan
{
    std::vector<ScanRecord> records;        // row-major, theta1 outer
    std::vector<PulseSignature> signatures;  // interned in record order
    int not_periodic = 0;
};

/// The scan's initial state at grid point (theta1, theta2): theta3 = 0 with
/// Sigma_3 = {0}, and Sigma_i = {theta_i} if theta_i <= tau, else empty.
[[nodiscard]] NetworkState scan_initial_state(double theta1, double theta2, const ModelParams& params);

/// Every grid point (i step, j step) in [0,1)^2. Requires 0 < step < 1.
[[nodiscard]] PhaseScan phase_scan(const ModelParams& params, const PhaseScanOptions& options = {});

/// Periodicity record for one initial state, as in the scan.
[[nodiscard]] ScanRecord scan_point(const NetworkState& initial, double theta1, double theta2,
                                    const ModelParams& params, const PeriodicityOptions& options);

// ---- parameter scan --------------------------------------------------------

struct ParamScanOptions
{
    int eps_points = 100;
    int tau_points = 100;
    double b = 3.0;
    std::vector<RegionKind> kinds{RegionKind::IR3, RegionKind::IR4, RegionKind::IR5};
    bool volumes = false;
    std::int64_t volume_samples = 100000;  // Monte Carlo budget for 4D regions
    std::uint64_t seed = 1;
    int threads = 1;
};

struct ParamRegionCell
{
    RegionKind kind = RegionKind::IR4;
    double existence_value = 0.0;
    bool exists = false;
    bool center_member = false;
    std::optional<VolumeReport> volume;
};

struct ParamRecord
{
    double epsilon = 0.0;
    double tau = 0.0;
    std::vector<ParamRegionCell> regions;  // same order as options.kinds
};

/// Grid over (eps, tau) in (0,1]^2 at k/points, k = 1..points. Volumes are
/// exact in 2D and 3D and Monte Carlo in 4D.
[[nodiscard]] std::vector<ParamRecord> param_scan(const ParamScanOptions& options);

// ---- analytic vs numeric ---------------------------------------------------

struct ProjectionCompare
{
    std::vector<std::array<double, 2>> analytic;  // sampled A = pr_theta(S(Omega))
    std::vector<std::array<double, 2>> numeric;   // cycle projections of IR4 scan orbits
    std::vector<std::array<double, 2>> outside;   // numeric points in neither A nor its mirror image
    int scan_ir4_orbits = 0;    // scan records pulse equivalent to IR4
    int direct_orbits = 0;      // whole cycle projection inside A
    int mirrored_orbits = 0;    // inside A after exchanging oscillators 1 and 2
    int seeded_ir4_orbits = 0;  // IR4 orbits recovered from S(sigma) seeds
    int seeded_samples = 0;
    double tol = 1e-6;
};

/// IR4 only. The scan must have been run at the same parameters. Pulse
/// signatures cannot tell an IR4 orbit from its image under exchanging
/// oscillators 1 and 2, so each scan orbit is classified as direct (inside A)
/// or mirrored (inside the reflection of A).
[[nodiscard]] ProjectionCompare projection_compare(const ModelParams& params, const PhaseScan& scan, int n_samples,
                                                   std::uint64_t seed, double tol = 1e-6);

/// Reference signature of an IR4 orbit at these parameters.
[[nodiscard]] PulseSignature ir4_reference_signature(const ModelParams& params);

// ---- stability -------------------------------------------------------------

struct StabilityTrial
{
    std::array<double, 2> dtheta{};
    std::array<double, 3> dsigma{};
    double error = 0.0;  // max componentwise distance to S(g(sigma + dsigma))
    std::vector<TraceEvent> trace;
};

struct StabilityReport
{
    int trials = 0;
    int accepted = 0;
    int refused = 0;  // sigma + dsigma left the region
    double max_error = 0.0;
    std::vector<StabilityTrial> counterexamples;

    [[nodiscard]] bool ok() const { return accepted > 0 && counterexamples.empty(); }
};

/// Perturbs S(sigma) to (theta + dtheta, sigma + dsigma), runs one Poincare
/// return and compares it with S(g(sigma + dsigma)) within `tol`.
[[nodiscard]] StabilityReport stability_probe(const ModelParams& params, const Sigma3& sigma, double dtheta_max,
                                              double dsigma_max, int n_trials, std::uint64_t seed,
                                              double tol = 1e-9);

// ---- boundary --------------------------------------------------------------

struct BoundaryEscape
{
    bool inside = false;  // exists_ir4(params)
    NetworkState start;   // S(sigma_*)
    std::optional<PeriodicityResult> result;
    std::vector<TraceEvent> trace;  // first few periods from the start
};

/// Simulates from S(sigma_*) and detects the attractor within max_iter returns.
[[nodiscard]] BoundaryEscape boundary_escape_demo(const ModelParams& params, int max_iter = 1000,
                                                  double trace_horizon = 5.0);

}  // namespace pcon
