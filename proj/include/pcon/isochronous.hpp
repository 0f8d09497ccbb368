#pragma once

#include "pcon/event_engine.hpp"
#include "pcon/phase_model.hpp"
#include "pcon/polytope.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pcon {

/// The three isochronous regions of the 3-oscillator network, named after
/// the Poincare period of their generic orbits.
enum class RegionKind
{
    IR3,
    IR4,
    IR5,
};

[[nodiscard]] std::string_view to_string(RegionKind kind);
/// Accepts "ir3", "IR4", ...; throws std::invalid_argument otherwise.
[[nodiscard]] RegionKind parse_region_kind(std::string_view text);
[[nodiscard]] int region_dim(RegionKind kind);
/// Poincare period of a generic orbit in the region.
[[nodiscard]] int region_poincare_period(RegionKind kind);

/// x -> coeffs . x + constant
struct AffineForm
{
    std::vector<double> coeffs;
    double constant = 0.0;

    [[nodiscard]] double operator()(std::span<const double> x) const;
};

/// lower <= form(x) <= upper
struct BoundedFunctional
{
    std::string label;
    AffineForm form;
    double lower = 0.0;
    double upper = 1.0;
};

/// Closed bounds use this slack on both sides; strict orderings use none.
inline constexpr double kBoundTol = 1e-12;

/// One region as a parametric system of affine inequalities in sigma-space:
/// strict orderings `form(x) > 0` and bounded functionals.
struct RegionSpec
{
    RegionKind kind = RegionKind::IR4;
    int dim = 3;
    double tau = 0.0;
    std::vector<std::string> labels;
    std::vector<int> chain;  // variable indices in increasing order: 0 < x[chain[0]] < ... < tau
    std::vector<AffineForm> orderings;
    std::vector<BoundedFunctional> functionals;
};

/// IR4 in (sigma1, sigma2, sigma3): four functionals bounded by [H_*, 1].
[[nodiscard]] RegionSpec ir4_spec(const ModelParams& params);
/// IR3 in (sigma1, sigma3): oscillators 1 and 2 share sigma1; the last three
/// functionals are bounded below by the double-pulse threshold.
[[nodiscard]] RegionSpec ir3_spec(const ModelParams& params);
/// IR5 in (sigma1, sigma2_1, sigma2_2, sigma3): oscillator 2 carries two firings.
[[nodiscard]] RegionSpec ir5_spec(const ModelParams& params);
[[nodiscard]] RegionSpec region_spec(RegionKind kind, const ModelParams& params);

[[nodiscard]] bool membership(const RegionSpec& spec, std::span<const double> sigma, double bound_tol = kBoundTol);

/// Membership with every inequality satisfied by at least `margin`.
[[nodiscard]] bool interior_member(const RegionSpec& spec, std::span<const double> sigma, double margin);

/// The center point whose orbit has minimal Poincare period 1.
[[nodiscard]] std::vector<double> region_center(RegionKind kind, double tau);

/// The closed-form existence inequality for the region:
///   IR3: H_* <= H(tau/3) + tau/3 <= 1
///   IR4: H_* <= H(tau/2) + tau/4 <= 1
///   IR5: H_* <= H(tau/5) + 2 tau/5 <= 1
[[nodiscard]] double existence_functional(RegionKind kind, const ModelParams& params);
[[nodiscard]] bool region_exists(RegionKind kind, const ModelParams& params);

inline bool exists_ir3(const ModelParams& p) { return region_exists(RegionKind::IR3, p); }
inline bool exists_ir4(const ModelParams& p) { return region_exists(RegionKind::IR4, p); }
inline bool exists_ir5(const ModelParams& p) { return region_exists(RegionKind::IR5, p); }

/// Section state for a sigma point of the region (oscillator 3 has just
/// fired, so its distance list is {0, sigma3}). Throws std::invalid_argument
/// if sigma violates the ordering or the network is not 3 oscillators.
[[nodiscard]] NetworkState section_embedding(RegionKind kind, std::span<const double> sigma,
                                             const ModelParams& params);

/// The IR4 return map on sigma-space:
/// (s1, s2, s3) -> (s3 - s2, s1 - s2, tau - s2).
using Sigma3 = std::array<double, 3>;
[[nodiscard]] Sigma3 g_map(const Sigma3& sigma, double tau);

using IntMatrix3 = std::array<std::array<long long, 3>, 3>;
[[nodiscard]] IntMatrix3 multiply(const IntMatrix3& a, const IntMatrix3& b);
[[nodiscard]] IntMatrix3 matrix_power(const IntMatrix3& a, int k);

/// g written around its fixed point: g(center + s) = center + L s.
struct GMapAlgebra
{
    IntMatrix3 linear{};
    Sigma3 offset{};  // g(sigma) = L sigma + offset
    Sigma3 center{};
    Sigma3 period_two_direction{0.0, 1.0, 1.0};
};

[[nodiscard]] GMapAlgebra g_algebra(double tau);

// ---- volume ----------------------------------------------------------------

enum class VolumeMethod
{
    Exact,
    MonteCarlo,
};

[[nodiscard]] std::string_view to_string(VolumeMethod method);
[[nodiscard]] std::string_view to_string(PolytopeStatus status);

struct VolumeReport
{
    VolumeMethod method = VolumeMethod::Exact;
    double volume = 0.0;
    double std_error = 0.0;
    std::int64_t samples = 0;
    std::int64_t hits = 0;
    std::uint64_t seed = 0;
    double simplex_volume = 0.0;
    PolytopeStatus status = PolytopeStatus::Ok;
};

/// Halfspace form of the closed region (orderings relaxed to <=).
[[nodiscard]] std::vector<Halfspace> region_halfspaces(const RegionSpec& spec);

/// Volume of {0 < x[chain[0]] < ... < tau}, i.e. tau^dim / dim!.
[[nodiscard]] double ordering_simplex_volume(const RegionSpec& spec);

/// Uniform point of the ordering simplex.
[[nodiscard]] std::vector<double> sample_ordering_simplex(const RegionSpec& spec, std::mt19937_64& rng);

[[nodiscard]] VolumeReport region_volume_exact(const RegionSpec& spec);

/// Hit fraction x simplex volume, binomial standard error. The budget is
/// split into a fixed number of shards with derived seeds, so the result does
/// not depend on `threads`.
[[nodiscard]] VolumeReport region_volume_montecarlo(const RegionSpec& spec, std::int64_t samples,
                                                    std::uint64_t seed, int threads = 1);

[[nodiscard]] VolumeReport region_volume(const RegionSpec& spec, VolumeMethod method, std::int64_t samples = 1000000,
                                         std::uint64_t seed = 1, int threads = 1);

// ---- sampling and cross-validation -----------------------------------------

/// Uniform interior points (every inequality slack by at least `margin`),
/// drawn by rejection from the ordering simplex. Throws std::runtime_error if
/// `max_attempts` draws yield too few points.
[[nodiscard]] std::vector<std::vector<double>> sample_interior(const RegionSpec& spec, int count, std::uint64_t seed,
                                                               double margin = 1e-9,
                                                               std::int64_t max_attempts = 100000000);

/// The analytic phase projection A = pr_theta(S(Omega)) at sampled points.
[[nodiscard]] std::vector<std::array<double, 2>> analytic_projection(RegionKind kind, const ModelParams& params,
                                                                     int count, std::uint64_t seed);

/// Exact test whether (theta1, theta2) lies in the IR4 projection within `tol`:
/// sigma1 and sigma2 are fixed by the phases and sigma3 ranges over an interval.
[[nodiscard]] bool in_ir4_projection(const ModelParams& params, double theta1, double theta2, double tol);

struct OracleCounterexample
{
    std::vector<double> sigma;
    std::string reason;
};

struct OracleReport
{
    RegionKind kind = RegionKind::IR4;
    int samples = 0;
    std::uint64_t seed = 0;
    int expected_poincare_period = 0;
    std::optional<double> expected_orbit_period;
    std::map<int, int> period_histogram;  // minimal T_P -> count
    bool signatures_equivalent = true;
    std::vector<OracleCounterexample> counterexamples;

    [[nodiscard]] bool ok() const { return counterexamples.empty() && signatures_equivalent; }
};

/// Samples interior sigma points, simulates from their section embedding and
/// checks the predicted Poincare period, the orbit period where it is known in
/// closed form (IR3: 2 tau, IR4: 3 tau, IR5: 3 tau) and pairwise pulse
/// equivalence. For IR3 it also checks theta1 == theta2 along the orbit.
[[nodiscard]] OracleReport region_oracle(RegionKind kind, const ModelParams& params, int n_samples,
                                         std::uint64_t seed);

}  // namespace pcon
