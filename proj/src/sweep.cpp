#include "pcon/sweep.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace pcon {

namespace {

std::optional<PulseSignature> run_point(const NetworkState& initial, const ModelParams& params,
                                        const PeriodicityOptions& options, ScanRecord& rec)
{
    const auto result = detect_periodicity(initial, params, options);
    if (!result) {
        return std::nullopt;
    }
    rec.periodic = true;
    rec.transient_iters = result->transient_iters;
    rec.poincare_period = result->poincare_period;
    rec.orbit_period = result->orbit_period;
    for (const auto& s : result->cycle) {
        rec.projection.push_back({s.phases[0], s.phases[1]});
    }
    return pulse_signature(*result, params, options.engine);
}

double max_abs_diff(const NetworkState& a, const NetworkState& b)
{
    double err = 0.0;
    for (std::size_t i = 0; i < a.phases.size(); ++i) {
        err = std::max(err, std::abs(a.phases[i] - b.phases[i]));
    }
    for (std::size_t i = 0; i < a.ftds.size(); ++i) {
        if (a.ftds[i].size() != b.ftds[i].size()) {
            return std::numeric_limits<double>::infinity();
        }
        for (std::size_t j = 0; j < a.ftds[i].size(); ++j) {
            err = std::max(err, std::abs(a.ftds[i][j] - b.ftds[i][j]));
        }
    }
    return err;
}

}  // namespace

NetworkState scan_initial_state(double theta1, double theta2, const ModelParams& params)
{
    if (params.n() != 3) {
        throw std::invalid_argument("the phase scan is defined for a 3-oscillator network");
    }
    const double tau = params.tau();
    auto history = [tau](double theta) {
        // theta == tau keeps the firing; the slack absorbs grid rounding.
        return theta <= tau + 1e-12 ? std::vector<double>{std::min(theta, tau)} : std::vector<double>{};
    };
    return NetworkState{{theta1, theta2, 0.0}, {history(theta1), history(theta2), {0.0}}};
}

ScanRecord scan_point(const NetworkState& initial, double theta1, double theta2, const ModelParams& params,
                      const PeriodicityOptions& options)
{
    ScanRecord rec;
    rec.theta1 = theta1;
    rec.theta2 = theta2;
    (void)run_point(initial, params, options, rec);
    return rec;
}

PhaseScan phase_scan(const ModelParams& params, const PhaseScanOptions& options)
{
    if (!(options.step > 0.0 && options.step < 1.0)) {
        throw std::invalid_argument("scan step must lie in (0,1)");
    }
    // Grid values are i / n when 1/step is an integer, so 58 * 0.01 is exactly 0.58.
    const double inv = 1.0 / options.step;
    const bool integral = std::abs(inv - std::round(inv)) < 1e-9;
    const auto n = static_cast<std::size_t>(integral ? std::llround(inv) : std::ceil(inv - 1e-12));
    auto grid = [&](std::size_t i) {
        return integral ? static_cast<double>(i) / static_cast<double>(n) : static_cast<double>(i) * options.step;
    };

    PeriodicityOptions popt;
    popt.max_iter = options.max_iter;
    popt.tol = options.tol;

    PhaseScan scan;
    scan.records.resize(n * n);
    std::vector<std::optional<PulseSignature>> sigs(n * n);
    detail::parallel_for(n * n, options.threads, [&](std::size_t k) {
        ScanRecord& rec = scan.records[k];
        rec.theta1 = grid(k / n);
        rec.theta2 = grid(k % n);
        sigs[k] = run_point(scan_initial_state(rec.theta1, rec.theta2, params), params, popt, rec);
    });

    // Interning runs serially in record order so ids do not depend on threads.
    for (std::size_t k = 0; k < sigs.size(); ++k) {
        auto& rec = scan.records[k];
        if (!rec.periodic) {
            ++scan.not_periodic;
            continue;
        }
        auto it = std::find_if(scan.signatures.begin(), scan.signatures.end(),
                               [&](const PulseSignature& s) { return pulse_equivalent(s, *sigs[k], popt.tol); });
        if (it == scan.signatures.end()) {
            scan.signatures.push_back(*sigs[k]);
            rec.signature_id = static_cast<int>(scan.signatures.size()) - 1;
        } else {
            rec.signature_id = static_cast<int>(it - scan.signatures.begin());
        }
    }
    return scan;
}

std::vector<ParamRecord> param_scan(const ParamScanOptions& options)
{
    if (options.eps_points < 2 || options.tau_points < 2) {
        throw std::invalid_argument("parameter grid needs at least 2 points per axis");
    }
    const auto ne = static_cast<std::size_t>(options.eps_points);
    const auto nt = static_cast<std::size_t>(options.tau_points);
    std::vector<ParamRecord> out(ne * nt);
    // Volumes are computed inside the cell task, so Monte Carlo runs serially there.
    detail::parallel_for(ne * nt, options.threads, [&](std::size_t k) {
        const double eps = static_cast<double>(k / nt + 1) / static_cast<double>(ne);
        const double tau = static_cast<double>(k % nt + 1) / static_cast<double>(nt);
        const ModelParams params(options.b, eps, 3, tau);
        ParamRecord& rec = out[k];
        rec.epsilon = eps;
        rec.tau = tau;
        for (auto kind : options.kinds) {
            ParamRegionCell cell;
            cell.kind = kind;
            cell.existence_value = existence_functional(kind, params);
            cell.exists = region_exists(kind, params);
            const auto spec = region_spec(kind, params);
            const auto center = region_center(kind, tau);
            cell.center_member = membership(spec, center);
            if (options.volumes) {
                if (!cell.exists) {
                    VolumeReport empty;
                    empty.status = PolytopeStatus::Empty;
                    empty.simplex_volume = ordering_simplex_volume(spec);
                    cell.volume = empty;
                } else if (spec.dim <= 3) {
                    cell.volume = region_volume_exact(spec);
                } else {
                    cell.volume = region_volume_montecarlo(spec, options.volume_samples, options.seed + k, 1);
                }
            }
            rec.regions.push_back(std::move(cell));
        }
    });
    return out;
}

PulseSignature ir4_reference_signature(const ModelParams& params)
{
    const auto spec = ir4_spec(params);
    const auto sigma = sample_interior(spec, 1, 0x1e4)[0];
    const auto result = detect_periodicity(section_embedding(RegionKind::IR4, sigma, params), params);
    if (!result) {
        throw std::runtime_error("IR4 reference orbit is not periodic");
    }
    return pulse_signature(*result, params);
}

ProjectionCompare projection_compare(const ModelParams& params, const PhaseScan& scan, int n_samples,
                                     std::uint64_t seed, double tol)
{
    if (!exists_ir4(params)) {
        throw std::invalid_argument("IR4 is empty at these parameters");
    }
    ProjectionCompare out;
    out.tol = tol;
    out.analytic = analytic_projection(RegionKind::IR4, params, n_samples, seed);
    const auto reference = ir4_reference_signature(params);

    for (const auto& rec : scan.records) {
        if (rec.signature_id < 0 || rec.poincare_period != 4 ||
            !pulse_equivalent(scan.signatures[rec.signature_id], reference)) {
            continue;
        }
        ++out.scan_ir4_orbits;
        bool direct = true;
        bool mirrored = true;
        for (const auto& p : rec.projection) {
            out.numeric.push_back(p);
            const bool in = in_ir4_projection(params, p[0], p[1], tol);
            const bool in_mirror = in_ir4_projection(params, p[1], p[0], tol);
            direct = direct && in;
            mirrored = mirrored && in_mirror;
            if (!in && !in_mirror) {
                out.outside.push_back(p);
            }
        }
        if (direct) {
            ++out.direct_orbits;
        } else if (mirrored) {
            ++out.mirrored_orbits;
        }
    }

    // Seeding with S(sigma) reaches orbits that the scan's initial states miss.
    const auto seeds = sample_interior(ir4_spec(params), n_samples, seed + 1);
    out.seeded_samples = static_cast<int>(seeds.size());
    for (const auto& sigma : seeds) {
        const auto result = detect_periodicity(section_embedding(RegionKind::IR4, sigma, params), params);
        if (result && result->poincare_period == 4 && pulse_equivalent(pulse_signature(*result, params), reference)) {
            ++out.seeded_ir4_orbits;
        }
    }
    return out;
}

StabilityReport stability_probe(const ModelParams& params, const Sigma3& sigma, double dtheta_max, double dsigma_max,
                                int n_trials, std::uint64_t seed, double tol)
{
    const auto spec = ir4_spec(params);
    if (!interior_member(spec, sigma, 0.0)) {
        throw std::invalid_argument("stability probe needs sigma in the interior of the IR4 region");
    }
    if (dtheta_max < 0.0 || dsigma_max < 0.0) {
        throw std::invalid_argument("perturbation bounds must be non-negative");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dth(-dtheta_max, dtheta_max);
    std::uniform_real_distribution<double> dsg(-dsigma_max, dsigma_max);

    StabilityReport report;
    const auto base = section_embedding(RegionKind::IR4, sigma, params);
    for (int t = 0; t < n_trials; ++t) {
        ++report.trials;
        StabilityTrial trial;
        trial.dtheta = {dth(rng), dth(rng)};
        trial.dsigma = {dsg(rng), dsg(rng), dsg(rng)};
        const Sigma3 moved{sigma[0] + trial.dsigma[0], sigma[1] + trial.dsigma[1], sigma[2] + trial.dsigma[2]};
        if (!interior_member(spec, moved, 0.0)) {
            ++report.refused;
            continue;
        }
        NetworkState start = base;
        start.phases[0] += trial.dtheta[0];
        start.phases[1] += trial.dtheta[1];
        start.ftds = {{moved[0]}, {moved[1]}, {0.0, moved[2]}};
        if (start.phases[0] < 0.0 || start.phases[0] >= 1.0 || start.phases[1] < 0.0 || start.phases[1] >= 1.0) {
            ++report.refused;
            continue;
        }
        ++report.accepted;
        Engine engine(start, params);
        const auto crossing = engine.run_until_section(params.n() - 1, &trial.trace);
        const auto expected = section_embedding(RegionKind::IR4, g_map(moved, params.tau()), params);
        trial.error = max_abs_diff(crossing.state, expected);
        report.max_error = std::max(report.max_error, trial.error);
        if (!(trial.error <= tol)) {
            report.counterexamples.push_back(std::move(trial));
        }
    }
    return report;
}

BoundaryEscape boundary_escape_demo(const ModelParams& params, int max_iter, double trace_horizon)
{
    BoundaryEscape out;
    out.inside = exists_ir4(params);
    const double tau = params.tau();
    const PulseResponse h(params);
    const double s1 = tau / 2.0, s2 = tau / 4.0, s3 = 3.0 * tau / 4.0;
    // Built directly: outside the region S(sigma_*) is still a valid state
    // as long as H(tau/2) stays below threshold.
    out.start = NetworkState{{h(s1), s2, 0.0}, {{s1}, {s2}, {0.0, s3}}};
    PeriodicityOptions popt;
    popt.max_iter = max_iter;
    out.result = detect_periodicity(out.start, params, popt);
    Engine engine(out.start, params);
    out.trace = engine.simulate(trace_horizon);
    return out;
}

}  // namespace pcon
