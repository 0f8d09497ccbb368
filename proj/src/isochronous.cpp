#include "pcon/isochronous.hpp"

#include "pcon/poincare.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pcon {

namespace {

// Builds affine forms in sigma-space term by term.
struct FormBuilder
{
    int dim;

    [[nodiscard]] AffineForm constant(double c) const { return AffineForm{std::vector<double>(dim, 0.0), c}; }

    [[nodiscard]] AffineForm var(int i, double scale = 1.0) const
    {
        AffineForm f = constant(0.0);
        f.coeffs[i] = scale;
        return f;
    }
};

AffineForm operator+(AffineForm a, const AffineForm& b)
{
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
        a.coeffs[i] += b.coeffs[i];
    }
    a.constant += b.constant;
    return a;
}

AffineForm operator-(AffineForm a, const AffineForm& b)
{
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
        a.coeffs[i] -= b.coeffs[i];
    }
    a.constant -= b.constant;
    return a;
}

// The single-pulse response composed with an affine form stays affine.
AffineForm respond(const PulseResponse& h, AffineForm inner)
{
    for (auto& c : inner.coeffs) {
        c *= h.slope(1);
    }
    inner.constant = h.slope(1) * inner.constant + h.offset(1);
    return inner;
}

void add_chain(RegionSpec& spec, const FormBuilder& fb)
{
    const auto& chain = spec.chain;
    spec.orderings.push_back(fb.var(chain.front()));
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        spec.orderings.push_back(fb.var(chain[i + 1]) - fb.var(chain[i]));
    }
    spec.orderings.push_back(fb.constant(spec.tau) - fb.var(chain.back()));
}

void require_three(const ModelParams& params)
{
    if (params.n() != 3) {
        throw std::invalid_argument("isochronous regions are defined for a 3-oscillator network");
    }
}

bool ordered(const RegionSpec& spec, std::span<const double> sigma)
{
    return std::all_of(spec.orderings.begin(), spec.orderings.end(),
                       [&](const AffineForm& f) { return f(sigma) > 0.0; });
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

std::string_view to_string(RegionKind kind)
{
    switch (kind) {
    case RegionKind::IR3:
        return "ir3";
    case RegionKind::IR4:
        return "ir4";
    case RegionKind::IR5:
        return "ir5";
    }
    return "?";
}

RegionKind parse_region_kind(std::string_view text)
{
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "ir3") {
        return RegionKind::IR3;
    }
    if (lower == "ir4") {
        return RegionKind::IR4;
    }
    if (lower == "ir5") {
        return RegionKind::IR5;
    }
    throw std::invalid_argument("unknown region kind '" + std::string(text) + "' (expected ir3, ir4 or ir5)");
}

int region_dim(RegionKind kind)
{
    switch (kind) {
    case RegionKind::IR3:
        return 2;
    case RegionKind::IR4:
        return 3;
    case RegionKind::IR5:
        return 4;
    }
    return 0;
}

int region_poincare_period(RegionKind kind)
{
    switch (kind) {
    case RegionKind::IR3:
        return 3;
    case RegionKind::IR4:
        return 4;
    case RegionKind::IR5:
        return 5;
    }
    return 0;
}

double AffineForm::operator()(std::span<const double> x) const
{
    double v = constant;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        v += coeffs[i] * x[i];
    }
    return v;
}

RegionSpec ir4_spec(const ModelParams& params)
{
    require_three(params);
    const PulseResponse h(params);
    const double tau = params.tau();
    const double h_star = firing_threshold(params, 1);
    const FormBuilder fb{3};
    const auto s1 = fb.var(0);
    const auto s2 = fb.var(1);
    const auto s3 = fb.var(2);
    const auto t = fb.constant(tau);

    RegionSpec spec;
    spec.kind = RegionKind::IR4;
    spec.dim = 3;
    spec.tau = tau;
    spec.labels = {"sigma1", "sigma2", "sigma3"};
    spec.chain = {1, 0, 2};
    add_chain(spec, fb);
    spec.functionals = {
        {"F1", respond(h, s1) + t - s3, h_star, 1.0},
        {"F2", respond(h, t - s3 + s2) + s3 - s1, h_star, 1.0},
        {"F3", respond(h, t - s1) + s1 - s2, h_star, 1.0},
        {"F4", respond(h, s3 - s2) + s2, h_star, 1.0},
    };
    return spec;
}

RegionSpec ir3_spec(const ModelParams& params)
{
    require_three(params);
    const PulseResponse h(params);
    const double tau = params.tau();
    const double h_star = firing_threshold(params, 1);
    const double h_star2 = firing_threshold(params, 2);
    const FormBuilder fb{2};
    const auto s1 = fb.var(0);
    const auto s3 = fb.var(1);
    const auto t = fb.constant(tau);

    RegionSpec spec;
    spec.kind = RegionKind::IR3;
    spec.dim = 2;
    spec.tau = tau;
    spec.labels = {"sigma1", "sigma3"};
    spec.chain = {0, 1};
    add_chain(spec, fb);
    // Oscillators 1 and 2 fire together and share the distance sigma1.
    spec.functionals = {
        {"F1", respond(h, s1) + t - s3, h_star, 1.0},
        {"F2", respond(h, t - s3) + s3 - s1, h_star, 1.0},
        {"F3", respond(h, s3 - s1) + s1, h_star, 1.0},
        {"F4", s3, h_star2, 1.0},
        {"F5", t - s1, h_star2, 1.0},
        {"F6", t + s1 - s3, h_star2, 1.0},
    };
    return spec;
}

RegionSpec ir5_spec(const ModelParams& params)
{
    require_three(params);
    const PulseResponse h(params);
    const double tau = params.tau();
    const double h_star = firing_threshold(params, 1);
    const FormBuilder fb{4};
    const auto s1 = fb.var(0);
    const auto s21 = fb.var(1);
    const auto s22 = fb.var(2);
    const auto s3 = fb.var(3);
    const auto t = fb.constant(tau);

    RegionSpec spec;
    spec.kind = RegionKind::IR5;
    spec.dim = 4;
    spec.tau = tau;
    spec.labels = {"sigma1", "sigma2_1", "sigma2_2", "sigma3"};
    spec.chain = {1, 0, 3, 2};
    add_chain(spec, fb);
    spec.functionals = {
        {"F1", respond(h, s21) + t - s3, h_star, 1.0},
        {"F2", respond(h, t - s22) + s22 - s1, h_star, 1.0},
        {"F3", respond(h, s22 - s3) + s3 - s21, h_star, 1.0},
        {"F4", respond(h, s3 - s1) + s1, h_star, 1.0},
        {"F5", respond(h, s1 - s21) + s21 + t - s22, h_star, 1.0},
    };
    return spec;
}

RegionSpec region_spec(RegionKind kind, const ModelParams& params)
{
    switch (kind) {
    case RegionKind::IR3:
        return ir3_spec(params);
    case RegionKind::IR4:
        return ir4_spec(params);
    case RegionKind::IR5:
        return ir5_spec(params);
    }
    throw std::invalid_argument("unknown region kind");
}

bool membership(const RegionSpec& spec, std::span<const double> sigma, double bound_tol)
{
    if (static_cast<int>(sigma.size()) != spec.dim) {
        throw std::invalid_argument("sigma has " + std::to_string(sigma.size()) + " components, region needs " +
                                    std::to_string(spec.dim));
    }
    if (!ordered(spec, sigma)) {
        return false;
    }
    return std::all_of(spec.functionals.begin(), spec.functionals.end(), [&](const BoundedFunctional& f) {
        const double v = f.form(sigma);
        return v >= f.lower - bound_tol && v <= f.upper + bound_tol;
    });
}

bool interior_member(const RegionSpec& spec, std::span<const double> sigma, double margin)
{
    for (const auto& o : spec.orderings) {
        if (!(o(sigma) >= margin)) {
            return false;
        }
    }
    return std::all_of(spec.functionals.begin(), spec.functionals.end(), [&](const BoundedFunctional& f) {
        const double v = f.form(sigma);
        return v >= f.lower + margin && v <= f.upper - margin;
    });
}

std::vector<double> region_center(RegionKind kind, double tau)
{
    switch (kind) {
    case RegionKind::IR3:
        return {tau / 3.0, 2.0 * tau / 3.0};
    case RegionKind::IR4:
        return {tau / 2.0, tau / 4.0, 3.0 * tau / 4.0};
    case RegionKind::IR5:
        return {2.0 * tau / 5.0, tau / 5.0, 4.0 * tau / 5.0, 3.0 * tau / 5.0};
    }
    return {};
}

double existence_functional(RegionKind kind, const ModelParams& params)
{
    const PulseResponse h(params);
    const double tau = params.tau();
    switch (kind) {
    case RegionKind::IR3:
        return h(tau / 3.0) + tau / 3.0;
    case RegionKind::IR4:
        return h(tau / 2.0) + tau / 4.0;
    case RegionKind::IR5:
        return h(tau / 5.0) + 2.0 * tau / 5.0;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

bool region_exists(RegionKind kind, const ModelParams& params)
{
    if (!(params.tau() > 0.0)) {
        return false;
    }
    const double v = existence_functional(kind, params);
    return v >= firing_threshold(params, 1) - kBoundTol && v <= 1.0 + kBoundTol;
}

NetworkState section_embedding(RegionKind kind, std::span<const double> sigma, const ModelParams& params)
{
    const auto spec = region_spec(kind, params);
    if (static_cast<int>(sigma.size()) != spec.dim) {
        throw std::invalid_argument("sigma has " + std::to_string(sigma.size()) + " components, " +
                                    std::string(to_string(kind)) + " needs " + std::to_string(spec.dim));
    }
    if (!ordered(spec, sigma)) {
        switch (kind) {
        case RegionKind::IR3:
            throw std::invalid_argument("sigma violates the ordering 0 < sigma1 < sigma3 < tau");
        case RegionKind::IR4:
            throw std::invalid_argument("sigma violates the ordering 0 < sigma2 < sigma1 < sigma3 < tau");
        case RegionKind::IR5:
            throw std::invalid_argument("sigma violates the ordering 0 < sigma2_1 < sigma1 < sigma3 < sigma2_2 < tau");
        }
    }
    const PulseResponse h(params);
    NetworkState s;
    switch (kind) {
    case RegionKind::IR3: {
        // Post-delivery phases: at the section each of the pair has just
        // received the other's pulse, which the F1 functional assumes.
        const double s1 = sigma[0], s3 = sigma[1];
        s.phases = {h(s1), h(s1), 0.0};
        s.ftds = {{s1}, {s1}, {0.0, s3}};
        break;
    }
    case RegionKind::IR4: {
        const double s1 = sigma[0], s2 = sigma[1], s3 = sigma[2];
        s.phases = {h(s1), s2, 0.0};
        s.ftds = {{s1}, {s2}, {0.0, s3}};
        break;
    }
    case RegionKind::IR5: {
        const double s1 = sigma[0], s21 = sigma[1], s22 = sigma[2], s3 = sigma[3];
        s.phases = {h(s1 - s21) + s21, h(s21), 0.0};
        s.ftds = {{s1}, {s21, s22}, {0.0, s3}};
        break;
    }
    }
    return s;
}

Sigma3 g_map(const Sigma3& sigma, double tau)
{
    return {sigma[2] - sigma[1], sigma[0] - sigma[1], tau - sigma[1]};
}

IntMatrix3 multiply(const IntMatrix3& a, const IntMatrix3& b)
{
    IntMatrix3 c{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            for (int k = 0; k < 3; ++k) {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    return c;
}

IntMatrix3 matrix_power(const IntMatrix3& a, int k)
{
    IntMatrix3 r{};
    for (int i = 0; i < 3; ++i) {
        r[i][i] = 1;
    }
    for (int i = 0; i < k; ++i) {
        r = multiply(r, a);
    }
    return r;
}

GMapAlgebra g_algebra(double tau)
{
    if (!(tau > 0.0)) {
        throw std::invalid_argument("tau must be positive");
    }
    GMapAlgebra alg;
    alg.linear = {{{0, -1, 1}, {1, -1, 0}, {0, -1, 0}}};
    alg.offset = {0.0, 0.0, tau};
    alg.center = {tau / 2.0, tau / 4.0, 3.0 * tau / 4.0};
    return alg;
}

// ---- volume ----------------------------------------------------------------

std::string_view to_string(VolumeMethod method)
{
    return method == VolumeMethod::Exact ? "exact" : "montecarlo";
}

std::string_view to_string(PolytopeStatus status)
{
    switch (status) {
    case PolytopeStatus::Empty:
        return "empty";
    case PolytopeStatus::Degenerate:
        return "degenerate";
    case PolytopeStatus::Ok:
        return "ok";
    }
    return "?";
}

std::vector<Halfspace> region_halfspaces(const RegionSpec& spec)
{
    std::vector<Halfspace> hs;
    auto negated = [](const std::vector<double>& c) {
        std::vector<double> n(c);
        for (auto& v : n) {
            v = -v;
        }
        return n;
    };
    for (const auto& o : spec.orderings) {
        hs.push_back(Halfspace{negated(o.coeffs), o.constant});
    }
    for (const auto& f : spec.functionals) {
        hs.push_back(Halfspace{negated(f.form.coeffs), f.form.constant - f.lower});
        hs.push_back(Halfspace{f.form.coeffs, f.upper - f.form.constant});
    }
    return hs;
}

double ordering_simplex_volume(const RegionSpec& spec)
{
    double v = 1.0;
    for (int k = 1; k <= spec.dim; ++k) {
        v *= spec.tau / k;
    }
    return v;
}

std::vector<double> sample_ordering_simplex(const RegionSpec& spec, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> unit(0.0, spec.tau);
    std::vector<double> u(spec.dim);
    for (auto& x : u) {
        x = unit(rng);
    }
    std::sort(u.begin(), u.end());
    std::vector<double> sigma(spec.dim);
    for (int i = 0; i < spec.dim; ++i) {
        sigma[spec.chain[i]] = u[i];
    }
    return sigma;
}

VolumeReport region_volume_exact(const RegionSpec& spec)
{
    VolumeReport r;
    r.method = VolumeMethod::Exact;
    r.simplex_volume = ordering_simplex_volume(spec);
    const auto hs = region_halfspaces(spec);
    const auto pv = polytope_volume(hs, spec.dim);
    r.status = pv.status;
    r.volume = pv.status == PolytopeStatus::Ok ? pv.volume : 0.0;
    return r;
}

VolumeReport region_volume_montecarlo(const RegionSpec& spec, std::int64_t samples, std::uint64_t seed, int threads)
{
    if (samples < 1) {
        throw std::invalid_argument("Monte Carlo volume needs at least one sample");
    }
    constexpr int kShards = 64;
    std::vector<std::int64_t> hits(kShards, 0);
    detail::parallel_for(kShards, threads, [&](std::size_t shard) {
        const std::int64_t budget = samples / kShards + (static_cast<std::int64_t>(shard) < samples % kShards ? 1 : 0);
        std::mt19937_64 rng(splitmix64(seed ^ splitmix64(shard + 1)));
        std::int64_t count = 0;
        for (std::int64_t k = 0; k < budget; ++k) {
            const auto x = sample_ordering_simplex(spec, rng);
            if (membership(spec, x)) {
                ++count;
            }
        }
        hits[shard] = count;
    });

    VolumeReport r;
    r.method = VolumeMethod::MonteCarlo;
    r.samples = samples;
    r.seed = seed;
    for (auto h : hits) {
        r.hits += h;
    }
    r.simplex_volume = ordering_simplex_volume(spec);
    const double p = static_cast<double>(r.hits) / static_cast<double>(samples);
    r.volume = p * r.simplex_volume;
    r.std_error = r.simplex_volume * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
    r.status = r.hits > 0 ? PolytopeStatus::Ok : PolytopeStatus::Empty;
    return r;
}

VolumeReport region_volume(const RegionSpec& spec, VolumeMethod method, std::int64_t samples, std::uint64_t seed,
                           int threads)
{
    if (method == VolumeMethod::Exact) {
        return region_volume_exact(spec);
    }
    return region_volume_montecarlo(spec, samples, seed, threads);
}

// ---- sampling and cross-validation -----------------------------------------

std::vector<std::vector<double>> sample_interior(const RegionSpec& spec, int count, std::uint64_t seed, double margin,
                                                 std::int64_t max_attempts)
{
    std::mt19937_64 rng(splitmix64(seed));
    std::vector<std::vector<double>> out;
    out.reserve(count);
    std::int64_t attempts = 0;
    while (static_cast<int>(out.size()) < count) {
        if (attempts++ >= max_attempts) {
            throw std::runtime_error("could not draw " + std::to_string(count) + " interior points of " +
                                     std::string(to_string(spec.kind)) + " in " + std::to_string(max_attempts) +
                                     " attempts");
        }
        auto x = sample_ordering_simplex(spec, rng);
        if (interior_member(spec, x, margin)) {
            out.push_back(std::move(x));
        }
    }
    return out;
}

std::vector<std::array<double, 2>> analytic_projection(RegionKind kind, const ModelParams& params, int count,
                                                       std::uint64_t seed)
{
    const auto spec = region_spec(kind, params);
    std::vector<std::array<double, 2>> out;
    for (const auto& sigma : sample_interior(spec, count, seed, 0.0)) {
        const auto s = section_embedding(kind, sigma, params);
        out.push_back({s.phases[0], s.phases[1]});
    }
    return out;
}

bool in_ir4_projection(const ModelParams& params, double theta1, double theta2, double tol)
{
    const auto spec = ir4_spec(params);
    const PulseResponse h(params);
    const double s1 = (theta1 - h.offset(1)) / h.slope(1);
    const double s2 = theta2;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    // Restrict the affine constraint a * sigma3 + base in [low, high] to sigma3.
    auto restrict = [&](const AffineForm& f, double low, double high) {
        const double a = f.coeffs[2];
        const double base = f.constant + f.coeffs[0] * s1 + f.coeffs[1] * s2;
        if (a == 0.0) {
            if (base < low || base > high) {
                lo = std::numeric_limits<double>::infinity();
            }
            return;
        }
        double x1 = (low - base) / a;
        double x2 = (high - base) / a;
        if (a < 0.0) {
            std::swap(x1, x2);
        }
        lo = std::max(lo, x1);
        hi = std::min(hi, x2);
    };
    const double inf = std::numeric_limits<double>::infinity();
    for (const auto& o : spec.orderings) {
        restrict(o, -tol, inf);
    }
    for (const auto& f : spec.functionals) {
        restrict(f.form, f.lower - tol, f.upper + tol);
    }
    return lo <= hi;
}

OracleReport region_oracle(RegionKind kind, const ModelParams& params, int n_samples, std::uint64_t seed)
{
    if (!region_exists(kind, params)) {
        throw std::invalid_argument("region " + std::string(to_string(kind)) + " is empty at these parameters");
    }
    const auto spec = region_spec(kind, params);
    const double tau = params.tau();

    OracleReport report;
    report.kind = kind;
    report.samples = n_samples;
    report.seed = seed;
    report.expected_poincare_period = region_poincare_period(kind);
    switch (kind) {
    case RegionKind::IR3:
        report.expected_orbit_period = 2.0 * tau;
        break;
    case RegionKind::IR4:
    case RegionKind::IR5:
        report.expected_orbit_period = 3.0 * tau;
        break;
    }

    PeriodicityOptions popt;
    popt.max_iter = 64;
    std::vector<PulseSignature> signatures;
    std::vector<std::vector<double>> sigmas;

    for (const auto& sigma : sample_interior(spec, n_samples, seed)) {
        const auto state = section_embedding(kind, sigma, params);
        const auto result = detect_periodicity(state, params, popt);
        if (!result) {
            report.counterexamples.push_back({sigma, "orbit not periodic within 64 returns"});
            continue;
        }
        ++report.period_histogram[result->poincare_period];
        if (result->poincare_period != report.expected_poincare_period) {
            report.counterexamples.push_back(
                {sigma, "Poincare period " + std::to_string(result->poincare_period) + ", expected " +
                            std::to_string(report.expected_poincare_period)});
            continue;
        }
        if (result->transient_iters != 0) {
            report.counterexamples.push_back(
                {sigma, "embedded state is not on its cycle (transient " + std::to_string(result->transient_iters) +
                            ")"});
        }
        if (report.expected_orbit_period && std::abs(result->orbit_period - *report.expected_orbit_period) > 1e-9) {
            report.counterexamples.push_back({sigma, "orbit period " + std::to_string(result->orbit_period)});
        }
        if (kind == RegionKind::IR3) {
            Engine engine(state, params);
            while (engine.clock() < result->orbit_period) {
                (void)engine.step();
                const auto& th = engine.phases();
                if (std::abs(th[0] - th[1]) > 1e-12) {
                    report.counterexamples.push_back({sigma, "oscillators 1 and 2 desynchronized"});
                    break;
                }
            }
        }
        signatures.push_back(pulse_signature(*result, params));
        sigmas.push_back(sigma);
    }

    for (std::size_t a = 0; a < signatures.size(); ++a) {
        for (std::size_t b = a + 1; b < signatures.size(); ++b) {
            if (!pulse_equivalent(signatures[a], signatures[b])) {
                report.signatures_equivalent = false;
                report.counterexamples.push_back({sigmas[b], "not pulse equivalent to sample " + std::to_string(a)});
                break;
            }
        }
        if (!report.signatures_equivalent) {
            break;
        }
    }
    return report;
}

}  // namespace pcon
