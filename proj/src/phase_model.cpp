#include "pcon/phase_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pcon {

namespace {

void require_unit_interval(double v, const char* what)
{
    if (!(v >= 0.0 && v <= 1.0)) {
        throw std::domain_error(std::string(what) + " must lie in [0,1], got " + std::to_string(v));
    }
}

}  // namespace

ModelParams::ModelParams(double b, double epsilon, int n, double tau)
    : b_(b), epsilon_(epsilon), n_(n), tau_(tau), eps_hat_(0.0)
{
    if (!(b > 0.0) || !std::isfinite(b)) {
        throw std::invalid_argument("curvature b must be positive");
    }
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
        throw std::invalid_argument("coupling strength epsilon must be non-negative");
    }
    if (n < 2) {
        throw std::invalid_argument("network needs at least two oscillators");
    }
    if (!(tau >= 0.0) || !std::isfinite(tau)) {
        throw std::invalid_argument("delay tau must be non-negative");
    }
    eps_hat_ = epsilon / static_cast<double>(n - 1);
}

double state_of_phase(double theta, double b)
{
    require_unit_interval(theta, "phase");
    return std::log1p(std::expm1(b) * theta) / b;
}

double phase_of_state(double x, double b)
{
    require_unit_interval(x, "state value");
    return std::expm1(b * x) / std::expm1(b);
}

double pulse_response(double theta, double delta, double b)
{
    if (!(delta >= 0.0)) {
        throw std::domain_error("pulse size must be non-negative");
    }
    const double grow = std::exp(b * delta);
    return grow * theta + std::expm1(b * delta) / std::expm1(b);
}

double multi_pulse_response(double theta, int m, const ModelParams& params)
{
    if (m < 1) {
        throw std::invalid_argument("pulse multiplicity must be at least 1");
    }
    return pulse_response(theta, m * params.eps_hat(), params.b());
}

double phase_increment(double theta, double delta, double b)
{
    return pulse_response(theta, delta, b) - theta;
}

double firing_threshold(const ModelParams& params, int m)
{
    if (m < 1) {
        throw std::invalid_argument("pulse multiplicity must be at least 1");
    }
    const double b = params.b();
    const double bd = b * m * params.eps_hat();
    // (e^b - e^{bd}) / ((e^b - 1) e^{bd}), written to avoid cancellation for small bd.
    return (std::exp(b - bd) - 1.0) / std::expm1(b);
}

PulseResponse::PulseResponse(const ModelParams& params)
    : b_(params.b()), eps_hat_(params.eps_hat())
{
    const int max_m = params.n() - 1;
    slope_.resize(max_m + 1);
    offset_.resize(max_m + 1);
    const double denom = std::expm1(b_);
    for (int m = 0; m <= max_m; ++m) {
        const double bd = b_ * m * eps_hat_;
        slope_[m] = std::exp(bd);
        offset_[m] = std::expm1(bd) / denom;
    }
}

double PulseResponse::slope(int m) const
{
    if (m < 1) {
        throw std::invalid_argument("pulse multiplicity must be at least 1");
    }
    if (m < static_cast<int>(slope_.size())) {
        return slope_[m];
    }
    return std::exp(b_ * m * eps_hat_);
}

double PulseResponse::offset(int m) const
{
    if (m < 1) {
        throw std::invalid_argument("pulse multiplicity must be at least 1");
    }
    if (m < static_cast<int>(offset_.size())) {
        return offset_[m];
    }
    return std::expm1(b_ * m * eps_hat_) / std::expm1(b_);
}

double PulseResponse::operator()(double theta, int m) const
{
    return slope(m) * theta + offset(m);
}

}  // namespace pcon
