#pragma once

#include <vector>

namespace pcon {

/// Network parameters of a homogeneous all-to-all pulse-coupled network with
/// delayed excitatory coupling.
///
/// `b` is the curvature of the state function, `epsilon` the total coupling
/// strength, `n` the number of oscillators and `tau` the pulse delay. Each
/// received pulse advances the state variable by `eps_hat = epsilon / (n - 1)`.
class ModelParams
{
public:
    /// Throws std::invalid_argument if b <= 0, n < 2, tau < 0 or epsilon < 0.
    ModelParams(double b, double epsilon, int n, double tau);

    [[nodiscard]] double b() const noexcept { return b_; }
    [[nodiscard]] double epsilon() const noexcept { return epsilon_; }
    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] double tau() const noexcept { return tau_; }
    [[nodiscard]] double eps_hat() const noexcept { return eps_hat_; }

    [[nodiscard]] ModelParams with_coupling(double epsilon, double tau) const
    {
        return ModelParams(b_, epsilon, n_, tau);
    }

private:
    double b_;
    double epsilon_;
    int n_;
    double tau_;
    double eps_hat_;
};

/// State variable x = f_b(theta) = ln(1 + (e^b - 1) theta) / b.
/// Throws std::domain_error outside [0, 1].
[[nodiscard]] double state_of_phase(double theta, double b);

/// Inverse of state_of_phase. Throws std::domain_error outside [0, 1].
[[nodiscard]] double phase_of_state(double x, double b);

/// Phase after receiving a pulse of state-size `delta`, ignoring the
/// threshold: e^{b delta} theta + (e^{b delta} - 1) / (e^b - 1).
/// Affine and strictly increasing in theta. The result may exceed 1.
[[nodiscard]] double pulse_response(double theta, double delta, double b);

/// Response to `m` simultaneous pulses of size eps_hat. Throws for m < 1.
[[nodiscard]] double multi_pulse_response(double theta, int m, const ModelParams& params);

/// Phase increment pulse_response(theta, delta) - theta.
[[nodiscard]] double phase_increment(double theta, double delta, double b);

/// Smallest phase that reaches threshold on receiving `m` simultaneous pulses,
/// i.e. the preimage of 1 under the m-pulse response. m = 1 and m = 2 give the
/// single and double pulse thresholds.
[[nodiscard]] double firing_threshold(const ModelParams& params, int m = 1);

/// The pulse response restricted to multiples of eps_hat, in closed affine form
/// theta -> slope(m) * theta + offset(m). Slopes and offsets are cached for
/// m = 1 .. n-1 so the event engine never goes through f and its inverse.
class PulseResponse
{
public:
    explicit PulseResponse(const ModelParams& params);

    /// Unclamped response to m >= 1 simultaneous pulses.
    [[nodiscard]] double operator()(double theta, int m = 1) const;

    [[nodiscard]] double slope(int m = 1) const;
    [[nodiscard]] double offset(int m = 1) const;

private:
    double b_;
    double eps_hat_;
    std::vector<double> slope_;
    std::vector<double> offset_;
};

}  // namespace pcon
