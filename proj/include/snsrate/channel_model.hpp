#pragma once
// Deterministic channel and detection model for a two-arm single-photon
// interference setup: coherent pulses meet at a central beamsplitter after
// symmetric fiber arms, and clicks are two threshold detectors with dark
// counts. Produces expected per-window counting rates and error rates; no
// sampling is involved anywhere.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace snsrate {

struct DeviceParams {
    double distance_km = 0.0;        // total separation; each arm is half
    double dark_count_prob = 0.0;    // per detector per window
    double misalignment = 0.0;       // probability a click lands on the wrong port
    double detector_eff = 1.0;
    double fiber_loss_db_km = 0.2;
};

struct ProtocolParams {
    // signal-window intensities and send probabilities
    double mu_az = 0.0, mu_bz = 0.0;
    double eps_a = 0.0, eps_b = 0.0;  // probability of sending in a signal window
    double p_z = 0.0;                 // probability a window is a signal window
    // offline-window source mix: vacuum / first / second intensity
    double mu_a1 = 0.0, mu_a2 = 0.0;
    double mu_b1 = 0.0, mu_b2 = 0.0;
    double p_a1 = 0.0, p_a2 = 0.0;    // vacuum takes the remainder
    double p_b1 = 0.0, p_b2 = 0.0;
    double lambda_slice = 0.0;        // phase post-selection width
    double n_total = 0.0;             // total pulse pairs
};

enum class StatsKind { expected_rates, observed_counts };

struct ObservedStats {
    StatsKind kind = StatsKind::expected_rates;

    // offline-window counting rates (per pair sent with that source combo)
    double s_ox = 0.0, s_xo = 0.0;   // one side vacuum, other first intensity
    double s_oy = 0.0, s_yo = 0.0;   // one side vacuum, other second intensity
    double s_oo = 0.0;               // both vacuum
    double pairs_ox = 0.0, pairs_xo = 0.0, pairs_oy = 0.0, pairs_yo = 0.0, pairs_oo = 0.0;

    // phase-slice error sample (both sides first intensity, phases aligned)
    double t_x = 0.0;                // error rate per accepted slice pair
    double pairs_slice = 0.0;

    // signal-window aggregates
    double pairs_z = 0.0;            // pairs where both picked the signal window
    double n_t = 0.0;                // heralded signal pairs
    double e_z = 0.0;                // error fraction among them
    double q11 = 0.0, q10 = 0.0, q01 = 0.0, q00 = 0.0;  // send-pattern fractions among heralded
};

namespace detail {

// Gauss-Legendre nodes and weights on [-1, 1], computed once by Newton
// iteration on the Legendre recurrence.
template <int N>
inline const std::array<std::pair<double, double>, N>& gauss_legendre() {
    static const std::array<std::pair<double, double>, N> table = [] {
        std::array<std::pair<double, double>, N> t{};
        for (int i = 0; i < N; ++i) {
            double x = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= N; ++k) {
                    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = N * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            t[i] = {x, 2.0 / ((1.0 - x * x) * dp * dp)};
        }
        return t;
    }();
    return table;
}

inline double click_prob(double intensity, double dark) {
    return 1.0 - (1.0 - dark) * std::exp(-intensity);
}

// exactly one of the two detectors fires, relative phase theta
inline double heralded_at_phase(double x, double y, double dark, double cos_theta) {
    double cross = std::sqrt(x * y) * cos_theta;
    double d_plus = 1.0 - (1.0 - dark) * std::exp(-0.5 * (x + y) - cross);
    double d_minus = 1.0 - (1.0 - dark) * std::exp(-0.5 * (x + y) + cross);
    return d_plus * (1.0 - d_minus) + d_minus * (1.0 - d_plus);
}

// heralding rate with a uniformly random relative phase. The integrand has
// period pi, so the periodic trapezoid rule converges spectrally.
inline double heralded_rate_random_phase(double x, double y, double dark, int points = 512) {
    if (x == 0.0 || y == 0.0) {
        double d = click_prob(0.5 * (x + y), dark);
        return 2.0 * d * (1.0 - d);
    }
    double sum = 0.0;
    for (int k = 0; k < points; ++k) {
        double theta = std::numbers::pi * k / points;
        sum += heralded_at_phase(x, y, dark, std::cos(theta));
    }
    return sum / points;
}

// wrong-port heralding rate at a fixed relative phase delta in [0, pi/2):
// the bright port is the constructive one, and misalignment swaps roles
inline double error_at_phase(double x, double y, double dark, double mis, double cos_delta) {
    double cross = std::sqrt(x * y) * std::abs(cos_delta);
    double d_bright = 1.0 - (1.0 - dark) * std::exp(-0.5 * (x + y) - cross);
    double d_dim = 1.0 - (1.0 - dark) * std::exp(-0.5 * (x + y) + cross);
    return (1.0 - mis) * d_dim * (1.0 - d_bright) + mis * d_bright * (1.0 - d_dim);
}

// error rate averaged over the accepted slice |cos delta| >= 1 - lambda
inline double slice_error_rate(double x, double y, double dark, double mis, double lambda) {
    const double delta0 = std::acos(1.0 - lambda);
    const auto& gl = gauss_legendre<128>();
    double sum = 0.0;
    for (const auto& [node, weight] : gl) {
        double delta = 0.5 * delta0 * (node + 1.0);
        sum += weight * error_at_phase(x, y, dark, mis, std::cos(delta));
    }
    return 0.5 * sum;  // scaled to the mean over [0, delta0]
}

inline void require_prob(double v, const char* what) {
    if (!(v >= 0.0) || !(v <= 1.0)) throw std::invalid_argument(std::string(what) + " outside [0,1]");
}

} // namespace detail

// Relative residual of the send-probability-to-intensity matching condition
// that makes the two single-photon emission paths indistinguishable.
inline double security_constraint_residual(const ProtocolParams& p) {
    double lhs = p.mu_a1 * p.eps_b * (1.0 - p.eps_a) * p.mu_bz * std::exp(-p.mu_bz);
    double rhs = p.mu_b1 * p.eps_a * (1.0 - p.eps_b) * p.mu_az * std::exp(-p.mu_az);
    double scale = std::max(std::abs(lhs), std::abs(rhs));
    if (scale == 0.0) return 0.0;
    return std::abs(lhs - rhs) / scale;
}

inline void validate(const DeviceParams& d) {
    if (!(d.distance_km >= 0.0)) throw std::invalid_argument("device: negative distance");
    if (!(d.dark_count_prob >= 0.0) || !(d.dark_count_prob < 1.0))
        throw std::invalid_argument("device: dark count probability outside [0,1)");
    detail::require_prob(d.misalignment, "device misalignment");
    if (!(d.detector_eff > 0.0) || !(d.detector_eff <= 1.0))
        throw std::invalid_argument("device: detector efficiency outside (0,1]");
    if (!(d.fiber_loss_db_km >= 0.0)) throw std::invalid_argument("device: negative fiber loss");
}

inline void validate(const ProtocolParams& p) {
    for (double mu : {p.mu_az, p.mu_bz, p.mu_a1, p.mu_a2, p.mu_b1, p.mu_b2})
        if (!(mu >= 0.0)) throw std::invalid_argument("protocol: negative intensity");
    if (!(p.mu_a2 > p.mu_a1) || !(p.mu_b2 > p.mu_b1))
        throw std::invalid_argument("protocol: second intensity must exceed the first");
    if (!(p.mu_a1 > 0.0) || !(p.mu_b1 > 0.0))
        throw std::invalid_argument("protocol: first intensity must be positive");
    if (!(p.p_z > 0.0) || !(p.p_z < 1.0))
        throw std::invalid_argument("protocol: signal-window probability outside (0,1)");
    for (double v : {p.eps_a, p.eps_b})
        if (!(v > 0.0) || !(v < 1.0))
            throw std::invalid_argument("protocol: send probability outside (0,1)");
    for (double v : {p.p_a1, p.p_a2, p.p_b1, p.p_b2}) detail::require_prob(v, "source mix");
    if (p.p_a1 + p.p_a2 > 1.0 || p.p_b1 + p.p_b2 > 1.0)
        throw std::invalid_argument("protocol: source mix exceeds unity");
    if (!(p.lambda_slice > 0.0) || !(p.lambda_slice <= 1.0))
        throw std::invalid_argument("protocol: slice width outside (0,1]");
    if (!(p.n_total > 0.0)) throw std::invalid_argument("protocol: nonpositive pulse count");
    if (security_constraint_residual(p) > 1e-9)
        throw std::invalid_argument("protocol: send probabilities and intensities break the "
                                    "single-photon matching condition");
}

inline ObservedStats simulate_observed(const DeviceParams& dev, const ProtocolParams& prot) {
    validate(dev);
    validate(prot);

    const double arm = dev.detector_eff *
                       std::pow(10.0, -dev.fiber_loss_db_km * (dev.distance_km / 2.0) / 10.0);
    const double dark = dev.dark_count_prob;

    ObservedStats st;
    st.kind = StatsKind::expected_rates;

    const double xa1 = prot.mu_a1 * arm, xa2 = prot.mu_a2 * arm;
    const double xb1 = prot.mu_b1 * arm, xb2 = prot.mu_b2 * arm;

    st.s_oo = 2.0 * dark * (1.0 - dark);
    st.s_ox = detail::heralded_rate_random_phase(0.0, xb1, dark);
    st.s_oy = detail::heralded_rate_random_phase(0.0, xb2, dark);
    st.s_xo = detail::heralded_rate_random_phase(xa1, 0.0, dark);
    st.s_yo = detail::heralded_rate_random_phase(xa2, 0.0, dark);

    const double off = (1.0 - prot.p_z) * (1.0 - prot.p_z);
    const double p_a0 = 1.0 - prot.p_a1 - prot.p_a2;
    const double p_b0 = 1.0 - prot.p_b1 - prot.p_b2;
    st.pairs_ox = prot.n_total * off * p_a0 * prot.p_b1;
    st.pairs_oy = prot.n_total * off * p_a0 * prot.p_b2;
    st.pairs_xo = prot.n_total * off * prot.p_a1 * p_b0;
    st.pairs_yo = prot.n_total * off * prot.p_a2 * p_b0;
    st.pairs_oo = prot.n_total * off * p_a0 * p_b0;

    const double slice_fraction = 2.0 * std::acos(1.0 - prot.lambda_slice) / std::numbers::pi;
    st.t_x = detail::slice_error_rate(xa1, xb1, dark, dev.misalignment, prot.lambda_slice);
    st.pairs_slice = prot.n_total * off * prot.p_a1 * prot.p_b1 * slice_fraction;

    // signal windows: each side sends its signal intensity or nothing
    const double xaz = prot.mu_az * arm, xbz = prot.mu_bz * arm;
    const double s11 = detail::heralded_rate_random_phase(xaz, xbz, dark);
    const double s10 = detail::heralded_rate_random_phase(xaz, 0.0, dark);
    const double s01 = detail::heralded_rate_random_phase(0.0, xbz, dark);
    const double s00 = st.s_oo;
    const double p11 = prot.eps_a * prot.eps_b;
    const double p10 = prot.eps_a * (1.0 - prot.eps_b);
    const double p01 = (1.0 - prot.eps_a) * prot.eps_b;
    const double p00 = (1.0 - prot.eps_a) * (1.0 - prot.eps_b);
    const double s_z = p11 * s11 + p10 * s10 + p01 * s01 + p00 * s00;

    st.pairs_z = prot.n_total * prot.p_z * prot.p_z;
    st.n_t = st.pairs_z * s_z;
    if (s_z > 0.0) {
        st.q11 = p11 * s11 / s_z;
        st.q10 = p10 * s10 / s_z;
        st.q01 = p01 * s01 / s_z;
        st.q00 = p00 * s00 / s_z;
    }
    st.e_z = st.q11 + st.q00;
    return st;
}

// Reinterpret expected rates as the realized observation of a run. The tag
// flip is one-way; converting twice indicates an accounting bug upstream.
inline ObservedStats as_observed(const ObservedStats& st) {
    if (st.kind == StatsKind::observed_counts)
        throw std::logic_error("as_observed: statistics already observed");
    ObservedStats out = st;
    out.kind = StatsKind::observed_counts;
    return out;
}

} // namespace snsrate
