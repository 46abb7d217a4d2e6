#pragma once
// Shared reference configurations for the test suites: a symmetric setup with
// realistic fiber and detector figures.

#include <snsrate/channel_model.hpp>

namespace testsupport {

inline snsrate::DeviceParams toy_device(double distance_km) {
    snsrate::DeviceParams d;
    d.distance_km = distance_km;
    d.dark_count_prob = 1e-8;
    d.misalignment = 0.03;
    d.detector_eff = 0.30;
    d.fiber_loss_db_km = 0.2;
    return d;
}

inline snsrate::ProtocolParams toy_protocol(double n_total = 1e12) {
    snsrate::ProtocolParams p;
    p.mu_az = 0.48;
    p.mu_bz = 0.48;
    p.eps_a = 0.10;
    p.eps_b = 0.10;
    p.p_z = 0.70;
    p.mu_a1 = 0.10;
    p.mu_a2 = 0.50;
    p.mu_b1 = 0.10;
    p.mu_b2 = 0.50;
    p.p_a1 = 0.25;
    p.p_a2 = 0.15;
    p.p_b1 = 0.25;
    p.p_b2 = 0.15;
    p.lambda_slice = 0.12;
    p.n_total = n_total;
    return p;
}

} // namespace testsupport
