#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <snsrate/key_rate.hpp>

using namespace snsrate;

namespace {

EpsLedger uniform_ledger(int count_terms, int phase_terms, double value) {
    EpsLedger l;
    for (int i = 0; i < count_terms; ++i)
        l.log("count term " + std::to_string(i), EpsChain::count, value);
    for (int i = 0; i < phase_terms; ++i)
        l.log("phase term " + std::to_string(i), EpsChain::phase, value);
    return l;
}

RateParams default_rp() {
    RateParams rp;
    rp.f_ec = 1.1;
    rp.eps_hat = 1e-20;
    rp.eps_pa = 1e-20;
    rp.eps_cor = 1e-20;
    return rp;
}

} // namespace

TEST_CASE("binary entropy endpoints and symmetry clamp") {
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(0.5) == Catch::Approx(1.0));
    CHECK(binary_entropy(0.25) == Catch::Approx(0.8112781245));
    // arguments past one half fold back to the maximum
    CHECK(binary_entropy(0.7) == Catch::Approx(1.0));
    CHECK(binary_entropy(1.0) == Catch::Approx(1.0));
    CHECK(binary_entropy(-0.1) == 0.0);
}

TEST_CASE("ledger pricing reproduces the three published security levels") {
    const double xi = 1e-20;

    SECTION("twelve terms") {
        auto l = uniform_ledger(9, 3, xi);
        auto sec = security_epsilon(l, xi, xi, xi);
        CHECK(sec.term_count == 12);
        CHECK(sec.eps_e == Catch::Approx(3e-20));
        CHECK(sec.eps_n1 == Catch::Approx(9e-20));
        CHECK(sec.eps_sec == Catch::Approx(1.39e-9).epsilon(0.05));
        CHECK(sec.eps_tol == Catch::Approx(sec.eps_sec + xi));
    }

    SECTION("thirty-four terms") {
        auto l = uniform_ledger(12, 22, xi);
        auto sec = security_epsilon(l, xi, xi, xi);
        CHECK(sec.term_count == 34);
        CHECK(sec.eps_sec == Catch::Approx(2.33e-9).epsilon(0.05));
    }

    SECTION("two halves double the level, correctness charged once") {
        auto l = uniform_ledger(12, 22, xi);
        auto sec = security_epsilon(l, xi, xi, xi);
        auto rp = default_rp();
        auto sub = detail::rate_from_terms(Pipeline::oper, 1e8, 0.01, 1e6, sec, rp, 1e12);
        auto total = rate_aopp(sub, sub, xi);
        CHECK(total.eps_sec == Catch::Approx(4.66e-9).epsilon(0.05));
        CHECK(total.eps_tol == Catch::Approx(total.eps_sec + xi));
        CHECK(total.term_count == 68);
        CHECK(total.rate == Catch::Approx(2.0 * sub.rate));
        CHECK(total.pipeline == Pipeline::aopp);
    }
}

TEST_CASE("ledger pricing edge behavior") {
    EpsLedger empty;
    auto sec = security_epsilon(empty, 0.0, 0.0, 0.0);
    CHECK(sec.eps_sec == 0.0);
    CHECK(sec.eps_tol == 0.0);
    CHECK(sec.term_count == 0);

    EpsLedger dirty;
    dirty.log("unrouted", EpsChain::unassigned, 1e-20);
    CHECK_THROWS_AS(security_epsilon(dirty, 0.0, 0.0, 0.0), std::logic_error);

    EpsLedger weighted;
    weighted.log("heavy", EpsChain::phase, 1e-20, 5);
    auto w = security_epsilon(weighted, 0.0, 0.0, 0.0);
    CHECK(w.term_count == 5);
    CHECK(w.eps_e == Catch::Approx(5e-20));
}

TEST_CASE("extraction formula limits") {
    const double xi = 1e-20;
    auto sec = security_epsilon(uniform_ledger(9, 3, xi), xi, xi, xi);
    auto rp = default_rp();
    const double n_tol = 1e12;

    SECTION("lossless limit approaches the signal count") {
        TwccResult twcc;
        twcc.n_uu_lower = 1000000000;
        twcc.e_ph_final = 0.0;
        auto rep = rate_standard_twcc(twcc, sec, rp, n_tol);
        CHECK(rep.rate == Catch::Approx(1e9 / n_tol).epsilon(1e-6));
        CHECK_FALSE(rep.zero_clamped);
        // the tail terms are the only cost here
        CHECK(rep.tail_cost ==
              Catch::Approx(std::log2(2.0 / sec.eps_sec) +
                            2.0 * std::log2(1.0 / (std::sqrt(2.0) * xi * xi))));
    }

    SECTION("no surviving signal gives a clamped zero") {
        TwccResult twcc;
        auto rep = rate_standard_twcc(twcc, sec, rp, n_tol);
        CHECK(rep.rate == 0.0);
        CHECK(rep.zero_clamped);
    }

    SECTION("saturated phase error gives a flagged zero") {
        TwccResult twcc;
        twcc.n_uu_lower = 1000000;
        twcc.e_ph_final = 0.62;
        auto rep = rate_standard_twcc(twcc, sec, rp, n_tol);
        CHECK(rep.rate == 0.0);
        CHECK(rep.phase_saturated);
        CHECK(rep.zero_clamped);
    }
}

TEST_CASE("single-class and three-class formulas agree on mimicking inputs") {
    const double xi = 1e-20;
    auto sec = security_epsilon(uniform_ledger(12, 22, xi), xi, xi, xi);
    auto rp = default_rp();
    const double n_lower = 1e6, m_upper = 1.7e4, n_cost = 5e5, e_cost = 0.02;

    TwccResult mimic;
    mimic.n_uu_lower = static_cast<std::int64_t>(n_lower);
    mimic.e_ph_final = m_upper / n_lower;
    mimic.n_t1 = n_cost;
    mimic.e_1 = e_cost;
    auto via_classes = rate_standard_twcc(mimic, sec, rp, 1e12);
    auto via_single = rate_oper(n_lower, m_upper, n_cost, e_cost, sec, rp, 1e12);
    CHECK(via_single.rate == Catch::Approx(via_classes.rate).epsilon(1e-14));
    CHECK(via_single.tail_cost == Catch::Approx(via_classes.tail_cost));
}

TEST_CASE("rate is monotone in every error argument") {
    const double xi = 1e-20;
    auto sec = security_epsilon(uniform_ledger(9, 3, xi), xi, xi, xi);
    auto rp = default_rp();

    double prev = 1.0;
    for (double e_ph : {0.0, 0.01, 0.05, 0.1, 0.2, 0.35, 0.5}) {
        TwccResult t;
        t.n_uu_lower = 100000000;
        t.e_ph_final = e_ph;
        t.n_t1 = 1e8;
        t.e_1 = 0.01;
        double r = rate_standard_twcc(t, sec, rp, 1e12).rate;
        CHECK(r <= prev);
        CHECK(r >= 0.0);
        prev = r;
    }

    prev = 1.0;
    for (double e1 : {0.0, 0.005, 0.02, 0.08, 0.2, 0.5}) {
        TwccResult t;
        t.n_uu_lower = 100000000;
        t.e_ph_final = 0.02;
        t.n_t1 = 1e8;
        t.e_1 = e1;
        double r = rate_standard_twcc(t, sec, rp, 1e12).rate;
        CHECK(r <= prev);
        prev = r;
    }
}

TEST_CASE("plain-string formula uses the whole string's correction cost") {
    const double xi = 1e-20;
    auto sec = security_epsilon(uniform_ledger(8, 3, xi), xi, xi, xi);
    auto rp = default_rp();
    auto rep = rate_plain_sns(2e8, 4e6, 1e9, 0.02, sec, rp, 1e12);
    CHECK(rep.pipeline == Pipeline::plain_sns);
    CHECK(rep.e_ph == Catch::Approx(0.02));
    CHECK(rep.ec_cost == Catch::Approx(1.1 * 1e9 * binary_entropy(0.02)));
    CHECK(rep.rate > 0.0);

    auto zero = rate_plain_sns(0.0, 0.0, 1e9, 0.02, sec, rp, 1e12);
    CHECK(zero.rate == 0.0);
}

TEST_CASE("repeaterless references") {
    // half transmission: one bit per pulse with ideal devices
    const double d_half = 10.0 * std::log10(2.0) / 0.2;
    auto b = plob_bounds(d_half, 0.2, 0.3);
    CHECK(b.absolute == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(b.relative < b.absolute);

    // detector efficiency charged to the channel is a pure distance shift
    auto shifted = plob_bounds(d_half + 10.0 * std::log10(1.0 / (0.3 * 0.3)) / 0.2, 0.2, 1.0);
    (void)shifted;

    for (double d : {0.0, 1.0, 50.0, 150.0, 400.0, 700.0}) {
        auto p = plob_bounds(d, 0.2, 0.3);
        CHECK(p.relative <= p.absolute);
        CHECK(p.absolute <= kPlobCeiling);
        CHECK(p.relative > 0.0);
    }

    auto capped = plob_bounds(0.0, 0.2, 1.0);
    CHECK(capped.absolute == kPlobCeiling);
    CHECK(capped.relative == kPlobCeiling);

    auto ideal = plob_bounds(100.0, 0.2, 1.0);
    CHECK(ideal.relative == Catch::Approx(ideal.absolute));

    CHECK_THROWS_AS(plob_bounds(-1.0, 0.2, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(plob_bounds(10.0, 0.2, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(plob_bounds(10.0, 0.0, 0.3), std::invalid_argument);
}
