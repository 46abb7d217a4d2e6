#include <catch2/catch_amalgamated.hpp>

#include <snsrate/pipeline.hpp>

#include "support/fixtures.hpp"

using namespace snsrate;
using testsupport::toy_device;
using testsupport::toy_protocol;

namespace {

Budgets tight_budgets() { return Budgets{}; }  // defaults: everything 1e-20

RateParams tight_rp() { return RateParams{}; }

} // namespace

TEST_CASE("pipeline ledgers carry the locked term counts and levels") {
    auto dev = toy_device(100.0);
    auto prot = toy_protocol();
    auto st = as_observed(simulate_observed(dev, prot));
    auto bud = tight_budgets();
    auto rp = tight_rp();

    SECTION("plain string: eleven terms") {
        auto out = run_plain(st, prot, bud, rp);
        CHECK(out.ledger.term_count() == 11);
        CHECK(out.ledger.total(EpsChain::count) == Catch::Approx(8e-20));
        CHECK(out.ledger.total(EpsChain::phase) == Catch::Approx(3e-20));
        // at this send probability the whole-string correction cost clamps it
        CHECK(out.report.rate == 0.0);
        CHECK(out.reason == "clamped");

        // a gentler send probability leaves room for a positive plain rate
        auto gentler = prot;
        gentler.eps_a = gentler.eps_b = 0.04;
        auto st2 = as_observed(simulate_observed(dev, gentler));
        auto out2 = run_plain(st2, gentler, bud, rp);
        CHECK(out2.report.rate > 0.0);
        CHECK(out2.ledger.term_count() == 11);
    }

    SECTION("even-parity rejection: twelve terms, first published level") {
        auto out = run_standard(st, prot, bud, rp, TwccMode::strict);
        CHECK(out.ledger.term_count() == 12);
        CHECK(out.ledger.total(EpsChain::count) == Catch::Approx(9e-20));
        CHECK(out.ledger.total(EpsChain::phase) == Catch::Approx(3e-20));
        CHECK(out.report.eps_tol == Catch::Approx(1.39e-9).epsilon(0.05));
        CHECK(out.report.term_count == 12);
        CHECK(out.report.rate > 0.0);
    }

    SECTION("odd-parity rejection: thirty-four terms, second published level") {
        auto out = run_oper(st, prot, bud, rp);
        CHECK(out.ledger.term_count() == 34);
        CHECK(out.ledger.total(EpsChain::count) == Catch::Approx(12e-20));
        CHECK(out.ledger.total(EpsChain::phase) == Catch::Approx(22e-20));
        CHECK(out.report.eps_tol == Catch::Approx(2.33e-9).epsilon(0.05));
        CHECK(out.report.rate > 0.0);
    }

    SECTION("active pairing: sixty-eight terms, third published level") {
        auto out = run_aopp(st, prot, bud, rp);
        CHECK(out.ledger.term_count() == 68);
        CHECK(out.report.term_count == 68);
        CHECK(out.report.eps_tol == Catch::Approx(4.66e-9).epsilon(0.05));
        CHECK(out.report.rate > 0.0);
    }
}

TEST_CASE("pipeline evaluation is deterministic") {
    auto dev = toy_device(120.0);
    auto prot = toy_protocol();
    auto bud = tight_budgets();
    auto rp = tight_rp();
    auto a = evaluate_point(Pipeline::oper, dev, prot, bud, rp, TwccMode::strict);
    auto b = evaluate_point(Pipeline::oper, dev, prot, bud, rp, TwccMode::strict);
    CHECK(a.report.rate == b.report.rate);
    CHECK(a.report.e_ph == b.report.e_ph);
    CHECK(a.n_uu_lower == b.n_uu_lower);
}

TEST_CASE("hopeless channel yields flagged zero rows, not failures") {
    auto dev = toy_device(800.0);
    auto prot = toy_protocol();
    auto bud = tight_budgets();
    auto rp = tight_rp();
    for (Pipeline p : {Pipeline::plain_sns, Pipeline::standard_twcc, Pipeline::oper,
                       Pipeline::aopp}) {
        auto out = evaluate_point(p, dev, prot, bud, rp, TwccMode::strict);
        CHECK(out.report.rate == 0.0);
        CHECK_FALSE(out.reason.empty());
    }
}

TEST_CASE("mode switch leaves rates untouched when no double errors are claimed") {
    auto dev = toy_device(150.0);
    auto prot = toy_protocol();
    auto bud = tight_budgets();
    auto rp = tight_rp();
    auto st = as_observed(simulate_observed(dev, prot));
    auto strict = run_standard(st, prot, bud, rp, TwccMode::strict);
    auto paired = run_standard(st, prot, bud, rp, TwccMode::paired);
    CHECK(strict.report.rate == paired.report.rate);
}

TEST_CASE("active pairing tracks two odd-parity instances at a mid distance") {
    // fixed (unoptimized) parameters: the rejection pipelines stay positive
    // and the active-pairing rate sits near twice one instance, shaded by the
    // pairing-stock imbalance between the two bit classes
    auto dev = toy_device(250.0);
    auto prot = toy_protocol();
    auto bud = tight_budgets();
    auto rp = tight_rp();
    auto st = as_observed(simulate_observed(dev, prot));
    auto twcc = run_standard(st, prot, bud, rp, TwccMode::strict);
    auto oper = run_oper(st, prot, bud, rp);
    auto aopp = run_aopp(st, prot, bud, rp);
    INFO("twcc=" << twcc.report.rate << " oper=" << oper.report.rate
                 << " aopp=" << aopp.report.rate);
    CHECK(twcc.report.rate > 0.0);
    CHECK(oper.report.rate > 0.0);
    CHECK(aopp.report.rate > 1.4 * oper.report.rate);
    CHECK(aopp.report.rate < 2.1 * oper.report.rate);
}
