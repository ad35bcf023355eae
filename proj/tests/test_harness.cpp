#include "wmkubo/harness.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

using namespace wmkubo;

TEST_CASE("log slope fit") {
  SUBCASE("exact power law") {
    const std::vector<double> x{0.1, 0.05, 0.025, 0.0125};
    std::vector<double> e;
    for (double v : x) e.push_back(3.0 * v * v * v);
    const SlopeFit f = fit_log_slope(x, e);
    REQUIRE(f.slope.has_value());
    CHECK(*f.slope == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(f.residual < 1e-12);
    CHECK(f.points == 4);
  }
  SUBCASE("noise floor excludes points") {
    const std::vector<double> x{0.1, 0.05, 0.025, 0.0125};
    const std::vector<double> e{1e-3, 2.5e-4, 1e-14, 1e-15};
    const SlopeFit f = fit_log_slope(x, e);
    CHECK_FALSE(f.slope.has_value());
    CHECK(f.points == 2);
  }
  SUBCASE("scattered data is withheld") {
    const std::vector<double> x{0.1, 0.05, 0.025, 0.0125};
    const std::vector<double> e{1e-3, 1e-2, 1e-5, 1e-3};
    const SlopeFit f = fit_log_slope(x, e);
    CHECK_FALSE(f.slope.has_value());
    CHECK(f.residual >= kSlopeResidualLimit);
  }
}

TEST_CASE("sweep preconditions") {
  const Scenario s = preset("qubit_qubit", {{"n_t", 64}});
  const std::vector<double> two{0.1, 0.01};
  const std::vector<double> narrow{0.1, 0.08, 0.06};
  const std::vector<double> negative{0.1, -0.05, 0.01};
  CHECK_THROWS_AS(lambda_sweep(s, "+", two), std::invalid_argument);
  CHECK_THROWS_AS(lambda_sweep(s, "+", narrow), std::invalid_argument);
  CHECK_THROWS_AS(lambda_sweep(s, "+", negative), std::invalid_argument);
  const std::vector<double> ok{0.16, 0.08, 0.04, 0.02};
  CHECK_THROWS_AS(lambda_sweep(s, "nope", ok), std::out_of_range);
}

TEST_CASE("degenerate coupling axis leaves the slope undefined") {
  const Scenario s = preset("qubit_qubit", {{"n_t", 64}});
  const std::vector<double> lambdas{1e-15, 1e-16, 1e-17};
  const SweepResult r = lambda_sweep(s, "+", lambdas);
  for (const auto& row : r.rows) {
    CHECK(row.err_eq3 < 1e-10);
    CHECK(row.err_modified_kubo < 1e-10);
  }
  CHECK_FALSE(r.eq3.slope.has_value());
  CHECK_FALSE(r.modified_kubo.slope.has_value());
}

TEST_CASE("qubit_qubit sweep slopes") {
  const Scenario s = preset("qubit_qubit", {{"n_t", 256}});
  const std::vector<double> lambdas{0.16, 0.08, 0.04, 0.02};
  const SweepResult r = lambda_sweep(s, "+", lambdas);
  REQUIRE(r.rows.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(r.rows[i].lambda == lambdas[i]);
  REQUIRE(r.eq3.slope.has_value());
  REQUIRE(r.modified_kubo.slope.has_value());
  CHECK(*r.eq3.slope > 2.6);
  CHECK(*r.modified_kubo.slope == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("sweep is bit-for-bit deterministic") {
  const Scenario s = preset("random_seeded", {{"seed", 61}});
  const std::vector<double> lambdas{0.2, 0.1, 0.05, 0.025};
  const SweepResult a = lambda_sweep(s, s.sys_povm.outcomes[0].label, lambdas);
  const SweepResult b = lambda_sweep(s, s.sys_povm.outcomes[0].label, lambdas);
  std::ostringstream ca, cb;
  write_sweep_csv(ca, a);
  write_sweep_csv(cb, b);
  CHECK(ca.str() == cb.str());
  CHECK(sweep_to_json(a) == sweep_to_json(b));
}

TEST_CASE("amplification column on the anomalous preset") {
  const Scenario s = preset("aav_gaussian");
  const std::vector<double> lambdas{0.01, 0.004, 0.001};
  const SweepResult r = lambda_sweep(s, "+", lambdas);
  for (const auto& row : r.rows) {
    CAPTURE(row.lambda);
    CHECK(row.amplification > 1.0);
  }
}

TEST_CASE("negativity search") {
  CHECK_THROWS_AS(negativity_search(1, 0), std::invalid_argument);
  const NegativitySearch found = negativity_search(PinnedNegativity::search_seed, 50);
  REQUIRE(found.hit.has_value());
  CHECK(found.hit->seed == PinnedNegativity::seed);
  CHECK(found.hit->lambda == PinnedNegativity::lambda);
  CHECK(std::min(found.hit->min_taylor_joint, found.hit->min_taylor_conditional) <
        kTaylorNegativityThreshold);
  CHECK(found.hit->min_rational >= -1e-12);
  CHECK(found.min_rational_seen >= -1e-12);

  const NegativitySearch again = negativity_search(PinnedNegativity::search_seed, 50);
  CHECK(again.hit->min_taylor_conditional == found.hit->min_taylor_conditional);
  CHECK(again.trials_run == found.trials_run);
}

TEST_CASE("property campaign") {
  SUBCASE("deterministic report") {
    const CampaignReport a = property_campaign(5, 1);
    const CampaignReport b = property_campaign(5, 1);
    std::ostringstream ca, cb;
    write_campaign_csv(ca, a);
    write_campaign_csv(cb, b);
    CHECK(ca.str() == cb.str());
    CHECK(a.entries.front().scenario == "random_seeded:5");
  }
  SUBCASE("clean scenarios pass") {
    const CampaignReport r = property_campaign(100, 10);
    CHECK(r.failures() == 0);
  }
  SUBCASE("injected fault is reported once") {
    Scenario bad = preset("random_seeded", {{"seed", 3}});
    bad.name = "corrupted";
    bad.rho_i.op *= 1.1;
    const std::vector<Scenario> extra{bad};
    const CampaignReport r = property_campaign(100, 5, extra);
    CHECK(r.failures() == 1);
    CHECK(r.entries.back().scenario == "corrupted");
    CHECK_FALSE(r.entries.back().passed);
    CHECK(r.entries.back().failures.size() == 1);
  }
  CHECK_THROWS_AS(property_campaign(1, 0), std::invalid_argument);
}

TEST_CASE("number formatting keeps full precision") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_double(std::nan("")) == "nan");
}
