#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "stfh/posterior.hpp"

using namespace stfh;

namespace {

Eigen::MatrixXd row_matrix(std::initializer_list<double> values) {
  Eigen::MatrixXd m(1, static_cast<int>(values.size()));
  int i = 0;
  for (double v : values) m(0, i++) = v;
  return m;
}

}  // namespace

TEST_CASE("trend examples") {
  PanelIndex idx{1, 3};
  CHECK(trend_draws(row_matrix({2, 2, 2}), idx, 0)[0] == doctest::Approx(0.0));
  CHECK(trend_draws(row_matrix({3, 6, 9}), idx, 0)[0] == doctest::Approx(3.0));
  CHECK(trend_draws(row_matrix({1, 2, 4}), idx, 0)[0] == doctest::Approx(1.5));
}

TEST_CASE("trend rejects a single time step") {
  PanelIndex idx{1, 1};
  CHECK_THROWS_AS(trend_draws(row_matrix({1.0}), idx, 0), Error);
}

TEST_CASE("trend shift invariance and scale equivariance") {
  PanelIndex idx{2, 4};
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 2.0);
  Eigen::MatrixXd mu(5, 8);
  for (int l = 0; l < 5; ++l)
    for (int i = 0; i < 8; ++i) mu(l, i) = noise(rng);

  Eigen::MatrixXd base = trend_draws_all(mu, idx);
  Eigen::MatrixXd shifted = trend_draws_all(mu.array() + 42.0, idx);
  CHECK((base - shifted).cwiseAbs().maxCoeff() < 1e-10);
  Eigen::MatrixXd scaled = trend_draws_all(3.0 * mu, idx);
  CHECK((3.0 * base - scaled).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("change examples") {
  PanelIndex idx{1, 4};
  Eigen::MatrixXd mu = row_matrix({7, 1, 2, 10});
  CHECK(change_draws(mu, idx, 0, 0, 3)[0] == doctest::Approx(3.0));
  CHECK_THROWS_AS(change_draws(mu, idx, 0, 2, 2), Error);
  CHECK_THROWS_AS(change_draws(mu, idx, 0, 3, 1), Error);
}

TEST_CASE("change quantiles match paired differences") {
  PanelIndex idx{1, 2};
  std::mt19937_64 rng(4);
  std::normal_distribution<double> noise(0.0, 1.0);
  Eigen::MatrixXd mu(400, 2);
  for (int l = 0; l < 400; ++l) {
    mu(l, 0) = noise(rng);
    mu(l, 1) = 2.0 + noise(rng);
  }
  Eigen::VectorXd delta = change_draws(mu, idx, 0, 0, 1);
  Eigen::VectorXd oracle = mu.col(1) - mu.col(0);
  std::sort(delta.data(), delta.data() + delta.size());
  std::sort(oracle.data(), oracle.data() + oracle.size());
  CHECK((delta - oracle).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("aggregates") {
  PanelIndex idx{2, 2};
  // area 0: mu = (4, 6); area 1: mu = (8, 2), single draw
  Eigen::MatrixXd mu = row_matrix({4, 6, 8, 2});
  Eigen::VectorXd area(2);
  area << 1.0, 3.0;

  SUBCASE("weighted total and density") {
    auto agg = totals_and_aggregates(mu, idx, area, {0, 1}, "both", 0, 1);
    CHECK(agg.omega(0, 0) == doctest::Approx(4.0 + 24.0));
    CHECK(agg.mu(0, 0) == doctest::Approx(7.0));
    CHECK(agg.area_total == doctest::Approx(4.0));
  }
  SUBCASE("single-area group is the area itself") {
    auto agg = totals_and_aggregates(mu, idx, area, {1}, "one", 0, 1);
    CHECK(agg.mu(0, 0) == doctest::Approx(8.0));
    CHECK(agg.mu(0, 1) == doctest::Approx(2.0));
  }
  SUBCASE("aggregate trend equals trend of the aggregate density series") {
    auto agg = totals_and_aggregates(mu, idx, area, {0, 1}, "both", 0, 1);
    PanelIndex one{1, 2};
    Eigen::VectorXd direct = trend_draws(agg.mu, one, 0);
    CHECK(agg.theta[0] == doctest::Approx(direct[0]));
    CHECK(agg.delta[0] == doctest::Approx(agg.mu(0, 1) - agg.mu(0, 0)));
    CHECK(agg.theta_total[0] == doctest::Approx(4.0 * agg.theta[0]));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(totals_and_aggregates(mu, idx, area, {}, "none", 0, 1), Error);
    Eigen::VectorXd bad = area;
    bad[0] = 0.0;
    CHECK_THROWS_AS(totals_and_aggregates(mu, idx, bad, {0}, "bad", 0, 1), Error);
  }
  SUBCASE("linearity: group omega is the sum of member omegas") {
    auto both = totals_and_aggregates(mu, idx, area, {0, 1}, "b", 0, 1);
    auto a0 = totals_and_aggregates(mu, idx, area, {0}, "a0", 0, 1);
    auto a1 = totals_and_aggregates(mu, idx, area, {1}, "a1", 0, 1);
    CHECK((both.omega - (a0.omega + a1.omega)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("summaries") {
  SUBCASE("constant draws") {
    Summary s = summarize(Eigen::VectorXd::Constant(10, 3.5));
    CHECK(s.mean == 3.5);
    CHECK(s.median == 3.5);
    CHECK(s.lo == 3.5);
    CHECK(s.hi == 3.5);
    CHECK(s.excludes_zero);
    Summary z = summarize(Eigen::VectorXd::Zero(10));
    CHECK(!z.excludes_zero);
  }
  SUBCASE("symmetric draws straddle zero") {
    Eigen::VectorXd d(4);
    d << -1, 1, -1, 1;
    Summary s = summarize(d);
    CHECK(s.median == 0.0);
    CHECK(!s.excludes_zero);
    CHECK(s.lo < 0.0);
    CHECK(s.hi > 0.0);
  }
  SUBCASE("quantiles match a sort oracle") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int rep = 0; rep < 5; ++rep) {
      Eigen::VectorXd d(501);
      for (int i = 0; i < d.size(); ++i) d[i] = noise(rng);
      std::vector<double> sorted(d.data(), d.data() + d.size());
      std::sort(sorted.begin(), sorted.end());
      for (double p : {0.025, 0.25, 0.5, 0.9, 0.975}) {
        const double pos = p * (sorted.size() - 1);
        const size_t lo = static_cast<size_t>(pos);
        const double h = pos - lo;
        const double expect =
            h == 0.0 ? sorted[lo] : (1 - h) * sorted[lo] + h * sorted[lo + 1];
        CHECK(quantile(d, p) == doctest::Approx(expect).epsilon(1e-15));
      }
    }
  }
}

TEST_CASE("waic") {
  SUBCASE("single draw has zero effective parameters") {
    Eigen::MatrixXd ll(1, 3);
    ll << -1.0, -2.0, -0.5;
    WaicResult w = waic(ll);
    CHECK(w.p_eff == 0.0);
    CHECK(w.waic == doctest::Approx(-2.0 * ll.sum()));
  }
  SUBCASE("matches a literal formula oracle") {
    Eigen::MatrixXd ll(4, 3);
    ll << -1.0, -2.0, -0.5, -1.5, -1.8, -0.7, -0.9, -2.2, -0.6, -1.2, -1.9, -0.55;
    WaicResult w = waic(ll);
    double elpd = 0.0, p_eff = 0.0;
    for (int i = 0; i < 3; ++i) {
      double mean_exp = 0.0, mean_ll = 0.0;
      for (int l = 0; l < 4; ++l) {
        mean_exp += std::exp(ll(l, i)) / 4.0;
        mean_ll += ll(l, i) / 4.0;
      }
      double var_ll = 0.0;
      for (int l = 0; l < 4; ++l) var_ll += std::pow(ll(l, i) - mean_ll, 2) / 3.0;
      elpd += std::log(mean_exp) - var_ll;
      p_eff += var_ll;
    }
    CHECK(w.elpd == doctest::Approx(elpd).epsilon(1e-12));
    CHECK(w.p_eff == doctest::Approx(p_eff).epsilon(1e-12));
    CHECK(w.waic == doctest::Approx(-2.0 * elpd).epsilon(1e-12));
    // decomposition identity
    CHECK(w.waic == doctest::Approx(-2.0 * (w.pointwise_lpd.sum() - w.p_eff)).epsilon(1e-12));
  }
  SUBCASE("log-mean-exp shift stability") {
    Eigen::MatrixXd ll(3, 2);
    ll << -1.0, -2.0, -1.5, -2.5, -0.8, -1.7;
    WaicResult a = waic(ll);
    WaicResult b = waic(ll.array() + 1000.0);
    CHECK(std::abs((b.pointwise_lpd.array() - 1000.0 - a.pointwise_lpd.array()).maxCoeff()) <
          1e-10);
  }
  SUBCASE("identical models compare to zero") {
    Eigen::MatrixXd ll(3, 2);
    ll << -1.0, -2.0, -1.5, -2.5, -0.8, -1.7;
    ElpdDiff d = elpd_compare(waic(ll), waic(ll));
    CHECK(d.diff == 0.0);
    CHECK(d.tau == 0.0);
  }
  SUBCASE("non-finite input is rejected") {
    Eigen::MatrixXd ll(1, 1);
    ll << -std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(waic(ll), Error);
  }
}

TEST_CASE("split r-hat separates mixed and unmixed chains") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0.0, 1.0);
  Eigen::VectorXd mixed(2000);
  for (int i = 0; i < 2000; ++i) mixed[i] = noise(rng);
  CHECK(split_rhat(mixed, 2) < 1.05);

  Eigen::VectorXd split(2000);
  for (int i = 0; i < 1000; ++i) split[i] = noise(rng);
  for (int i = 1000; i < 2000; ++i) split[i] = 5.0 + noise(rng);
  CHECK(split_rhat(split, 2) > 1.5);
}

TEST_CASE("effective sample size shrinks under autocorrelation") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> noise(0.0, 1.0);
  Eigen::VectorXd iid(4000), ar(4000);
  double prev = 0.0;
  for (int i = 0; i < 4000; ++i) {
    iid[i] = noise(rng);
    prev = 0.9 * prev + noise(rng);
    ar[i] = prev;
  }
  const double ess_iid = effective_sample_size(iid, 2);
  const double ess_ar = effective_sample_size(ar, 2);
  CHECK(ess_iid > 2000.0);
  CHECK(ess_ar < 1000.0);
}
