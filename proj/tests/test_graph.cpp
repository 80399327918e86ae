#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "stfh/graph.hpp"

using namespace stfh;

TEST_CASE("panel flat index is an area-major bijection") {
  PanelIndex idx{5, 7};
  CHECK(idx.N() == 35);
  std::vector<bool> hit(35, false);
  for (int j = 0; j < idx.J; ++j)
    for (int t = 0; t < idx.T; ++t) {
      const int i = idx.flat(j, t);
      CHECK(!hit[i]);
      hit[i] = true;
      auto [jj, tt] = idx.unflat(i);
      CHECK(jj == j);
      CHECK(tt == t);
    }
  // first T entries belong to area 0
  CHECK(idx.flat(0, idx.T - 1) == idx.T - 1);
  CHECK(idx.flat(1, 0) == idx.T);
}

TEST_CASE("three node path graph") {
  auto g = build_area_graph(3, {{1, 2}, {2, 3}});
  CHECK(g.degrees()[0] == doctest::Approx(1.0));
  CHECK(g.degrees()[1] == doctest::Approx(2.0));
  CHECK(g.degrees()[2] == doctest::Approx(1.0));
  // normalized adjacency of a path has eigenvalues {-1, 0, 1}
  Eigen::VectorXd lam = g.eigenvalues();
  CHECK(lam[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(lam[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(lam[2] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two node pair graph") {
  auto g = build_area_graph(2, {{1, 2}});
  CHECK(g.degrees()[0] == doctest::Approx(1.0));
  CHECK(g.degrees()[1] == doctest::Approx(1.0));
  CHECK(g.eigenvalues()[0] == doctest::Approx(-1.0));
  CHECK(g.eigenvalues()[1] == doctest::Approx(1.0));
}

TEST_CASE("isolated node is rejected") {
  CHECK_THROWS_WITH_AS(build_area_graph(3, {{1, 2}}), doctest::Contains("node 3"), Error);
  try {
    build_area_graph(3, {{1, 2}});
  } catch (const Error& e) {
    CHECK(e.code() == "IsolatedNode");
  }
}

TEST_CASE("duplicate and reversed edges are deduplicated") {
  auto g = build_area_graph(2, {{1, 2}, {2, 1}, {1, 2}});
  CHECK(g.edges().size() == 1);
  CHECK(g.degrees()[0] == doctest::Approx(1.0));
}

TEST_CASE("spectral cache reconstructs W and eigenvalues sum to zero") {
  std::mt19937_64 rng(42);
  for (int rep = 0; rep < 20; ++rep) {
    std::uniform_int_distribution<int> jdist(2, 25);
    const int J = jdist(rng);
    auto g = build_area_graph(J, oracle::random_connected_edges(J, rng));

    // D^{1/2} P Lambda P^T D^{1/2} == W
    Eigen::MatrixXd rebuilt =
        g.scaled_eigenvectors() * g.eigenvalues().asDiagonal() * g.scaled_eigenvectors().transpose();
    CHECK((rebuilt - Eigen::MatrixXd(g.adjacency())).cwiseAbs().maxCoeff() < 1e-8);

    CHECK(std::abs(g.eigenvalues().sum()) < 1e-10);
    CHECK(g.eigenvalues().minCoeff() >= -1.0 - 1e-12);
    CHECK(g.eigenvalues().maxCoeff() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("validate_state flags violations with codes") {
  PanelIndex idx{2, 2};
  ModelSpec spec;
  spec.variant = Variant::Sub1;
  spec.p = 0;

  ParameterState s;
  s.mu = Eigen::VectorXd::Zero(4);
  s.beta = Eigen::VectorXd::Zero(1);
  s.eta0 = Eigen::VectorXd::Zero(4);
  s.sigma2_cell = Eigen::VectorXd::Ones(4);
  s.sigma2_eps = 1.0;
  s.sigma2_eta0 = 1.0;
  s.rho_eta0 = 0.5;
  s.alpha_eta0 = 0.5;
  s.sigma2_eta_s = Eigen::VectorXd(0);
  s.rho_eta_s = Eigen::VectorXd(0);

  CHECK(validate_state(s, spec, idx, 4).empty());

  SUBCASE("negative variance") {
    s.sigma2_eps = -1.0;
    auto v = validate_state(s, spec, idx, 4);
    REQUIRE(v.size() == 1);
    CHECK(v[0].code == "NEGATIVE_VARIANCE");
  }
  SUBCASE("correlation on the boundary") {
    s.rho_eta0 = 1.0;
    auto v = validate_state(s, spec, idx, 4);
    REQUIRE(v.size() == 1);
    CHECK(v[0].code == "CORRELATION_ON_BOUNDARY");
  }
  SUBCASE("length mismatch") {
    s.mu = Eigen::VectorXd::Zero(3);
    auto v = validate_state(s, spec, idx, 4);
    REQUIRE(v.size() == 1);
    CHECK(v[0].code == "LENGTH_MISMATCH");
  }
}

TEST_CASE("missingness classes partition all cells") {
  CHECK(classify_cell(0, false, false, kNaN) == MissClass::NoPlots);
  CHECK(classify_cell(1, true, false, kNaN) == MissClass::SinglePlot);
  CHECK(classify_cell(2, true, true, 0.0) == MissClass::ZeroVariance);
  CHECK(classify_cell(2, true, true, 0.5) == MissClass::Observed);
  // n >= 2 without a usable variance statistic degrades to SinglePlot
  CHECK(classify_cell(3, true, false, kNaN) == MissClass::SinglePlot);
  CHECK(classify_cell(3, false, true, 1.0) == MissClass::SinglePlot);
}

TEST_CASE("model spec validation") {
  ModelSpec spec;
  spec.variant = Variant::Full;
  spec.p = 2;
  spec.svc = {0};
  CHECK_NOTHROW(spec.validate());

  spec.svc = {};
  CHECK_THROWS_AS(spec.validate(), Error);  // full needs q >= 1

  spec.variant = Variant::Sub1;
  spec.svc = {0};
  CHECK_THROWS_AS(spec.validate(), Error);  // submodels force q = 0

  spec.variant = Variant::Full;
  spec.svc = {0, 0};
  CHECK_THROWS_AS(spec.validate(), Error);  // duplicates

  spec.svc = {5};
  CHECK_THROWS_AS(spec.validate(), Error);  // out of range
}
