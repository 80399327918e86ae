#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "stfh/direct.hpp"

using namespace stfh;

namespace {

// Streaming (Welford) oracle for the variance of the mean.
std::optional<double> streaming_variance(const std::vector<double>& values) {
  if (values.size() < 2) return std::nullopt;
  double mean = 0.0, m2 = 0.0;
  int n = 0;
  for (double y : values) {
    ++n;
    const double d = y - mean;
    mean += d / n;
    m2 += d * (y - mean);
  }
  return m2 / (static_cast<double>(n) * (n - 1.0));
}

}  // namespace

TEST_CASE("direct mean examples") {
  CHECK(*direct_mean({3, 5}) == doctest::Approx(4.0));
  CHECK(*direct_mean({7}) == doctest::Approx(7.0));
  CHECK(!direct_mean({}).has_value());
}

TEST_CASE("direct variance examples") {
  CHECK(*direct_variance({3, 5}) == doctest::Approx(1.0));
  CHECK(!direct_variance({7}).has_value());
  CHECK(!direct_variance({}).has_value());
  CHECK(*direct_variance({0, 0, 0}) == 0.0);
  CHECK(*direct_variance({2, 2}) == 0.0);
}

TEST_CASE("variance agrees with streaming oracle on random inputs") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 3.0);
  std::uniform_int_distribution<int> len(2, 40);
  std::uniform_real_distribution<double> center(-1e3, 1e3);
  for (int rep = 0; rep < 200; ++rep) {
    const double c = center(rng);
    std::vector<double> values(len(rng));
    for (auto& v : values) v = c + noise(rng);
    const double ours = *direct_variance(values);
    const double theirs = *streaming_variance(values);
    CHECK(ours == doctest::Approx(theirs).epsilon(1e-12));
  }
}

TEST_CASE("variance survives a huge mean where the expanded sum cannot") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> noise(0.0, 3.0);
  std::vector<double> values(30);
  for (auto& v : values) v = 1e9 + noise(rng);
  const double ours = *direct_variance(values);
  const double theirs = *streaming_variance(values);
  CHECK(ours == doctest::Approx(theirs).epsilon(1e-6));
  // the expanded one-pass form loses essentially all precision here
  double sum = 0.0, sumsq = 0.0;
  for (double v : values) {
    sum += v;
    sumsq += v * v;
  }
  const double n = static_cast<double>(values.size());
  const double expanded = (sumsq - sum * sum / n) / (n * (n - 1.0));
  CHECK(std::abs(expanded - ours) > 1e3 * std::abs(ours) * 1e-6);
}

TEST_CASE("variance shift invariance and scale equivariance") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> noise(0.0, 2.0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> values(10);
    for (auto& v : values) v = noise(rng);
    const double base = *direct_variance(values);

    std::vector<double> shifted = values;
    for (auto& v : shifted) v += 123.456;
    CHECK(*direct_variance(shifted) == doctest::Approx(base).epsilon(1e-10));

    std::vector<double> scaled = values;
    for (auto& v : scaled) v *= 7.5;
    CHECK(*direct_variance(scaled) == doctest::Approx(56.25 * base).epsilon(1e-10));
  }
}

TEST_CASE("build_direct_table classifies cells") {
  PanelIndex idx{2, 2};
  UnitObservations obs;
  obs.values[{0, 0}] = {3, 5};
  obs.values[{0, 1}] = {};
  obs.values[{1, 0}] = {2, 2};
  obs.values[{1, 1}] = {7};

  auto table = build_direct_table(obs, idx);

  const auto& c00 = table.cell(0, 0);
  CHECK(c00.cls == MissClass::Observed);
  CHECK(c00.mu_hat == doctest::Approx(4.0));
  CHECK(c00.sigma2_hat == doctest::Approx(1.0));

  CHECK(table.cell(0, 1).cls == MissClass::NoPlots);
  CHECK(std::isnan(table.cell(0, 1).mu_hat));

  const auto& c10 = table.cell(1, 0);
  CHECK(c10.cls == MissClass::ZeroVariance);
  CHECK(c10.mu_hat == doctest::Approx(2.0));
  CHECK(c10.sigma2_hat == 0.0);

  const auto& c11 = table.cell(1, 1);
  CHECK(c11.cls == MissClass::SinglePlot);
  CHECK(c11.mu_hat == doctest::Approx(7.0));
  CHECK(std::isnan(c11.sigma2_hat));

  CHECK(table.observed_indices() == std::vector<int>{0});
}

TEST_CASE("out of range cells are rejected") {
  PanelIndex idx{2, 2};
  UnitObservations obs;
  obs.values[{2, 0}] = {1.0};
  try {
    build_direct_table(obs, idx);
    FAIL("expected OutOfRangeCell");
  } catch (const Error& e) {
    CHECK(e.code() == "OutOfRangeCell");
  }
}
