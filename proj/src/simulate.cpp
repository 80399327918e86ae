#include "stfh/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "stfh/direct.hpp"
#include "stfh/posterior.hpp"
#include "stfh/rng.hpp"

namespace stfh {

namespace {

/// Smooth synthetic covariate surface in [0, 100] with a zeroed disk in one
/// corner, constant over time; the zero region exercises the forced-zero
/// outcome rule.
Eigen::MatrixXd default_covariate(const PopulationConfig& cfg) {
  const int g = cfg.grid;
  Eigen::MatrixXd v(cfg.units(), cfg.T);
  const double cx = 0.18 * g, cy = 0.18 * g, r2 = std::pow(0.13 * g, 2);
  for (int iy = 0; iy < g; ++iy)
    for (int ix = 0; ix < g; ++ix) {
      const int u = iy * g + ix;
      const double dx = ix - cx, dy = iy - cy;
      double val;
      if (dx * dx + dy * dy < r2) {
        val = 0.0;
      } else {
        const double s =
            0.5 * (1.0 + std::sin(2.5 * M_PI * ix / g) * std::cos(1.5 * M_PI * iy / g));
        val = 30.0 + 65.0 * s;
      }
      for (int t = 0; t < cfg.T; ++t) v(u, t) = val;
    }
  return v;
}

double slope_from_pairs(const std::vector<double>& ts, const std::vector<double>& ys) {
  const double n = static_cast<double>(ts.size());
  double tbar = 0.0, ybar = 0.0;
  for (size_t i = 0; i < ts.size(); ++i) {
    tbar += ts[i];
    ybar += ys[i];
  }
  tbar /= n;
  ybar /= n;
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < ts.size(); ++i) {
    num += (ts[i] - tbar) * (ys[i] - ybar);
    den += (ts[i] - tbar) * (ts[i] - tbar);
  }
  return den > 0.0 ? num / den : kNaN;
}

}  // namespace

Population generate_population(const PopulationConfig& cfg) {
  cfg.validate();
  const int n_units = cfg.units();
  const int g = cfg.grid;
  const int bs = g / cfg.areas_per_side;

  Population pop;
  pop.cfg = cfg;
  pop.idx = PanelIndex{cfg.J(), cfg.T};
  pop.v = default_covariate(cfg);
  pop.area_of.resize(n_units);
  pop.units_in_area.assign(cfg.J(), {});
  for (int iy = 0; iy < g; ++iy)
    for (int ix = 0; ix < g; ++ix) {
      const int u = iy * g + ix;
      const int a = (iy / bs) * cfg.areas_per_side + (ix / bs);
      pop.area_of[u] = a;
      pop.units_in_area[a].push_back(u);
    }

  // Spatial Cholesky of the exponential covariance, shared by every step of
  // the random walk.
  Eigen::MatrixXd L;
  if (cfg.sigma2_w > 0.0) {
    Eigen::MatrixXd C(n_units, n_units);
    for (int a = 0; a < n_units; ++a) {
      const double ax = a % g, ay = a / g;
      for (int b = 0; b <= a; ++b) {
        const double bx = b % g, by = b / g;
        const double dist =
            cfg.spacing_km * std::sqrt((ax - bx) * (ax - bx) + (ay - by) * (ay - by));
        const double c = cfg.sigma2_w * std::exp(-cfg.gamma * dist);
        C(a, b) = c;
        C(b, a) = c;
      }
    }
    double jitter = cfg.nugget * cfg.sigma2_w;
    for (int attempt = 0; attempt < 4; ++attempt) {
      Eigen::MatrixXd Cj = C;
      Cj.diagonal().array() += jitter;
      Eigen::LLT<Eigen::MatrixXd> llt(Cj);
      if (llt.info() == Eigen::Success) {
        L = llt.matrixL();
        break;
      }
      jitter *= 100.0;
    }
    if (L.size() == 0)
      fail("CholeskyFailure", "population covariance is numerically singular");
  }

  Rng rng(derive_seed(cfg.seed, 0));
  pop.y.resize(n_units, cfg.T);
  Eigen::VectorXd u_field = Eigen::VectorXd::Zero(n_units);
  const double sd_y = std::sqrt(cfg.sigma2_y);
  for (int t = 0; t < cfg.T; ++t) {
    if (cfg.sigma2_w > 0.0) {
      Eigen::VectorXd z(n_units);
      for (int i = 0; i < n_units; ++i) z[i] = rng.normal();
      u_field += L * z;
    }
    for (int i = 0; i < n_units; ++i) {
      double yy = cfg.zeta0 + u_field[i] + cfg.zeta1 * pop.v(i, t);
      if (sd_y > 0.0) yy += sd_y * rng.normal();
      if (pop.v(i, t) == 0.0 || yy < 0.0) yy = 0.0;
      pop.y(i, t) = yy;
    }
  }

  // Area-level truths, computed through the same mean as the direct
  // estimator so a census reproduces them exactly.
  pop.mu_true.resize(cfg.J(), cfg.T);
  pop.x_area.resize(pop.idx.N(), 1);
  for (int j = 0; j < cfg.J(); ++j) {
    for (int t = 0; t < cfg.T; ++t) {
      std::vector<double> ys, vs;
      ys.reserve(pop.units_in_area[j].size());
      for (int u : pop.units_in_area[j]) {
        ys.push_back(pop.y(u, t));
        vs.push_back(pop.v(u, t));
      }
      pop.mu_true(j, t) = *direct_mean(ys);
      pop.x_area(pop.idx.flat(j, t), 0) = *direct_mean(vs);
    }
  }

  pop.theta_true.resize(cfg.J());
  pop.delta_true.resize(cfg.J());
  std::vector<double> ts(cfg.T);
  std::iota(ts.begin(), ts.end(), 0.0);
  for (int j = 0; j < cfg.J(); ++j) {
    std::vector<double> ys(pop.mu_true.row(j).begin(), pop.mu_true.row(j).end());
    pop.theta_true[j] = cfg.T >= 2 ? slope_from_pairs(ts, ys) : kNaN;
    pop.delta_true[j] = pop.mu_true(j, cfg.T - 1) - pop.mu_true(j, 0);
  }
  return pop;
}

AreaGraph population_graph(const PopulationConfig& cfg) {
  const int a = cfg.areas_per_side;
  std::vector<std::pair<int, int>> edges;
  for (int y = 0; y < a; ++y)
    for (int x = 0; x < a; ++x) {
      const int id = y * a + x + 1;
      if (x + 1 < a) edges.emplace_back(id, id + 1);
      if (y + 1 < a) edges.emplace_back(id, id + a);
    }
  return build_area_graph(cfg.J(), edges);
}

std::vector<DirectTable> draw_replicates(const Population& pop, const Eigen::MatrixXi& n,
                                         int R, std::uint64_t seed) {
  const auto& idx = pop.idx;
  if (n.rows() != idx.J || n.cols() != idx.T) fail("BadPanel", "sample size matrix shape");
  for (int j = 0; j < idx.J; ++j)
    for (int t = 0; t < idx.T; ++t)
      if (n(j, t) > static_cast<int>(pop.units_in_area[j].size()))
        fail("SampleExceedsPopulation",
             "cell (" + std::to_string(j) + "," + std::to_string(t) + ") asks for " +
                 std::to_string(n(j, t)) + " of " +
                 std::to_string(pop.units_in_area[j].size()) + " units");

  std::vector<DirectTable> tables;
  tables.reserve(R);
  for (int r = 0; r < R; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    UnitObservations obs;
    for (int j = 0; j < idx.J; ++j) {
      const auto& units = pop.units_in_area[j];
      std::vector<int> pool(units.size());
      for (int t = 0; t < idx.T; ++t) {
        const int m = n(j, t);
        std::iota(pool.begin(), pool.end(), 0);
        // partial Fisher-Yates; sampled indices sorted so a census sums in
        // natural unit order
        for (int i = 0; i < m; ++i)
          std::swap(pool[i], pool[i + static_cast<int>(rng.below(pool.size() - i))]);
        std::vector<int> chosen(pool.begin(), pool.begin() + m);
        std::sort(chosen.begin(), chosen.end());
        std::vector<double> values;
        values.reserve(m);
        for (int c : chosen) values.push_back(pop.y(units[c], t));
        obs.values[{j, t}] = std::move(values);
      }
    }
    tables.push_back(build_direct_table(obs, idx));
  }
  return tables;
}

PanelData make_panel_data(const Population& pop, const DirectTable& table) {
  PanelData data;
  data.idx = pop.idx;
  data.table = table;
  data.X = pop.x_area;
  data.covariate_names = {"x_area"};
  return data;
}

void append_direct_estimates(const DirectTable& table, int t1, int t2, double level, int row,
                             EstimatorOutput& out) {
  const auto& idx = table.idx;
  const double tail = (1.0 - level) / 2.0;
  for (int i = 0; i < idx.N(); ++i) {
    const auto& c = table.cells[i];
    if (c.n >= 1 && std::isfinite(c.mu_hat)) out.mu_point(row, i) = c.mu_hat;
    if (c.n >= 2 && std::isfinite(c.sigma2_hat) && c.sigma2_hat > 0.0) {
      boost::math::students_t dist(c.n - 1);
      const double half = boost::math::quantile(dist, 1.0 - tail) * std::sqrt(c.sigma2_hat);
      out.mu_lo(row, i) = c.mu_hat - half;
      out.mu_hi(row, i) = c.mu_hat + half;
    }
  }
  for (int j = 0; j < idx.J; ++j) {
    std::vector<double> ts, ys;
    for (int t = 0; t < idx.T; ++t) {
      const auto& c = table.cell(j, t);
      if (c.n >= 1 && std::isfinite(c.mu_hat)) {
        ts.push_back(t);
        ys.push_back(c.mu_hat);
      }
    }
    if (ts.size() >= 2) out.theta_point(row, j) = slope_from_pairs(ts, ys);
    const auto& c1 = table.cell(j, t1);
    const auto& c2 = table.cell(j, t2);
    if (c1.n >= 1 && c2.n >= 1 && std::isfinite(c1.mu_hat) && std::isfinite(c2.mu_hat))
      out.delta_point(row, j) = c2.mu_hat - c1.mu_hat;
  }
}

void append_model_estimates(const PosteriorDraws& draws, const PanelIndex& idx, int t1, int t2,
                            double level, int row, EstimatorOutput& out) {
  for (int i = 0; i < idx.N(); ++i) {
    Summary s = summarize(draws.mu.col(i), level);
    out.mu_point(row, i) = s.mean;
    out.mu_lo(row, i) = s.lo;
    out.mu_hi(row, i) = s.hi;
  }
  Eigen::MatrixXd theta = trend_draws_all(draws.mu, idx);
  Eigen::MatrixXd delta = change_draws_all(draws.mu, idx, t1, t2);
  for (int j = 0; j < idx.J; ++j) {
    Summary st = summarize(theta.col(j), level);
    out.theta_point(row, j) = st.mean;
    out.theta_lo(row, j) = st.lo;
    out.theta_hi(row, j) = st.hi;
    Summary sd = summarize(delta.col(j), level);
    out.delta_point(row, j) = sd.mean;
    out.delta_lo(row, j) = sd.lo;
    out.delta_hi(row, j) = sd.hi;
  }
}

std::vector<CellScore> score_estimators(const Eigen::VectorXd& truth,
                                        const Eigen::MatrixXd& point,
                                        const Eigen::MatrixXd& lo, const Eigen::MatrixXd& hi) {
  const int K = static_cast<int>(truth.size());
  const int R = static_cast<int>(point.rows());
  std::vector<CellScore> out(K);
  for (int k = 0; k < K; ++k) {
    CellScore& s = out[k];
    double err_sum = 0.0, err_sq = 0.0, cover_sum = 0.0, width_sum = 0.0;
    for (int r = 0; r < R; ++r) {
      const double est = point(r, k);
      if (std::isfinite(est)) {
        ++s.r_est;
        err_sum += est - truth[k];
        err_sq += (est - truth[k]) * (est - truth[k]);
      }
      const double l = lo(r, k), h = hi(r, k);
      if (std::isfinite(l) && std::isfinite(h)) {
        ++s.r_int;
        cover_sum += (l <= truth[k] && truth[k] <= h) ? 1.0 : 0.0;
        width_sum += h - l;
      }
    }
    if (s.r_est > 0) {
      s.bias = err_sum / s.r_est;
      s.rmse = std::sqrt(err_sq / s.r_est);
    }
    if (s.r_int > 0) {
      s.cover = cover_sum / s.r_int;
      s.width = width_sum / s.r_int;
    }
  }
  return out;
}

Eigen::MatrixXi mixed_sample_sizes(int J, int T, int n_max, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 7));
  Eigen::MatrixXi n(J, T);
  auto pick = [&](int lo, int hi) {
    return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
  };
  for (int j = 0; j < J; ++j) {
    const int cls = j % 8;
    for (int t = 0; t < T; ++t) {
      int value = 0;
      switch (cls) {
        case 0: value = 0; break;                      // never sampled
        case 1: value = pick(0, 2); break;             // mostly missing
        case 2: value = pick(2, 6); break;
        case 3: value = pick(5, 10); break;
        case 4: value = pick(8, 15); break;
        case 5: value = pick(15, std::min(30, n_max)); break;
        case 6: value = pick(std::min(30, n_max), n_max); break;
        default: value = n_max; break;                 // saturated
      }
      n(j, t) = value;
    }
  }
  return n;
}

SimStudyResult run_sim_study(const SimStudyConfig& cfg) {
  if (cfg.model_names.size() != cfg.models.size())
    fail("BadModelSpec", "model name/spec count mismatch");

  SimStudyResult res;
  res.pop = generate_population(cfg.pop);
  res.n = cfg.n;
  const auto& idx = res.pop.idx;
  const int t2 = cfg.t2 < 0 ? idx.T - 1 : cfg.t2;

  auto blank = [&](const std::string& name) {
    EstimatorOutput e;
    e.name = name;
    e.mu_point = e.mu_lo = e.mu_hi = Eigen::MatrixXd::Constant(cfg.R, idx.N(), kNaN);
    e.theta_point = e.theta_lo = e.theta_hi = Eigen::MatrixXd::Constant(cfg.R, idx.J, kNaN);
    e.delta_point = e.delta_lo = e.delta_hi = Eigen::MatrixXd::Constant(cfg.R, idx.J, kNaN);
    return e;
  };
  res.estimators.push_back(blank("direct"));
  for (const auto& name : cfg.model_names) res.estimators.push_back(blank(name));

  auto tables = draw_replicates(res.pop, cfg.n, cfg.R, cfg.replicate_seed);
  AreaGraph graph = population_graph(cfg.pop);

  for (int r = 0; r < cfg.R; ++r) {
    append_direct_estimates(tables[r], cfg.t1, t2, cfg.level, r, res.estimators[0]);
    PanelData data = make_panel_data(res.pop, tables[r]);
    for (size_t m = 0; m < cfg.models.size(); ++m) {
      SamplerConfig sc = cfg.sampler;
      sc.seed = derive_seed(cfg.sampler.seed,
                            static_cast<std::uint64_t>(r) * cfg.models.size() + m);
      PosteriorDraws draws = run_chains(data, cfg.models[m], graph, sc);
      append_model_estimates(draws, idx, cfg.t1, t2, cfg.level, r, res.estimators[1 + m]);
    }
  }
  return res;
}

}  // namespace stfh
