// Python bindings for the main operations: graph/kernel algebra, model
// fitting, posterior functionals, WAIC, and the simulation harness.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stfh/direct.hpp"
#include "stfh/posterior.hpp"
#include "stfh/sampler.hpp"
#include "stfh/simulate.hpp"

namespace py = pybind11;
using namespace stfh;

namespace {

ModelSpec make_spec(const std::string& model, int p, const std::vector<int>& svc,
                    const py::dict& priors) {
  ModelSpec spec;
  spec.variant = variant_from_string(model);
  spec.p = p;
  spec.svc = svc;
  auto& pc = spec.prior;
  for (auto item : priors) {
    const std::string key = py::cast<std::string>(item.first);
    if (key == "mu_beta") pc.mu_beta = py::cast<double>(item.second);
    else if (key == "sigma2_beta") pc.sigma2_beta = py::cast<double>(item.second);
    else if (key == "a_eps") pc.a_eps = py::cast<double>(item.second);
    else if (key == "b_eps") pc.b_eps = py::cast<double>(item.second);
    else if (key == "a_eta0") pc.a_eta0 = py::cast<double>(item.second);
    else if (key == "b_eta0") pc.b_eta0 = py::cast<double>(item.second);
    else if (key == "a_eta_s") pc.a_eta_s = py::cast<double>(item.second);
    else if (key == "b_eta_s") pc.b_eta_s = py::cast<double>(item.second);
    else throw Error("BadPrior", "unknown prior key '" + key + "'");
  }
  spec.validate();
  return spec;
}

/// mu_hat / sigma2_hat are J x T with NaN marking absent entries; n is J x T
/// counts; X is (J*T) x p in area-major flat order.
PanelData make_panel(const Eigen::MatrixXd& mu_hat, const Eigen::MatrixXd& sigma2_hat,
                     const Eigen::MatrixXi& n, const Eigen::MatrixXd& X) {
  const int J = static_cast<int>(mu_hat.rows());
  const int T = static_cast<int>(mu_hat.cols());
  if (sigma2_hat.rows() != J || sigma2_hat.cols() != T || n.rows() != J || n.cols() != T)
    fail("BadPanel", "mu_hat, sigma2_hat and n must share a J x T shape");
  PanelData data;
  data.idx = {J, T};
  data.table.idx = data.idx;
  data.table.cells.assign(static_cast<size_t>(J * T), DirectCell{});
  for (int j = 0; j < J; ++j)
    for (int t = 0; t < T; ++t) {
      DirectCell& c = data.table.cell(j, t);
      c.n = n(j, t);
      c.mu_hat = mu_hat(j, t);
      c.sigma2_hat = sigma2_hat(j, t);
      c.cls = classify_cell(c.n, std::isfinite(c.mu_hat), std::isfinite(c.sigma2_hat),
                            c.sigma2_hat);
    }
  if (X.size() > 0) {
    if (X.rows() != J * T) fail("BadPanel", "X must have J*T rows in area-major order");
    data.X = X;
    for (int k = 0; k < X.cols(); ++k)
      data.covariate_names.push_back("x" + std::to_string(k));
  } else {
    data.X.resize(J * T, 0);
  }
  return data;
}

py::dict fit(const Eigen::MatrixXd& mu_hat, const Eigen::MatrixXd& sigma2_hat,
             const Eigen::MatrixXi& n, const Eigen::MatrixXd& X,
             const std::vector<std::pair<int, int>>& edges, const std::string& model,
             const std::vector<int>& svc, const py::dict& priors, int chains, int iterations,
             int burn_in, int thin, std::uint64_t seed) {
  PanelData data = make_panel(mu_hat, sigma2_hat, n, X);
  ModelSpec spec = make_spec(model, static_cast<int>(data.X.cols()), svc, priors);
  AreaGraph graph = build_area_graph(data.idx.J, edges);
  SamplerConfig cfg;
  cfg.n_chains = chains;
  cfg.iterations = iterations;
  cfg.burn_in = burn_in;
  cfg.thin = thin;
  cfg.seed = seed;

  PosteriorDraws draws = run_chains(data, spec, graph, cfg);
  py::dict out;
  out["mu"] = draws.mu;
  out["beta"] = draws.beta;
  out["sigma2_cell"] = draws.sigma2_cell;
  out["sigma2_eps"] = draws.sigma2_eps;
  out["sigma2_eta0"] = draws.sigma2_eta0;
  out["rho_eta0"] = draws.rho_eta0;
  out["alpha_eta0"] = draws.alpha_eta0;
  out["sigma2_eta_s"] = draws.sigma2_eta_s;
  out["rho_eta_s"] = draws.rho_eta_s;
  out["chain"] = draws.chain;
  out["observed"] = draws.observed;
  out["loglik"] = pointwise_loglik(draws, data.table);
  py::list acc;
  for (const auto& a : draws.acceptance) {
    py::dict d;
    d["target"] = a.target;
    d["rate"] = a.rate();
    d["step"] = a.final_step;
    acc.append(d);
  }
  out["acceptance"] = acc;
  return out;
}

py::dict summarize_py(const Eigen::VectorXd& draws, double level) {
  Summary s = summarize(draws, level);
  py::dict out;
  out["mean"] = s.mean;
  out["median"] = s.median;
  out["sd"] = s.sd;
  out["lower"] = s.lo;
  out["upper"] = s.hi;
  out["excludes_zero"] = s.excludes_zero;
  return out;
}

py::dict waic_py(const Eigen::MatrixXd& loglik) {
  WaicResult w = waic(loglik);
  py::dict out;
  out["elpd_waic"] = w.elpd;
  out["p_waic"] = w.p_eff;
  out["waic"] = w.waic;
  out["pointwise_elpd"] = w.pointwise_elpd;
  return out;
}

py::dict elpd_compare_py(const Eigen::MatrixXd& loglik_a, const Eigen::MatrixXd& loglik_b) {
  ElpdDiff d = elpd_compare(waic(loglik_a), waic(loglik_b));
  py::dict out;
  out["elpd_diff"] = d.diff;
  out["tau_diff"] = d.tau;
  return out;
}

py::dict generate_population_py(int grid, int areas_per_side, int T, double zeta0,
                                double zeta1, double sigma2_y, double sigma2_w, double gamma,
                                double spacing_km, std::uint64_t seed) {
  PopulationConfig cfg;
  cfg.grid = grid;
  cfg.areas_per_side = areas_per_side;
  cfg.T = T;
  cfg.zeta0 = zeta0;
  cfg.zeta1 = zeta1;
  cfg.sigma2_y = sigma2_y;
  cfg.sigma2_w = sigma2_w;
  cfg.gamma = gamma;
  cfg.spacing_km = spacing_km;
  cfg.seed = seed;
  Population pop = generate_population(cfg);
  py::dict out;
  out["y"] = pop.y;
  out["v"] = pop.v;
  out["area_of"] = pop.area_of;
  out["mu_true"] = pop.mu_true;
  out["theta_true"] = pop.theta_true;
  out["delta_true"] = pop.delta_true;
  out["x_area"] = pop.x_area;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spatio-temporal small area estimation: CAR/AR(1) kernels, Gibbs sampler, "
            "posterior functionals, WAIC, and a simulation harness.";

  py::register_exception<Error>(m, "StfhError");

  py::class_<AreaGraph>(m, "AreaGraph")
      .def_property_readonly("J", &AreaGraph::J)
      .def_property_readonly("degrees", &AreaGraph::degrees)
      .def_property_readonly("eigenvalues", &AreaGraph::eigenvalues);

  m.def("build_area_graph", &build_area_graph, py::arg("J"), py::arg("edges"),
        "Areal graph from 1-based node pairs with cached spectral decomposition.");
  m.def("car_logdet_precision", &car_logdet_precision, py::arg("graph"), py::arg("rho"));
  m.def("ar1_logdet", &ar1_logdet, py::arg("T"), py::arg("alpha"));
  m.def(
      "kron_logdet",
      [](const AreaGraph& g, int T, double sigma2, double rho, double alpha) {
        return kron_logdet(CarKernel(g), Ar1Kernel(T), sigma2, rho, alpha);
      },
      py::arg("graph"), py::arg("T"), py::arg("sigma2"), py::arg("rho"), py::arg("alpha"),
      "log |sigma2 R(rho) (x) A(alpha)| via the spectral closed form.");
  m.def(
      "kron_quadform",
      [](const AreaGraph& g, const Eigen::VectorXd& eta, double sigma2, double rho,
         double alpha) {
        const int T = static_cast<int>(eta.size()) / g.J();
        return kron_precision_quadform(eta, CarKernel(g), Ar1Kernel(T), sigma2, rho, alpha);
      },
      py::arg("graph"), py::arg("eta"), py::arg("sigma2"), py::arg("rho"), py::arg("alpha"));

  m.def(
      "direct_mean",
      [](const std::vector<double>& values) -> py::object {
        auto v = direct_mean(values);
        return v ? py::cast(*v) : py::none();
      },
      py::arg("values"));
  m.def(
      "direct_variance",
      [](const std::vector<double>& values) -> py::object {
        auto v = direct_variance(values);
        return v ? py::cast(*v) : py::none();
      },
      py::arg("values"));

  m.def("fit", &fit, py::arg("mu_hat"), py::arg("sigma2_hat"), py::arg("n"), py::arg("X"),
        py::arg("edges"), py::arg("model") = "sub1", py::arg("svc") = std::vector<int>{},
        py::arg("priors") = py::dict(), py::arg("chains") = 3, py::arg("iterations") = 2000,
        py::arg("burn_in") = 1000, py::arg("thin") = 1, py::arg("seed") = 1,
        "Run the Gibbs/Metropolis sampler; returns draw arrays keyed by parameter. "
        "mu draws are M x (J*T) in area-major order.");

  m.def(
      "trend",
      [](const Eigen::MatrixXd& mu_draws, int J, int T) {
        return trend_draws_all(mu_draws, PanelIndex{J, T});
      },
      py::arg("mu_draws"), py::arg("J"), py::arg("T"),
      "Per-draw least-squares slope for every area; M x J.");
  m.def(
      "change",
      [](const Eigen::MatrixXd& mu_draws, int J, int T, int t1, int t2) {
        return change_draws_all(mu_draws, PanelIndex{J, T}, t1, t2);
      },
      py::arg("mu_draws"), py::arg("J"), py::arg("T"), py::arg("t1"), py::arg("t2"));
  m.def(
      "aggregate",
      [](const Eigen::MatrixXd& mu_draws, int J, int T, const Eigen::VectorXd& area_ha,
         const std::vector<int>& group, int t1, int t2) {
        AggregateDraws agg =
            totals_and_aggregates(mu_draws, PanelIndex{J, T}, area_ha, group, "group", t1, t2);
        py::dict out;
        out["area_total"] = agg.area_total;
        out["omega"] = agg.omega;
        out["mu"] = agg.mu;
        out["theta"] = agg.theta;
        out["delta"] = agg.delta;
        return out;
      },
      py::arg("mu_draws"), py::arg("J"), py::arg("T"), py::arg("area_ha"), py::arg("group"),
      py::arg("t1"), py::arg("t2"));

  m.def("summarize", &summarize_py, py::arg("draws"), py::arg("level") = 0.95);
  m.def("waic", &waic_py, py::arg("loglik"));
  m.def("elpd_compare", &elpd_compare_py, py::arg("loglik_a"), py::arg("loglik_b"));
  m.def("split_rhat", &split_rhat, py::arg("values"), py::arg("n_chains"));
  m.def("effective_sample_size", &effective_sample_size, py::arg("values"),
        py::arg("n_chains"));

  m.def("generate_population", &generate_population_py, py::arg("grid") = 20,
        py::arg("areas_per_side") = 4, py::arg("T") = 6, py::arg("zeta0") = 1.5,
        py::arg("zeta1") = 2.0, py::arg("sigma2_y") = 1000.0, py::arg("sigma2_w") = 10.0,
        py::arg("gamma") = 0.003, py::arg("spacing_km") = 1.0, py::arg("seed") = 1);
}
