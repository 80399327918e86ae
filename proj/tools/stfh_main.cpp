// Command line front end: fit, simulate, score, waic, summarize.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "stfh/io.hpp"
#include "stfh/posterior.hpp"
#include "stfh/sampler.hpp"
#include "stfh/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace stfh;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

struct FitOptions {
  std::string data_path, adjacency_path, model = "sub1", svc_list, priors_path,
              aggregates_path, areas_path, outdir = "out";
  SamplerConfig sampler;
  bool link_islands = false, standardize = false, dump_draws = false;
  long long t1 = std::numeric_limits<long long>::min();
  long long t2 = std::numeric_limits<long long>::min();
  double level = 0.95;
};

void add_sampler_flags(CLI::App* cmd, SamplerConfig& sc) {
  cmd->add_option("--chains", sc.n_chains, "number of MCMC chains");
  cmd->add_option("--iters", sc.iterations, "iterations per chain");
  cmd->add_option("--burnin", sc.burn_in, "burn-in iterations per chain");
  cmd->add_option("--thin", sc.thin, "thinning interval");
  cmd->add_option("--step", sc.initial_step, "initial Metropolis step (logit scale)");
  cmd->add_option("--adapt-window", sc.adapt_window, "burn-in adaptation window");
  cmd->add_option("--target-accept", sc.target_accept, "adaptation target acceptance");
}

int time_label_index(const std::vector<long long>& labels, long long value,
                     const char* flag) {
  auto it = std::find(labels.begin(), labels.end(), value);
  if (it == labels.end())
    fail("ParseError", std::string(flag) + "=" + std::to_string(value) +
                           " is not a time value present in the data");
  return static_cast<int>(it - labels.begin());
}

json sampler_json(const SamplerConfig& sc) {
  return {{"chains", sc.n_chains}, {"iterations", sc.iterations},
          {"burn_in", sc.burn_in}, {"thin", sc.thin},
          {"seed", sc.seed},       {"step", sc.initial_step},
          {"adapt_window", sc.adapt_window}, {"target_accept", sc.target_accept}};
}

int run_fit(const FitOptions& opt) {
  LoadedPanel panel = load_panel_csv(opt.data_path, opt.standardize);
  const auto& idx = panel.data.idx;

  std::vector<std::pair<int, int>> island_links;
  AreaGraph graph = load_adjacency(opt.adjacency_path, idx.J, opt.link_islands, &island_links);

  ModelSpec spec;
  spec.variant = variant_from_string(opt.model);
  spec.p = static_cast<int>(panel.data.covariate_names.size());
  if (!opt.svc_list.empty()) {
    for (const auto& name : split_list(opt.svc_list)) {
      auto it = std::find(panel.data.covariate_names.begin(),
                          panel.data.covariate_names.end(), name);
      if (it == panel.data.covariate_names.end())
        fail("MissingCovariate", "SVC covariate '" + name + "' not in data header");
      spec.svc.push_back(static_cast<int>(it - panel.data.covariate_names.begin()));
    }
  }
  if (!opt.priors_path.empty()) spec.prior = load_priors(opt.priors_path);
  spec.validate();

  Eigen::VectorXd area_ha = Eigen::VectorXd::Ones(idx.J);
  if (!opt.areas_path.empty()) area_ha = load_areas(opt.areas_path, panel.area_labels);
  std::vector<AggregateDef> groups;
  if (!opt.aggregates_path.empty())
    groups = load_aggregates(opt.aggregates_path, panel.area_labels);

  PosteriorDraws draws = run_chains(panel.data, spec, graph, opt.sampler);

  EmitOptions eopt;
  eopt.level = opt.level;
  eopt.dump_draws = opt.dump_draws;
  eopt.t1 = opt.t1 == std::numeric_limits<long long>::min()
                ? 0
                : time_label_index(panel.time_labels, opt.t1, "--t1");
  eopt.t2 = opt.t2 == std::numeric_limits<long long>::min()
                ? idx.T - 1
                : time_label_index(panel.time_labels, opt.t2, "--t2");

  RunMeta meta;
  meta.area_labels = panel.area_labels;
  for (long long t : panel.time_labels) meta.time_labels.push_back(std::to_string(t));
  meta.config = {{"model", opt.model},
                 {"svc", opt.svc_list},
                 {"standardize", opt.standardize},
                 {"level", opt.level},
                 {"t1", eopt.t1},
                 {"t2", eopt.t2},
                 {"sampler", sampler_json(opt.sampler)},
                 {"priors",
                  {{"mu_beta", spec.prior.mu_beta},
                   {"sigma2_beta", spec.prior.sigma2_beta},
                   {"a_eps", spec.prior.a_eps},
                   {"b_eps", spec.prior.b_eps},
                   {"a_eta0", spec.prior.a_eta0},
                   {"b_eta0", spec.prior.b_eta0},
                   {"a_eta_s", spec.prior.a_eta_s},
                   {"b_eta_s", spec.prior.b_eta_s},
                   {"rho_bounds", {spec.prior.rho_lo, spec.prior.rho_hi}},
                   {"alpha_bounds", {spec.prior.alpha_lo, spec.prior.alpha_hi}}}},
                 {"aggregates", opt.aggregates_path},
                 {"areas", opt.areas_path}};
  meta.extra["standardization"] = panel.standardization;
  meta.extra["coerced_cells"] = panel.coerced_cells;
  json links = json::array();
  for (auto [a, b] : island_links) links.push_back({a, b});
  meta.extra["island_links"] = links;
  int n_obs = 0, n_np = 0, n_sp = 0, n_zv = 0;
  for (const auto& c : panel.data.table.cells) {
    switch (c.cls) {
      case MissClass::Observed: ++n_obs; break;
      case MissClass::NoPlots: ++n_np; break;
      case MissClass::SinglePlot: ++n_sp; break;
      case MissClass::ZeroVariance: ++n_zv; break;
    }
  }
  meta.extra["missingness"] = {{"observed", n_obs},
                               {"no_plots", n_np},
                               {"single_plot", n_sp},
                               {"zero_variance", n_zv}};

  emit_results(draws, panel.data.table, area_ha, groups, meta, eopt, opt.outdir);
  std::cout << "fit complete: " << draws.M() << " draws -> " << opt.outdir << "\n";
  return 0;
}

struct SimulateOptions {
  PopulationConfig pop;
  int replicates = 25;
  std::uint64_t seed = 1;  // population, sampling, and fits derive from this
  std::string sizes_path, outdir = "sim_out", fit_models;
  int n_max = 60;
  SamplerConfig sampler;
  double level = 0.95;
  bool write_reps = true;
};

Eigen::MatrixXi load_sample_sizes(const std::string& path, int J, int T) {
  std::ifstream in(path);
  if (!in) fail("IoError", "cannot open " + path);
  Eigen::MatrixXi n(J, T);
  std::string line;
  int j = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (j >= J) fail("ParseError", "more than J rows in " + path);
    std::istringstream ss(line);
    std::string tok;
    int t = 0;
    while (std::getline(ss, tok, ',')) {
      if (t >= T) fail("ParseError", "more than T columns in " + path);
      n(j, t++) = std::stoi(tok);
    }
    if (t != T) fail("ParseError", "row with fewer than T columns in " + path);
    ++j;
  }
  if (j != J) fail("ParseError", "expected J rows in " + path);
  return n;
}

void write_estimates_csv(const std::string& path, const PanelIndex& idx,
                         const std::vector<EstimatorOutput>& estimators) {
  std::ofstream f(path);
  f << "replicate,estimator,target,area_id,time,point,lower,upper\n";
  auto cell = [&](double v) { return std::isfinite(v) ? fmt(v) : std::string(); };
  for (const auto& e : estimators) {
    const int R = static_cast<int>(e.mu_point.rows());
    for (int r = 0; r < R; ++r) {
      for (int j = 0; j < idx.J; ++j)
        for (int t = 0; t < idx.T; ++t) {
          const int i = idx.flat(j, t);
          f << r + 1 << ',' << e.name << ",mu," << j + 1 << ',' << t + 1 << ','
            << cell(e.mu_point(r, i)) << ',' << cell(e.mu_lo(r, i)) << ','
            << cell(e.mu_hi(r, i)) << '\n';
        }
      for (int j = 0; j < idx.J; ++j)
        f << r + 1 << ',' << e.name << ",theta," << j + 1 << ",,"
          << cell(e.theta_point(r, j)) << ',' << cell(e.theta_lo(r, j)) << ','
          << cell(e.theta_hi(r, j)) << '\n';
      for (int j = 0; j < idx.J; ++j)
        f << r + 1 << ',' << e.name << ",delta," << j + 1 << ",,"
          << cell(e.delta_point(r, j)) << ',' << cell(e.delta_lo(r, j)) << ','
          << cell(e.delta_hi(r, j)) << '\n';
    }
  }
}

void write_scores_csv(const std::string& path, const PanelIndex& idx,
                      const Eigen::MatrixXi& n, const Population& pop,
                      const std::vector<EstimatorOutput>& estimators) {
  std::ofstream f(path);
  f << "estimator,target,area_id,time,n,bias,rmse,cover,width,r_est,r_int\n";
  auto cell = [&](double v) { return std::isfinite(v) ? fmt(v) : std::string(); };
  for (const auto& e : estimators) {
    Eigen::VectorXd mu_truth(idx.N());
    for (int j = 0; j < idx.J; ++j)
      for (int t = 0; t < idx.T; ++t) mu_truth[idx.flat(j, t)] = pop.mu_true(j, t);
    auto mu_scores = score_estimators(mu_truth, e.mu_point, e.mu_lo, e.mu_hi);
    for (int j = 0; j < idx.J; ++j)
      for (int t = 0; t < idx.T; ++t) {
        const auto& s = mu_scores[idx.flat(j, t)];
        f << e.name << ",mu," << j + 1 << ',' << t + 1 << ',' << n(j, t) << ','
          << cell(s.bias) << ',' << cell(s.rmse) << ',' << cell(s.cover) << ','
          << cell(s.width) << ',' << s.r_est << ',' << s.r_int << '\n';
      }
    auto theta_scores =
        score_estimators(pop.theta_true, e.theta_point, e.theta_lo, e.theta_hi);
    auto delta_scores =
        score_estimators(pop.delta_true, e.delta_point, e.delta_lo, e.delta_hi);
    for (int j = 0; j < idx.J; ++j) {
      const auto& s = theta_scores[j];
      f << e.name << ",theta," << j + 1 << ",," << n.row(j).sum() << ',' << cell(s.bias)
        << ',' << cell(s.rmse) << ',' << cell(s.cover) << ',' << cell(s.width) << ','
        << s.r_est << ',' << s.r_int << '\n';
    }
    for (int j = 0; j < idx.J; ++j) {
      const auto& s = delta_scores[j];
      f << e.name << ",delta," << j + 1 << ",," << n.row(j).sum() << ',' << cell(s.bias)
        << ',' << cell(s.rmse) << ',' << cell(s.cover) << ',' << cell(s.width) << ','
        << s.r_est << ',' << s.r_int << '\n';
    }
  }
}

int run_simulate(const SimulateOptions& opt) {
  std::error_code ec;
  fs::create_directories(opt.outdir, ec);
  if (ec) fail("IoError", "cannot create " + opt.outdir);

  const int J = opt.pop.J();
  const int T = opt.pop.T;
  const int per_area = (opt.pop.grid / opt.pop.areas_per_side) *
                       (opt.pop.grid / opt.pop.areas_per_side);
  // one user-visible seed; the population, size pattern, sampling, and model
  // fits draw from documented sub-streams
  const std::uint64_t replicate_seed = derive_seed(opt.seed, 2);
  Eigen::MatrixXi n =
      opt.sizes_path.empty()
          ? mixed_sample_sizes(J, T, std::min(opt.n_max, per_area), derive_seed(opt.seed, 1))
          : load_sample_sizes(opt.sizes_path, J, T);

  SimStudyConfig cfg;
  cfg.pop = opt.pop;
  cfg.pop.seed = derive_seed(opt.seed, 0);
  cfg.n = n;
  cfg.R = opt.replicates;
  cfg.sampler = opt.sampler;
  cfg.sampler.seed = derive_seed(opt.seed, 3);
  cfg.level = opt.level;
  cfg.replicate_seed = replicate_seed;
  for (const auto& name : split_list(opt.fit_models)) {
    ModelSpec spec;
    spec.variant = variant_from_string(name);
    spec.p = 1;
    if (spec.variant == Variant::Full) spec.svc = {0};
    cfg.model_names.push_back(name);
    cfg.models.push_back(spec);
  }

  SimStudyResult res = run_sim_study(cfg);
  const auto& idx = res.pop.idx;

  {
    std::ofstream f(fs::path(opt.outdir) / "truths.csv");
    f << "area_id,time,mu_true,x_area,n\n";
    for (int j = 0; j < idx.J; ++j)
      for (int t = 0; t < idx.T; ++t)
        f << j + 1 << ',' << t + 1 << ',' << fmt(res.pop.mu_true(j, t)) << ','
          << fmt(res.pop.x_area(idx.flat(j, t), 0)) << ',' << n(j, t) << '\n';
  }
  {
    std::ofstream f(fs::path(opt.outdir) / "trends_true.csv");
    f << "area_id,theta_true,delta_true\n";
    for (int j = 0; j < idx.J; ++j)
      f << j + 1 << ',' << fmt(res.pop.theta_true[j]) << ',' << fmt(res.pop.delta_true[j])
        << '\n';
  }
  {
    std::ofstream f(fs::path(opt.outdir) / "adjacency.txt");
    AreaGraph g = population_graph(opt.pop);
    for (auto [a, b] : g.edges()) f << a << ' ' << b << '\n';
  }
  if (opt.write_reps) {
    auto tables = draw_replicates(res.pop, n, opt.replicates, replicate_seed);
    for (int r = 0; r < opt.replicates; ++r) {
      char name[32];
      std::snprintf(name, sizeof(name), "rep_%03d.csv", r + 1);
      std::ofstream f(fs::path(opt.outdir) / name);
      f << "area_id,time,n,mu_hat,sigma2_hat,x_area\n";
      for (int j = 0; j < idx.J; ++j)
        for (int t = 0; t < idx.T; ++t) {
          const auto& c = tables[r].cell(j, t);
          f << j + 1 << ',' << t + 1 << ',' << c.n << ','
            << (std::isfinite(c.mu_hat) ? fmt(c.mu_hat) : "") << ','
            << (std::isfinite(c.sigma2_hat) ? fmt(c.sigma2_hat) : "") << ','
            << fmt(res.pop.x_area(idx.flat(j, t), 0)) << '\n';
        }
    }
  }
  write_estimates_csv((fs::path(opt.outdir) / "estimates.csv").string(), idx,
                      res.estimators);
  write_scores_csv((fs::path(opt.outdir) / "scores.csv").string(), idx, n, res.pop,
                   res.estimators);
  std::cout << "simulation written to " << opt.outdir << "\n";
  return 0;
}

struct TargetKey {
  std::string estimator, target;
  int area, time;  // time 0 for area-level targets
  bool operator<(const TargetKey& o) const {
    return std::tie(estimator, target, area, time) <
           std::tie(o.estimator, o.target, o.area, o.time);
  }
};

int run_score(const std::string& truths_path, const std::string& trends_path,
              const std::string& estimates_path, const std::string& out_path) {
  // truths
  std::map<std::pair<int, int>, double> mu_truth;
  std::map<std::pair<int, int>, int> n_of;
  {
    std::ifstream in(truths_path);
    if (!in) fail("IoError", "cannot open " + truths_path);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ss(line);
      std::string tok;
      std::vector<std::string> f;
      while (std::getline(ss, tok, ',')) f.push_back(tok);
      if (f.size() < 3) fail("ParseError", "bad truths row");
      const int j = std::stoi(f[0]), t = std::stoi(f[1]);
      mu_truth[{j, t}] = std::stod(f[2]);
      if (f.size() >= 5) n_of[{j, t}] = std::stoi(f[4]);
    }
  }
  std::map<int, double> theta_truth, delta_truth;
  if (!trends_path.empty()) {
    std::ifstream in(trends_path);
    if (!in) fail("IoError", "cannot open " + trends_path);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ss(line);
      std::string tok;
      std::vector<std::string> f;
      while (std::getline(ss, tok, ',')) f.push_back(tok);
      if (f.size() < 3) fail("ParseError", "bad trends row");
      theta_truth[std::stoi(f[0])] = std::stod(f[1]);
      delta_truth[std::stoi(f[0])] = std::stod(f[2]);
    }
  }

  struct Acc {
    int r_est = 0, r_int = 0;
    double err = 0, err2 = 0, cover = 0, width = 0;
  };
  std::map<TargetKey, Acc> acc;
  {
    std::ifstream in(estimates_path);
    if (!in) fail("IoError", "cannot open " + estimates_path);
    std::string line;
    std::getline(in, line);
    int line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      std::istringstream ss(line);
      std::string tok;
      std::vector<std::string> f;
      while (std::getline(ss, tok, ',')) f.push_back(tok);
      while (f.size() < 8) f.push_back("");
      const std::string& target = f[2];
      const int area = std::stoi(f[3]);
      const int time = f[4].empty() ? 0 : std::stoi(f[4]);
      double truth;
      if (target == "mu")
        truth = mu_truth.at({area, time});
      else if (target == "theta")
        truth = theta_truth.at(area);
      else if (target == "delta")
        truth = delta_truth.at(area);
      else
        fail("ParseError", "line " + std::to_string(line_no) + ": unknown target " + target);
      Acc& a = acc[TargetKey{f[1], target, area, time}];
      if (!f[5].empty()) {
        const double est = std::stod(f[5]);
        ++a.r_est;
        a.err += est - truth;
        a.err2 += (est - truth) * (est - truth);
      }
      if (!f[6].empty() && !f[7].empty()) {
        const double lo = std::stod(f[6]), hi = std::stod(f[7]);
        ++a.r_int;
        a.cover += (lo <= truth && truth <= hi) ? 1 : 0;
        a.width += hi - lo;
      }
    }
  }

  std::ofstream f(out_path);
  if (!f) fail("IoError", "cannot open " + out_path);
  f << "estimator,target,area_id,time,n,bias,rmse,cover,width,r_est,r_int\n";
  for (const auto& [key, a] : acc) {
    f << key.estimator << ',' << key.target << ',' << key.area << ','
      << (key.time > 0 ? std::to_string(key.time) : "") << ',';
    if (key.target == "mu" && n_of.count({key.area, key.time}))
      f << n_of[{key.area, key.time}];
    f << ',';
    if (a.r_est > 0)
      f << fmt(a.err / a.r_est) << ',' << fmt(std::sqrt(a.err2 / a.r_est)) << ',';
    else
      f << ",,";
    if (a.r_int > 0)
      f << fmt(a.cover / a.r_int) << ',' << fmt(a.width / a.r_int) << ',';
    else
      f << ",,";
    f << a.r_est << ',' << a.r_int << '\n';
  }
  std::cout << "scores written to " << out_path << "\n";
  return 0;
}

int run_waic(const std::string& data_path, const std::vector<std::string>& dumps,
             const std::string& out_path) {
  LoadedPanel panel = load_panel_csv(data_path, false);
  std::vector<WaicResult> results;
  std::vector<std::string> names;
  for (const auto& path : dumps) {
    PosteriorDraws d = read_draw_dump(path);
    if (d.J != panel.data.idx.J || d.T != panel.data.idx.T)
      fail("InconsistentPanel", path + " does not match the panel dimensions");
    if (d.observed != panel.data.table.observed_indices())
      fail("InconsistentPanel", path + " was fit to a different observed-cell set");
    results.push_back(waic(pointwise_loglik(d, panel.data.table)));
    names.push_back(path + ":" + to_string(d.variant));
  }
  int best = 0;
  for (size_t i = 1; i < results.size(); ++i)
    if (results[i].elpd > results[best].elpd) best = static_cast<int>(i);

  std::ofstream f(out_path);
  if (!f) fail("IoError", "cannot open " + out_path);
  f << "model,elpd_waic,p_waic,waic,elpd_diff,tau_diff\n";
  for (size_t i = 0; i < results.size(); ++i) {
    ElpdDiff diff{0.0, 0.0};
    if (static_cast<int>(i) != best) diff = elpd_compare(results[i], results[best]);
    f << names[i] << ',' << fmt(results[i].elpd) << ',' << fmt(results[i].p_eff) << ','
      << fmt(results[i].waic) << ',' << fmt(diff.diff) << ',' << fmt(diff.tau) << '\n';
  }
  std::cout << "waic written to " << out_path << "\n";
  return 0;
}

int run_summarize(const std::string& dump_path, const std::string& data_path,
                  const std::string& aggregates_path, const std::string& areas_path,
                  double level, const std::string& outdir) {
  PosteriorDraws draws = read_draw_dump(dump_path);
  RunMeta meta;
  DirectTable table;
  table.idx = PanelIndex{draws.J, draws.T};
  table.cells.assign(static_cast<size_t>(draws.J * draws.T), DirectCell{});
  Eigen::VectorXd area_ha = Eigen::VectorXd::Ones(draws.J);
  std::vector<AggregateDef> groups;
  if (!data_path.empty()) {
    LoadedPanel panel = load_panel_csv(data_path, false);
    if (panel.data.idx.J != draws.J || panel.data.idx.T != draws.T)
      fail("InconsistentPanel", "panel dimensions do not match the dump");
    table = panel.data.table;
    meta.area_labels = panel.area_labels;
    for (long long t : panel.time_labels) meta.time_labels.push_back(std::to_string(t));
    if (!areas_path.empty()) area_ha = load_areas(areas_path, panel.area_labels);
    if (!aggregates_path.empty())
      groups = load_aggregates(aggregates_path, panel.area_labels);
  }
  meta.config = {{"summarize_of", fs::path(dump_path).filename().string()},
                 {"level", level}};
  EmitOptions opt;
  opt.level = level;
  emit_results(draws, table, area_ha, groups, meta, opt, outdir);
  std::cout << "summaries written to " << outdir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatio-temporal small area estimation for panel direct estimates"};
  app.require_subcommand(1);

  FitOptions fit;
  auto* cfit = app.add_subcommand("fit", "fit a model to a panel of direct estimates");
  cfit->add_option("--data", fit.data_path, "panel CSV")->required();
  cfit->add_option("--adjacency", fit.adjacency_path, "edge list file")->required();
  cfit->add_option("--model", fit.model, "full | sub1 | sub2");
  cfit->add_option("--svc-covariates", fit.svc_list,
                   "comma separated covariate names given spatially varying coefficients");
  cfit->add_option("--priors", fit.priors_path, "priors JSON file");
  cfit->add_option("--aggregates", fit.aggregates_path, "aggregate definition file");
  cfit->add_option("--areas", fit.areas_path, "area (hectares) file for totals");
  cfit->add_option("--out", fit.outdir, "output directory");
  cfit->add_option("--t1", fit.t1, "change baseline time value");
  cfit->add_option("--t2", fit.t2, "change end time value");
  cfit->add_option("--level", fit.level, "credible level");
  cfit->add_option("--seed", fit.sampler.seed, "master seed");
  cfit->add_flag("--link-islands", fit.link_islands, "link isolated areas to nearest index");
  cfit->add_flag("--standardize", fit.standardize, "standardize covariates");
  cfit->add_flag("--dump-draws", fit.dump_draws, "write draws.bin");
  cfit->add_flag("--store-eta", fit.sampler.store_eta,
                 "store intercept-process draws (and include them in the dump)");
  add_sampler_flags(cfit, fit.sampler);

  SimulateOptions sim;
  auto* csim = app.add_subcommand("simulate", "generate a population and replicate samples");
  csim->add_option("--grid", sim.pop.grid, "units per grid side");
  csim->add_option("--areas-per-side", sim.pop.areas_per_side, "areal blocks per side");
  csim->add_option("--times", sim.pop.T, "time steps");
  csim->add_option("--zeta0", sim.pop.zeta0, "intercept");
  csim->add_option("--zeta1", sim.pop.zeta1, "covariate coefficient");
  csim->add_option("--sigma2-y", sim.pop.sigma2_y, "unit noise variance");
  csim->add_option("--sigma2-w", sim.pop.sigma2_w, "random walk innovation variance");
  csim->add_option("--gamma", sim.pop.gamma, "spatial decay per km");
  csim->add_option("--spacing", sim.pop.spacing_km, "km between adjacent units");
  csim->add_option("--seed", sim.seed,
                   "master seed; population, sampling, and fits use sub-streams");
  csim->add_option("--replicates", sim.replicates, "number of sample replicates");
  csim->add_option("--sample-sizes", sim.sizes_path, "J x T CSV of per-cell sample sizes");
  csim->add_option("--n-max", sim.n_max, "cap for the built-in mixed size pattern");
  csim->add_option("--fit", sim.fit_models,
                   "comma separated models to fit per replicate (full,sub1,sub2)");
  csim->add_option("--level", sim.level, "interval level");
  csim->add_option("--out", sim.outdir, "output directory");
  csim->add_flag("!--no-reps", sim.write_reps, "skip writing per-replicate panels");
  add_sampler_flags(csim, sim.sampler);

  std::string truths_path, trends_path, estimates_path, score_out = "scores.csv";
  auto* cscore = app.add_subcommand("score", "score estimate tables against truths");
  cscore->add_option("--truths", truths_path, "truths.csv from simulate")->required();
  cscore->add_option("--trends-true", trends_path, "trends_true.csv from simulate");
  cscore->add_option("--estimates", estimates_path, "estimates.csv")->required();
  cscore->add_option("--out", score_out, "output CSV");

  std::string waic_data, waic_out = "waic.csv";
  std::vector<std::string> waic_dumps;
  auto* cwaic = app.add_subcommand("waic", "model comparison from draw dumps");
  cwaic->add_option("--data", waic_data, "panel CSV the models were fit to")->required();
  cwaic->add_option("--dump", waic_dumps, "draw dump (repeatable)")->required();
  cwaic->add_option("--out", waic_out, "output CSV");

  std::string sum_dump, sum_data, sum_aggregates, sum_areas, sum_out = "summary_out";
  double sum_level = 0.95;
  auto* csum = app.add_subcommand("summarize", "recompute summaries from a draw dump");
  csum->add_option("--dump", sum_dump, "draws.bin")->required();
  csum->add_option("--data", sum_data, "panel CSV for labels and WAIC");
  csum->add_option("--aggregates", sum_aggregates, "aggregate definition file");
  csum->add_option("--areas", sum_areas, "area file");
  csum->add_option("--level", sum_level, "credible level");
  csum->add_option("--out", sum_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cfit) return run_fit(fit);
    if (*csim) return run_simulate(sim);
    if (*cscore) return run_score(truths_path, trends_path, estimates_path, score_out);
    if (*cwaic) return run_waic(waic_data, waic_dumps, waic_out);
    if (*csum)
      return run_summarize(sum_dump, sum_data, sum_aggregates, sum_areas, sum_level, sum_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
