#include "stfh/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace stfh {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(field);
      field.clear();
    } else if (ch != '\r') {
      field += ch;
    }
  }
  out.push_back(field);
  return out;
}

std::string trimmed(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& s, int line_no) {
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (...) {
    fail("ParseError", "line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
}

long long parse_int(const std::string& s, int line_no) {
  try {
    size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (...) {
    fail("ParseError", "line " + std::to_string(line_no) + ": bad integer '" + s + "'");
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

LoadedPanel load_panel_csv(const std::string& path, bool standardize) {
  std::ifstream in(path);
  if (!in) fail("IoError", "cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) fail("ParseError", "empty file " + path);
  auto header = split_csv_line(line);
  const std::vector<std::string> fixed = {"area_id", "time", "n", "mu_hat", "sigma2_hat"};
  if (header.size() < fixed.size())
    fail("ParseError", "header must start with area_id,time,n,mu_hat,sigma2_hat");
  for (size_t i = 0; i < fixed.size(); ++i)
    if (trimmed(header[i]) != fixed[i])
      fail("ParseError", "header column " + std::to_string(i + 1) + " must be '" + fixed[i] +
                             "', got '" + trimmed(header[i]) + "'");
  std::vector<std::string> cov_names;
  for (size_t i = fixed.size(); i < header.size(); ++i) {
    auto name = trimmed(header[i]);
    if (name.empty()) fail("ParseError", "empty covariate name in header");
    cov_names.push_back(name);
  }
  const int p = static_cast<int>(cov_names.size());

  struct Row {
    int line_no;
    std::string area;
    long long time;
    int n;
    double mu_hat, sigma2_hat;
    bool has_mu, has_sigma2;
    std::vector<double> covs;
  };
  std::vector<Row> rows;
  std::vector<std::string> area_labels;
  std::map<std::string, int> area_index;
  std::vector<long long> time_values;

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trimmed(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      fail("ParseError", "line " + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " fields, got " +
                             std::to_string(fields.size()));
    Row r;
    r.line_no = line_no;
    r.area = trimmed(fields[0]);
    if (r.area.empty()) fail("ParseError", "line " + std::to_string(line_no) + ": empty area_id");
    r.time = parse_int(trimmed(fields[1]), line_no);
    const long long n = parse_int(trimmed(fields[2]), line_no);
    if (n < 0) fail("ParseError", "line " + std::to_string(line_no) + ": negative n");
    r.n = static_cast<int>(n);
    const std::string mu_s = trimmed(fields[3]);
    const std::string s2_s = trimmed(fields[4]);
    r.has_mu = !mu_s.empty();
    r.has_sigma2 = !s2_s.empty();
    r.mu_hat = r.has_mu ? parse_double(mu_s, line_no) : kNaN;
    r.sigma2_hat = r.has_sigma2 ? parse_double(s2_s, line_no) : kNaN;
    if (r.has_sigma2 && r.sigma2_hat < 0.0)
      fail("ParseError", "line " + std::to_string(line_no) + ": negative sigma2_hat");
    for (int k = 0; k < p; ++k) {
      const std::string c = trimmed(fields[5 + k]);
      if (c.empty())
        fail("MissingCovariate", "line " + std::to_string(line_no) + ": covariate '" +
                                     cov_names[k] + "' is empty");
      r.covs.push_back(parse_double(c, line_no));
    }
    if (!area_index.count(r.area)) {
      area_index[r.area] = static_cast<int>(area_labels.size());
      area_labels.push_back(r.area);
    }
    time_values.push_back(r.time);
    rows.push_back(std::move(r));
  }
  if (rows.empty()) fail("ParseError", "no data rows in " + path);

  std::sort(time_values.begin(), time_values.end());
  time_values.erase(std::unique(time_values.begin(), time_values.end()), time_values.end());
  std::map<long long, int> time_index;
  for (size_t i = 0; i < time_values.size(); ++i) time_index[time_values[i]] = int(i);

  LoadedPanel out;
  out.area_labels = area_labels;
  out.time_labels = time_values;
  PanelIndex idx{static_cast<int>(area_labels.size()), static_cast<int>(time_values.size())};
  out.data.idx = idx;
  out.data.table.idx = idx;
  out.data.table.cells.assign(static_cast<size_t>(idx.N()), DirectCell{});
  out.data.X = Eigen::MatrixXd::Constant(idx.N(), p, kNaN);
  out.data.covariate_names = cov_names;

  std::vector<bool> seen(static_cast<size_t>(idx.N()), false);
  for (const auto& r : rows) {
    const int j = area_index[r.area];
    const int t = time_index[r.time];
    const int i = idx.flat(j, t);
    if (seen[i])
      fail("InconsistentPanel", "line " + std::to_string(r.line_no) + ": duplicate cell (" +
                                    r.area + "," + std::to_string(r.time) + ")");
    seen[i] = true;
    DirectCell& c = out.data.table.cells[i];
    c.n = r.n;
    c.mu_hat = r.mu_hat;
    c.sigma2_hat = r.sigma2_hat;
    c.cls = classify_cell(r.n, r.has_mu, r.has_sigma2, r.sigma2_hat);
    if (r.n >= 2 && c.cls == MissClass::SinglePlot) ++out.coerced_cells;
    for (int k = 0; k < p; ++k) out.data.X(i, k) = r.covs[k];
  }

  if (p > 0) {
    for (int i = 0; i < idx.N(); ++i)
      if (!seen[i]) {
        auto [j, t] = idx.unflat(i);
        fail("MissingCovariate", "cell (" + area_labels[j] + "," +
                                     std::to_string(time_values[t]) +
                                     ") has no row; covariates must cover every cell");
      }
  }

  if (standardize && p > 0) {
    for (int k = 0; k < p; ++k) {
      const double mean = out.data.X.col(k).mean();
      const double sd = std::sqrt((out.data.X.col(k).array() - mean).square().sum() /
                                  (idx.N() - 1.0));
      if (!(sd > 0.0))
        fail("DegenerateCovariate", "covariate '" + cov_names[k] + "' is constant");
      out.data.X.col(k) = (out.data.X.col(k).array() - mean) / sd;
      out.standardization[cov_names[k]] = {{"mean", mean}, {"sd", sd}};
    }
  }
  return out;
}

AreaGraph load_adjacency(const std::string& path, int J, bool link_islands,
                         std::vector<std::pair<int, int>>* island_links) {
  std::ifstream in(path);
  if (!in) fail("IoError", "cannot open " + path);
  std::vector<std::pair<int, int>> edges;
  std::string line;
  int line_no = 0;
  int max_id = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto t = trimmed(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream ss(t);
    long long a, b;
    if (!(ss >> a >> b))
      fail("ParseError", "line " + std::to_string(line_no) + ": expected 'i j'");
    std::string rest;
    if (ss >> rest) fail("ParseError", "line " + std::to_string(line_no) + ": trailing tokens");
    edges.emplace_back(static_cast<int>(a), static_cast<int>(b));
    max_id = std::max({max_id, static_cast<int>(a), static_cast<int>(b)});
  }
  if (J <= 0) J = max_id;

  if (link_islands) {
    std::vector<int> degree(J + 1, 0);
    for (auto [a, b] : edges)
      if (a != b && a >= 1 && a <= J && b >= 1 && b <= J) {
        ++degree[a];
        ++degree[b];
      }
    for (int i = 1; i <= J; ++i) {
      if (degree[i] > 0 || J < 2) continue;
      // nearest declared index, ties toward the smaller id
      int best = -1;
      for (int j = 1; j <= J; ++j) {
        if (j == i) continue;
        if (best < 0 || std::abs(j - i) < std::abs(best - i)) best = j;
      }
      edges.emplace_back(i, best);
      ++degree[i];
      ++degree[best];
      if (island_links) island_links->emplace_back(i, best);
    }
  }
  return build_area_graph(J, edges);
}

PriorConfig load_priors(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("IoError", "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail("ParseError", std::string("bad priors file: ") + e.what());
  }
  PriorConfig pc;
  for (auto& [key, value] : j.items()) {
    if (key == "mu_beta") pc.mu_beta = value.get<double>();
    else if (key == "sigma2_beta") pc.sigma2_beta = value.get<double>();
    else if (key == "a_eps") pc.a_eps = value.get<double>();
    else if (key == "b_eps") pc.b_eps = value.get<double>();
    else if (key == "a_eta0") pc.a_eta0 = value.get<double>();
    else if (key == "b_eta0") pc.b_eta0 = value.get<double>();
    else if (key == "a_eta_s") pc.a_eta_s = value.get<double>();
    else if (key == "b_eta_s") pc.b_eta_s = value.get<double>();
    else if (key == "rho_bounds") {
      pc.rho_lo = value.at(0).get<double>();
      pc.rho_hi = value.at(1).get<double>();
    } else if (key == "alpha_bounds") {
      pc.alpha_lo = value.at(0).get<double>();
      pc.alpha_hi = value.at(1).get<double>();
    } else {
      fail("ParseError", "unknown prior key '" + key + "'");
    }
  }
  pc.validate();
  return pc;
}

std::vector<AggregateDef> load_aggregates(const std::string& path,
                                          const std::vector<std::string>& area_labels) {
  std::ifstream in(path);
  if (!in) fail("IoError", "cannot open " + path);
  std::map<std::string, int> index;
  for (size_t i = 0; i < area_labels.size(); ++i) index[area_labels[i]] = int(i);

  std::vector<AggregateDef> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto t = trimmed(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream ss(t);
    AggregateDef def;
    ss >> def.name;
    std::string member;
    while (ss >> member) {
      auto it = index.find(member);
      if (it == index.end())
        fail("ParseError", "line " + std::to_string(line_no) + ": unknown area '" + member + "'");
      def.areas.push_back(it->second);
    }
    if (def.areas.empty())
      fail("EmptyGroup", "line " + std::to_string(line_no) + ": group '" + def.name +
                             "' has no members");
    out.push_back(std::move(def));
  }
  return out;
}

Eigen::VectorXd load_areas(const std::string& path,
                           const std::vector<std::string>& area_labels) {
  std::ifstream in(path);
  if (!in) fail("IoError", "cannot open " + path);
  std::map<std::string, int> index;
  for (size_t i = 0; i < area_labels.size(); ++i) index[area_labels[i]] = int(i);
  Eigen::VectorXd out = Eigen::VectorXd::Constant(area_labels.size(), kNaN);

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto t = trimmed(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream ss(t);
    std::string label;
    double ha;
    if (!(ss >> label >> ha))
      fail("ParseError", "line " + std::to_string(line_no) + ": expected 'label hectares'");
    auto it = index.find(label);
    if (it == index.end())
      fail("ParseError", "line " + std::to_string(line_no) + ": unknown area '" + label + "'");
    if (!(ha > 0.0)) fail("NonPositiveArea", "area of '" + label + "' must be positive");
    out[it->second] = ha;
  }
  for (size_t i = 0; i < area_labels.size(); ++i)
    if (!std::isfinite(out[static_cast<int>(i)]))
      fail("ParseError", "area '" + area_labels[i] + "' missing from " + path);
  return out;
}

std::uint64_t config_hash(const nlohmann::json& config) {
  const std::string s = config.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

void write_summary_row(std::ofstream& f, const std::string& target, const std::string& area,
                       const std::string& time, const Eigen::VectorXd& col, int n_chains,
                       double level) {
  Summary s = summarize(col, level);
  double rhat = kNaN, ess = kNaN;
  const int per = static_cast<int>(col.size()) / std::max(1, n_chains);
  if (n_chains >= 2 && per >= 4) {
    rhat = split_rhat(col, n_chains);
    ess = effective_sample_size(col, n_chains);
  }
  f << target << ',' << area << ',' << time << ',' << fmt(s.mean) << ',' << fmt(s.median)
    << ',' << fmt(s.sd) << ',' << fmt(s.lo) << ',' << fmt(s.hi) << ',' << fmt(rhat) << ','
    << fmt(ess) << '\n';
}

}  // namespace

void emit_results(const PosteriorDraws& draws, const DirectTable& table,
                  const Eigen::VectorXd& area_ha, const std::vector<AggregateDef>& groups,
                  const RunMeta& meta, const EmitOptions& opt, const std::string& outdir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(outdir, ec);
  if (ec) fail("IoError", "cannot create " + outdir);

  const PanelIndex idx{draws.J, draws.T};
  const int t2 = opt.t2 < 0 ? idx.T - 1 : opt.t2;
  auto area_label = [&](int j) {
    return j < static_cast<int>(meta.area_labels.size()) ? meta.area_labels[j]
                                                         : std::to_string(j + 1);
  };
  auto time_label = [&](int t) {
    return t < static_cast<int>(meta.time_labels.size()) ? meta.time_labels[t]
                                                         : std::to_string(t + 1);
  };

  {
    std::ofstream f(fs::path(outdir) / "summary.csv");
    f << "target,area_id,time,mean,median,sd,lower,upper,rhat,ess\n";
    for (int j = 0; j < idx.J; ++j)
      for (int t = 0; t < idx.T; ++t)
        write_summary_row(f, "mu", area_label(j), time_label(t),
                          draws.mu.col(idx.flat(j, t)), draws.n_chains, opt.level);
    for (int b = 0; b < draws.beta.cols(); ++b)
      write_summary_row(f, "beta" + std::to_string(b), "", "", draws.beta.col(b),
                        draws.n_chains, opt.level);
    write_summary_row(f, "sigma2_eps", "", "", draws.sigma2_eps, draws.n_chains, opt.level);
    write_summary_row(f, "sigma2_eta0", "", "", draws.sigma2_eta0, draws.n_chains, opt.level);
    if (draws.variant != Variant::Sub2)
      write_summary_row(f, "rho_eta0", "", "", draws.rho_eta0, draws.n_chains, opt.level);
    write_summary_row(f, "alpha_eta0", "", "", draws.alpha_eta0, draws.n_chains, opt.level);
    for (int k = 0; k < draws.q; ++k) {
      write_summary_row(f, "sigma2_eta_s" + std::to_string(k), "", "",
                        draws.sigma2_eta_s.col(k), draws.n_chains, opt.level);
      write_summary_row(f, "rho_eta_s" + std::to_string(k), "", "", draws.rho_eta_s.col(k),
                        draws.n_chains, opt.level);
    }
  }

  {
    std::ofstream f(fs::path(outdir) / "waic.csv");
    f << "model,elpd_waic,p_waic,waic,n_cells\n";
    if (!draws.observed.empty()) {
      WaicResult w = waic(pointwise_loglik(draws, table));
      f << to_string(draws.variant) << ',' << fmt(w.elpd) << ',' << fmt(w.p_eff) << ','
        << fmt(w.waic) << ',' << draws.observed.size() << '\n';
    }
  }

  {
    std::ofstream f(fs::path(outdir) / "trend.csv");
    f << "area_id,mean,median,sd,lower,upper,excludes_zero\n";
    if (idx.T >= 2) {
      Eigen::MatrixXd theta = trend_draws_all(draws.mu, idx);
      for (int j = 0; j < idx.J; ++j) {
        Summary s = summarize(theta.col(j), opt.level);
        f << area_label(j) << ',' << fmt(s.mean) << ',' << fmt(s.median) << ',' << fmt(s.sd)
          << ',' << fmt(s.lo) << ',' << fmt(s.hi) << ',' << (s.excludes_zero ? 1 : 0) << '\n';
      }
    }
  }

  {
    std::ofstream f(fs::path(outdir) / "change.csv");
    f << "area_id,t1,t2,mean,median,sd,lower,upper,excludes_zero\n";
    if (idx.T >= 2 && opt.t1 < t2) {
      Eigen::MatrixXd delta = change_draws_all(draws.mu, idx, opt.t1, t2);
      for (int j = 0; j < idx.J; ++j) {
        Summary s = summarize(delta.col(j), opt.level);
        f << area_label(j) << ',' << time_label(opt.t1) << ',' << time_label(t2) << ','
          << fmt(s.mean) << ',' << fmt(s.median) << ',' << fmt(s.sd) << ',' << fmt(s.lo) << ','
          << fmt(s.hi) << ',' << (s.excludes_zero ? 1 : 0) << '\n';
      }
    }
  }

  {
    std::ofstream f(fs::path(outdir) / "aggregates.csv");
    f << "group,target,time,mean,median,sd,lower,upper,excludes_zero\n";
    for (const auto& def : groups) {
      AggregateDraws agg = totals_and_aggregates(draws.mu, idx, area_ha, def.areas, def.name,
                                                 opt.t1, t2);
      auto row = [&](const std::string& target, const std::string& time,
                     const Eigen::VectorXd& col) {
        Summary s = summarize(col, opt.level);
        f << def.name << ',' << target << ',' << time << ',' << fmt(s.mean) << ','
          << fmt(s.median) << ',' << fmt(s.sd) << ',' << fmt(s.lo) << ',' << fmt(s.hi) << ','
          << (s.excludes_zero ? 1 : 0) << '\n';
      };
      for (int t = 0; t < idx.T; ++t) row("omega", time_label(t), agg.omega.col(t));
      for (int t = 0; t < idx.T; ++t) row("mu", time_label(t), agg.mu.col(t));
      if (idx.T >= 2) {
        row("theta", "", agg.theta);
        row("delta", "", agg.delta);
        row("theta_total", "", agg.theta_total);
        row("delta_total", "", agg.delta_total);
      }
    }
  }

  {
    nlohmann::json j = meta.extra;
    j["model"] = to_string(draws.variant);
    j["J"] = draws.J;
    j["T"] = draws.T;
    j["p"] = draws.p;
    j["q"] = draws.q;
    j["seed"] = draws.seed;
    j["chains"] = draws.n_chains;
    j["draws"] = draws.M();
    j["config_hash"] = config_hash(meta.config);
    j["area_order"] = meta.area_labels;
    j["time_order"] = meta.time_labels;
    nlohmann::json acc = nlohmann::json::array();
    for (const auto& a : draws.acceptance)
      acc.push_back({{"target", a.target}, {"rate", a.rate()}, {"step", a.final_step}});
    j["acceptance"] = acc;
    std::ofstream f(fs::path(outdir) / "meta.json");
    f << j.dump(2) << '\n';
  }

  if (opt.dump_draws) write_draw_dump((fs::path(outdir) / "draws.bin").string(), draws);
}

namespace {

constexpr char kDumpMagic[8] = {'S', 'T', 'F', 'H', 'D', 'R', 'W', '1'};

template <typename T>
void put(std::ofstream& f, const T& v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T get(std::ifstream& f) {
  T v;
  f.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

void put_vec(std::ofstream& f, const double* data, size_t count) {
  f.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * 8));
}
void get_vec(std::ifstream& f, double* data, size_t count) {
  f.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * 8));
}

}  // namespace

void write_draw_dump(const std::string& path, const PosteriorDraws& d) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail("IoError", "cannot open " + path + " for writing");
  f.write(kDumpMagic, 8);
  const int n_obs = static_cast<int>(d.observed.size());
  const int store_eta = d.eta0.size() > 0 ? 1 : 0;
  for (int v : {d.J, d.T, d.p, d.q, static_cast<int>(d.variant), d.n_chains, d.M(), n_obs,
                store_eta, 0})
    put<std::int32_t>(f, v);
  put<std::uint64_t>(f, d.seed);
  for (int i : d.observed) put<std::int32_t>(f, i);

  const int N = d.J * d.T;
  // mu/beta/sigma2_cell rows are written through row buffers since Eigen
  // matrices are column-major
  Eigen::VectorXd row;
  for (int l = 0; l < d.M(); ++l) {
    put<std::int32_t>(f, d.chain[l]);
    row = d.mu.row(l);
    put_vec(f, row.data(), N);
    row = d.beta.row(l);
    put_vec(f, row.data(), d.p + 1);
    if (n_obs > 0) {
      row = d.sigma2_cell.row(l);
      put_vec(f, row.data(), n_obs);
    }
    put<double>(f, d.sigma2_eps[l]);
    put<double>(f, d.sigma2_eta0[l]);
    put<double>(f, d.rho_eta0[l]);
    put<double>(f, d.alpha_eta0[l]);
    if (d.q > 0) {
      row = d.sigma2_eta_s.row(l);
      put_vec(f, row.data(), d.q);
      row = d.rho_eta_s.row(l);
      put_vec(f, row.data(), d.q);
    }
    if (store_eta) {
      row = d.eta0.row(l);
      put_vec(f, row.data(), N);
    }
  }
  if (!f) fail("IoError", "short write to " + path);
}

PosteriorDraws read_draw_dump(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail("IoError", "cannot open " + path);
  char magic[8];
  f.read(magic, 8);
  if (!f || std::memcmp(magic, kDumpMagic, 8) != 0)
    fail("ParseError", path + " is not a draw dump");

  PosteriorDraws d;
  d.J = get<std::int32_t>(f);
  d.T = get<std::int32_t>(f);
  d.p = get<std::int32_t>(f);
  d.q = get<std::int32_t>(f);
  d.variant = static_cast<Variant>(get<std::int32_t>(f));
  d.n_chains = get<std::int32_t>(f);
  const int M = get<std::int32_t>(f);
  const int n_obs = get<std::int32_t>(f);
  const int store_eta = get<std::int32_t>(f);
  get<std::int32_t>(f);  // reserved
  d.seed = get<std::uint64_t>(f);
  d.observed.resize(n_obs);
  for (int i = 0; i < n_obs; ++i) d.observed[i] = get<std::int32_t>(f);

  const int N = d.J * d.T;
  d.mu.resize(M, N);
  d.beta.resize(M, d.p + 1);
  d.sigma2_cell.resize(M, n_obs);
  d.sigma2_eps.resize(M);
  d.sigma2_eta0.resize(M);
  d.rho_eta0.resize(M);
  d.alpha_eta0.resize(M);
  d.sigma2_eta_s.resize(M, d.q);
  d.rho_eta_s.resize(M, d.q);
  if (store_eta) d.eta0.resize(M, N);
  d.chain.resize(M);

  Eigen::VectorXd row(N);
  for (int l = 0; l < M; ++l) {
    d.chain[l] = get<std::int32_t>(f);
    get_vec(f, row.data(), N);
    d.mu.row(l) = row;
    Eigen::VectorXd brow(d.p + 1);
    get_vec(f, brow.data(), d.p + 1);
    d.beta.row(l) = brow;
    if (n_obs > 0) {
      Eigen::VectorXd srow(n_obs);
      get_vec(f, srow.data(), n_obs);
      d.sigma2_cell.row(l) = srow;
    }
    d.sigma2_eps[l] = get<double>(f);
    d.sigma2_eta0[l] = get<double>(f);
    d.rho_eta0[l] = get<double>(f);
    d.alpha_eta0[l] = get<double>(f);
    if (d.q > 0) {
      Eigen::VectorXd qrow(d.q);
      get_vec(f, qrow.data(), d.q);
      d.sigma2_eta_s.row(l) = qrow;
      get_vec(f, qrow.data(), d.q);
      d.rho_eta_s.row(l) = qrow;
    }
    if (store_eta) {
      get_vec(f, row.data(), N);
      d.eta0.row(l) = row;
    }
  }
  if (!f) fail("ParseError", "truncated draw dump " + path);
  return d;
}

}  // namespace stfh
