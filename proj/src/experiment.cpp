#include "irsrrm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "irsrrm/admm.hpp"
#include "irsrrm/baselines.hpp"
#include "irsrrm/maxmin.hpp"
#include "irsrrm/rng.hpp"
#include "irsrrm/scenario.hpp"

namespace irsrrm {

namespace {

const std::vector<std::string> kMethodOrder{"admm", "mes", "mrs", "no_irs", "af"};

int method_rank(const std::string& m) {
  for (size_t i = 0; i < kMethodOrder.size(); ++i)
    if (kMethodOrder[i] == m) return static_cast<int>(i);
  return static_cast<int>(kMethodOrder.size());
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad numeric value for '" + key + "': " + v);
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer value for '" + key + "': " + v);
  }
}

std::string fmt9(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

uint64_t subset_to_mask(const std::vector<int>& subset) {
  uint64_t mask = 0;
  for (int m : subset) mask |= (uint64_t{1} << m);
  return mask;
}

struct MethodOutcome {
  rvec sinrs;        // evaluated on the true channels
  rvec p;
  int triggered = 0;
  uint64_t mask = 0;
  double tx_power = 0.0;
  double total_power = 0.0;
  int phase1_iters = 0;
  int outer_iters = 0;
  std::string warnings;
};

}  // namespace

void ExperimentConfig::validate() const {
  if (K < 1 || M < 1 || L < 1) throw std::invalid_argument("config: K, M, L must be >= 1");
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (methods.empty()) throw std::invalid_argument("config: methods must be non-empty");
  for (const auto& m : methods)
    if (method_rank(m) >= static_cast<int>(kMethodOrder.size()))
      throw std::invalid_argument("config: unknown method '" + m + "'");
  if (!sweep.empty() && sweep != "delta" && sweep != "K" && sweep != "M" && sweep != "L" &&
      sweep != "p_max_dbm" && sweep != "csi_xi")
    throw std::invalid_argument("config: unknown sweep parameter '" + sweep + "'");
  if (!sweep.empty() && sweep_values.empty())
    throw std::invalid_argument("config: sweep set but sweep_values empty");
  if (!(tol_primal > 0.0) || !(eps_bisect > 0.0) || !(tol_feas > 0.0))
    throw std::invalid_argument("config: tolerances must be positive");
  if (mu_mode != "dual-ascent" && mu_mode != "paper-literal")
    throw std::invalid_argument("config: mu_mode must be dual-ascent or paper-literal");
  if (csi_xi && !(*csi_xi >= 0.0 && *csi_xi <= 1.0))
    throw std::invalid_argument("config: csi_xi must lie in [0, 1]");
  if (delta && !(*delta > 0.0)) throw std::invalid_argument("config: delta must be positive");
  if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));

    if (key == "K") cfg.K = static_cast<int>(parse_int(key, value));
    else if (key == "M") cfg.M = static_cast<int>(parse_int(key, value));
    else if (key == "L") cfg.L = static_cast<int>(parse_int(key, value));
    else if (key == "p_max_dbm") cfg.p_max_dbm = parse_double(key, value);
    else if (key == "sigma2_dbm") cfg.sigma2_dbm = parse_double(key, value);
    else if (key == "sweep") cfg.sweep = value;
    else if (key == "sweep_values") {
      cfg.sweep_values.clear();
      for (const auto& v : split_list(value)) cfg.sweep_values.push_back(parse_double(key, v));
    } else if (key == "methods") cfg.methods = split_list(value);
    else if (key == "trials") cfg.trials = static_cast<int>(parse_int(key, value));
    else if (key == "master_seed") cfg.master_seed = static_cast<uint64_t>(parse_int(key, value));
    else if (key == "c") cfg.c = parse_double(key, value);
    else if (key == "delta") cfg.delta = parse_double(key, value);
    else if (key == "tol_primal") cfg.tol_primal = parse_double(key, value);
    else if (key == "eps_bisect") cfg.eps_bisect = parse_double(key, value);
    else if (key == "tol_feas") cfg.tol_feas = parse_double(key, value);
    else if (key == "max_inner_iter") cfg.max_inner_iter = static_cast<int>(parse_int(key, value));
    else if (key == "max_feas_iter") cfg.max_feas_iter = static_cast<int>(parse_int(key, value));
    else if (key == "max_outer_iter") cfg.max_outer_iter = static_cast<int>(parse_int(key, value));
    else if (key == "mu_mode") cfg.mu_mode = value;
    else if (key == "zero_threshold") cfg.zero_threshold = parse_double(key, value);
    else if (key == "csi_xi") cfg.csi_xi = parse_double(key, value);
    else if (key == "sigma_v2_dbm") cfg.sigma_v2_dbm = parse_double(key, value);
    else if (key == "bandwidth_mhz") cfg.bandwidth_mhz = parse_double(key, value);
    else if (key == "record_runtime") {
      if (value == "true" || value == "1") cfg.record_runtime = true;
      else if (value == "false" || value == "0") cfg.record_runtime = false;
      else throw std::invalid_argument("config: record_runtime must be true/false");
    } else if (key == "workers") cfg.workers = static_cast<int>(parse_int(key, value));
    else throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

namespace {

struct Cell {
  double sweep_value;
  int value_index;
  int trial;
};

// Scenario for one cell: base config with the swept parameter replaced.
Scenario cell_scenario(const ExperimentConfig& cfg, const std::string& sweep, double value) {
  int K = cfg.K, M = cfg.M, L = cfg.L;
  double p_max_dbm = cfg.p_max_dbm;
  if (sweep == "K") K = static_cast<int>(value);
  else if (sweep == "M") M = static_cast<int>(value);
  else if (sweep == "L") L = static_cast<int>(value);
  else if (sweep == "p_max_dbm") p_max_dbm = value;
  Scenario sc = Scenario::defaults(K, M, L);
  sc.p_max.assign(static_cast<size_t>(K), dbm_to_watts(p_max_dbm));
  sc.sigma2 = dbm_to_watts(cfg.sigma2_dbm);
  return sc;
}

MethodOutcome irs_outcome(const MaxMinSolution& sol, const std::vector<int>& subset,
                          const EffectiveChannels& eff_true, int L,
                          const PowerModelParams& pm) {
  MethodOutcome out;
  out.sinrs = sol.phi.size() > 0 ? sinr_all(sol.phi, sol.p, eff_true) : rvec::Zero(eff_true.K);
  out.p = sol.p;
  out.triggered = static_cast<int>(subset.size());
  out.mask = subset_to_mask(subset);
  out.tx_power = sol.p.sum();
  out.total_power = total_power_irs(sol.p, out.triggered, L, pm);
  out.outer_iters = sol.outer_iters;
  if (!sol.converged) out.warnings = "maxmin-outer-not-converged";
  return out;
}

void run_cell(const ExperimentConfig& cfg, const Cell& cell, const std::string& trace_dir,
              std::vector<TrialRecord>& out) {
  const std::string sweep = cfg.sweep;
  Scenario sc = cell_scenario(cfg, sweep, cell.sweep_value);
  const uint64_t trial = static_cast<uint64_t>(cell.trial);

  Geometry geo = sample_positions(sc, Rng::substream(cfg.master_seed, trial, "geometry").next_u64());
  ChannelSet ch = generate_channels(sc, geo, Rng::substream(cfg.master_seed, trial, "channels").next_u64());

  std::optional<double> xi = cfg.csi_xi;
  if (sweep == "csi_xi") xi = cell.sweep_value;
  ChannelSet ch_design = ch;
  if (xi && *xi < 1.0)
    ch_design = perturb_csi(ch, *xi, Rng::substream(cfg.master_seed, trial, "csi").next_u64());

  rvec p_max = Eigen::Map<const rvec>(sc.p_max.data(), sc.K);
  EffectiveChannels eff_design = make_effective_channels(ch_design, p_max, sc.sigma2);
  EffectiveChannels eff_true = make_effective_channels(ch, p_max, sc.sigma2);

  double delta = cfg.delta ? *cfg.delta
                           : 0.6 * delta_upper_bound(sc.M, sc.K, sc.n_elements(),
                                                     *std::max_element(sc.p_max.begin(), sc.p_max.end()));
  if (sweep == "delta") delta = cell.sweep_value;

  AdmmParams ap = AdmmParams::for_delta(delta);
  ap.c = cfg.c;
  ap.tol_primal = cfg.tol_primal;
  ap.eps_bisect = cfg.eps_bisect;
  ap.max_inner_iter = cfg.max_inner_iter;
  ap.zero_threshold = cfg.zero_threshold;
  ap.mu_mode = cfg.mu_mode == "paper-literal" ? MuMode::kPaperLiteral : MuMode::kDualAscent;
  ap.record_trace = !trace_dir.empty();

  MaxMinOptions mo;
  mo.eps = cfg.eps_bisect;
  mo.max_outer = cfg.max_outer_iter;
  mo.tol_feas = cfg.tol_feas;
  mo.max_feas_iter = cfg.max_feas_iter;

  const uint64_t init_seed = Rng::substream(cfg.master_seed, trial, "phase2-init").next_u64();
  const PowerModelParams pm;

  bool need_phase1 = false;
  for (const auto& m : cfg.methods)
    if (m == "admm" || m == "mes" || m == "mrs" || m == "af") need_phase1 = true;

  SelectionResult sel;
  if (need_phase1) {
    sel = bisection_identify(eff_design, ap);
    if (!trace_dir.empty() && !sel.trace.empty()) {
      char name[128];
      std::snprintf(name, sizeof(name), "/admm_trace_v%d_t%d.csv", cell.value_index, cell.trial);
      std::ofstream tf(trace_dir + name, std::ios::binary);
      tf << "iter,res_w,res_f,objective\n";
      for (const auto& row : sel.trace)
        tf << row.iter << ',' << fmt9(row.res_w) << ',' << fmt9(row.res_f) << ','
           << fmt9(row.objective) << '\n';
    }
  }

  for (const auto& method : cfg.methods) {
    auto started = std::chrono::steady_clock::now();
    TrialRecord rec;
    rec.trial = cell.trial;
    rec.method = method;
    rec.sweep_value = cell.sweep_value;

    MethodOutcome oc;
    if (method == "admm") {
      MaxMinSolution sol = alternate(eff_design, sel.subset, init_seed, mo);
      oc = irs_outcome(sol, sel.subset, eff_true, sc.L, pm);
      oc.phase1_iters = sel.iterations;
    } else if (method == "mes") {
      BaselineResult r = mes(eff_design, static_cast<int>(sel.subset.size()), init_seed, mo);
      oc = irs_outcome(r.sol, r.subset, eff_true, sc.L, pm);
    } else if (method == "mrs") {
      BaselineResult r = mrs(eff_design, static_cast<int>(sel.subset.size()),
                             Rng::substream(cfg.master_seed, trial, "mrs").next_u64(), init_seed, mo);
      oc = irs_outcome(r.sol, r.subset, eff_true, sc.L, pm);
    } else if (method == "no_irs") {
      MaxMinSolution sol = no_irs_maxmin(ch_design.d_direct, sc.sigma2, p_max, cfg.eps_bisect);
      oc.p = sol.p;
      rmat gains(sc.K, sc.K);
      for (int k = 0; k < sc.K; ++k)
        for (int j = 0; j < sc.K; ++j) gains(j, k) = std::norm(ch.d_direct(k, j));
      oc.sinrs = sinr_from_gains(gains, sol.p, sc.sigma2);
      oc.tx_power = sol.p.sum();
      oc.total_power = total_power_irs(sol.p, 0, sc.L, pm);
      oc.outer_iters = sol.outer_iters;
    } else {  // af
      std::vector<int> elems;
      for (int m : sel.subset)
        for (int l = 0; l < sc.L; ++l) elems.push_back(m * sc.L + l);
      const int Na = static_cast<int>(elems.size());
      oc.triggered = static_cast<int>(sel.subset.size());
      oc.mask = subset_to_mask(sel.subset);
      if (Na < sc.K) {
        oc.sinrs = rvec::Zero(sc.K);
        oc.p = rvec::Zero(sc.K);
        oc.total_power = total_power_af(oc.p, 0.0, Na, pm);
        oc.warnings = "af-too-few-antennas";
      } else {
        auto stack = [&](const ChannelSet& c) {
          cmat H(Na, sc.K), G(sc.K, Na);
          for (int k = 0; k < sc.K; ++k)
            for (int r = 0; r < Na; ++r) {
              H(r, k) = c.h[k](elems[r]);
              G(k, r) = std::conj(c.g[k](elems[r]));
            }
          return std::pair{H, G};
        };
        auto [Hd, Gd] = stack(ch_design);
        AfConfig afc;
        afc.P_r_max = p_max.sum();
        afc.sigma_v2 = dbm_to_watts(cfg.sigma_v2_dbm);
        afc.p_max = p_max;
        afc.sigma2 = sc.sigma2;
        AfSolution sol = af_maxmin_power(Hd, Gd, afc, cfg.eps_bisect);
        if (!sol.valid) {
          oc.warnings = "af-singular-grams";
          oc.sinrs = rvec::Zero(sc.K);
          oc.p = rvec::Zero(sc.K);
          oc.total_power = total_power_af(oc.p, 0.0, Na, pm);
        } else {
          oc.p = sol.p;
          oc.sinrs = sol.sinrs;
          // Evaluate on the true channels when the design used estimates.
          if (xi && *xi < 1.0) {
            auto [Ht, Gt] = stack(ch);
            rvec s(sc.K);
            bool ok = true;
            try {
              for (int k = 0; k < sc.K; ++k) {
                double z = af_amplify_factor(k, Ht, Gt, sol.p, afc.P_r_max, afc.sigma_v2);
                s(k) = af_sinr(k, Ht, Gt, sol.p, z, afc.sigma_v2, afc.sigma2);
              }
            } catch (const std::exception&) {
              ok = false;
              oc.warnings = "af-true-channel-eval-failed";
            }
            if (ok) oc.sinrs = s;
          }
          oc.tx_power = sol.p.sum() + afc.P_r_max;
          oc.total_power = total_power_af(sol.p, afc.P_r_max, Na, pm);
        }
      }
    }

    double min_sinr = oc.sinrs.size() > 0 ? oc.sinrs.minCoeff() : 0.0;
    rec.min_sinr_db = to_db(min_sinr);
    rec.per_user_sinr = oc.sinrs;
    rec.triggered_count = oc.triggered;
    rec.subset_mask = oc.mask;
    rec.total_tx_power_w = oc.tx_power;
    rec.sum_rate_bph = sum_rate(oc.sinrs);
    rec.ee_bpjphz = oc.total_power > 0.0 ? energy_efficiency(oc.sinrs, oc.total_power) : 0.0;
    rec.phase1_iters = (method == "admm" || method == "mes" || method == "mrs" || method == "af")
                           ? sel.iterations
                           : 0;
    rec.outer_iters = oc.outer_iters;
    rec.warnings = oc.warnings;
    if (cfg.record_runtime) {
      auto elapsed = std::chrono::steady_clock::now() - started;
      rec.runtime_ms = std::chrono::duration<double, std::milli>(elapsed).count();
    }
    out.push_back(std::move(rec));
  }
}

}  // namespace

std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg, const std::string& trace_dir) {
  cfg.validate();
  std::vector<double> values = cfg.sweep_values;
  if (values.empty()) values.push_back(0.0);

  std::vector<Cell> cells;
  for (size_t vi = 0; vi < values.size(); ++vi)
    for (int t = 0; t < cfg.trials; ++t)
      cells.push_back({values[vi], static_cast<int>(vi), t});

  std::vector<std::vector<TrialRecord>> slots(cells.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      run_cell(cfg, cells[i], trace_dir, slots[i]);
    }
  };
  int nworkers = std::min<int>(cfg.workers, static_cast<int>(cells.size()));
  if (nworkers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nworkers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<TrialRecord> records;
  for (auto& s : slots)
    for (auto& r : s) records.push_back(std::move(r));
  std::stable_sort(records.begin(), records.end(), [](const TrialRecord& a, const TrialRecord& b) {
    if (a.sweep_value != b.sweep_value) return a.sweep_value < b.sweep_value;
    if (a.trial != b.trial) return a.trial < b.trial;
    return method_rank(a.method) < method_rank(b.method);
  });
  return records;
}

std::string to_csv(const std::vector<TrialRecord>& records) {
  std::string out =
      "trial,method,sweep_value,min_sinr_db,per_user_sinr,triggered_count,subset,"
      "total_tx_power_w,sum_rate_bph,ee_bpjphz,phase1_iters,outer_iters,runtime_ms,warnings\n";
  char buf[64];
  for (const auto& r : records) {
    out += std::to_string(r.trial);
    out += ',';
    out += r.method;
    out += ',';
    out += fmt9(r.sweep_value);
    out += ',';
    out += fmt9(r.min_sinr_db);
    out += ',';
    for (int k = 0; k < r.per_user_sinr.size(); ++k) {
      if (k) out += ';';
      out += fmt9(r.per_user_sinr(k));
    }
    out += ',';
    out += std::to_string(r.triggered_count);
    out += ',';
    std::snprintf(buf, sizeof(buf), "0x%llx", static_cast<unsigned long long>(r.subset_mask));
    out += buf;
    out += ',';
    out += fmt9(r.total_tx_power_w);
    out += ',';
    out += fmt9(r.sum_rate_bph);
    out += ',';
    out += fmt9(r.ee_bpjphz);
    out += ',';
    out += std::to_string(r.phase1_iters);
    out += ',';
    out += std::to_string(r.outer_iters);
    out += ',';
    out += fmt9(r.runtime_ms);
    out += ',';
    out += r.warnings;
    out += '\n';
  }
  return out;
}

std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& records) {
  if (records.empty()) throw std::invalid_argument("aggregate: no records");
  std::map<std::pair<double, int>, std::vector<const TrialRecord*>> groups;
  std::map<std::pair<double, int>, int> warned;
  std::map<int, std::string> names;
  for (const auto& r : records) {
    auto key = std::make_pair(r.sweep_value, method_rank(r.method));
    names[method_rank(r.method)] = r.method;
    if (r.warnings.empty())
      groups[key].push_back(&r);
    else
      ++warned[key];
  }
  auto mean_se = [](const std::vector<double>& xs, double& mean, double& se) {
    mean = 0.0;
    se = 0.0;
    if (xs.empty()) return;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    if (xs.size() < 2) return;
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size() - 1);
    se = std::sqrt(var / static_cast<double>(xs.size()));
  };
  std::vector<AggregateRow> rows;
  std::set<std::pair<double, int>> keys;
  for (const auto& [k, v] : groups) keys.insert(k);
  for (const auto& [k, v] : warned) keys.insert(k);
  for (const auto& key : keys) {
    AggregateRow row;
    row.sweep_value = key.first;
    row.method = names[key.second];
    auto it = groups.find(key);
    const auto& g = it == groups.end() ? std::vector<const TrialRecord*>{} : it->second;
    row.n = static_cast<int>(g.size());
    auto wit = warned.find(key);
    row.n_warned = wit == warned.end() ? 0 : wit->second;
    if (!g.empty()) {
      std::vector<double> a, b, c, d;
      for (auto* r : g) {
        a.push_back(r->min_sinr_db);
        b.push_back(static_cast<double>(r->triggered_count));
        c.push_back(r->total_tx_power_w);
        d.push_back(r->ee_bpjphz);
      }
      mean_se(a, row.mean_min_sinr_db, row.se_min_sinr_db);
      mean_se(b, row.mean_triggered, row.se_triggered);
      mean_se(c, row.mean_tx_power_w, row.se_tx_power_w);
      mean_se(d, row.mean_ee, row.se_ee);
    }
    rows.push_back(row);
  }
  return rows;
}

std::string format_aggregate(const std::vector<AggregateRow>& rows) {
  std::string out =
      "method,sweep_value,n,n_warned,min_sinr_db_mean,min_sinr_db_se,triggered_mean,"
      "triggered_se,tx_power_w_mean,tx_power_w_se,ee_mean,ee_se\n";
  for (const auto& r : rows) {
    out += r.method + ',' + fmt9(r.sweep_value) + ',' + std::to_string(r.n) + ',' +
           std::to_string(r.n_warned) + ',' + fmt9(r.mean_min_sinr_db) + ',' +
           fmt9(r.se_min_sinr_db) + ',' + fmt9(r.mean_triggered) + ',' + fmt9(r.se_triggered) +
           ',' + fmt9(r.mean_tx_power_w) + ',' + fmt9(r.se_tx_power_w) + ',' + fmt9(r.mean_ee) +
           ',' + fmt9(r.se_ee) + '\n';
  }
  return out;
}

}  // namespace irsrrm
