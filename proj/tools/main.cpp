// Command-line front end: Monte-Carlo sweeps to CSV, the module-budget bound,
// and an instance dump consumed by the offline reference solver.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "irsrrm/admm.hpp"
#include "irsrrm/common.hpp"
#include "irsrrm/experiment.hpp"
#include "irsrrm/rng.hpp"
#include "irsrrm/scenario.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

int cmd_simulate(const std::string& config_path, const std::string& out_path,
                 std::optional<int> workers, const std::string& trace_dir,
                 std::optional<uint64_t> seed) {
  irsrrm::ExperimentConfig cfg = irsrrm::parse_config_file(config_path);
  if (workers) cfg.workers = *workers;
  if (seed) cfg.master_seed = *seed;
  auto records = irsrrm::run_experiment(cfg, trace_dir);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "cannot open output file: " << out_path << "\n";
    return 1;
  }
  out << irsrrm::to_csv(records);
  out.close();
  std::cout << irsrrm::format_aggregate(irsrrm::aggregate(records));
  return 0;
}

int cmd_bound(int M, int K, int N, double pmax_dbm) {
  double bound = irsrrm::delta_upper_bound(M, K, N, irsrrm::dbm_to_watts(pmax_dbm));
  std::printf("%.6g\n", bound);
  return 0;
}

// Emits deterministic problem instances (effective channels and solver
// parameters) as JSON so an external conic solver can replay the selection
// bisection on identical data.
int cmd_dump_instances(const std::string& out_path, int count, int K, int M, int L,
                       uint64_t master_seed, double delta_frac) {
  using nlohmann::json;
  irsrrm::Scenario sc = irsrrm::Scenario::defaults(K, M, L);
  double delta = delta_frac * irsrrm::delta_upper_bound(M, K, sc.n_elements(), sc.p_max[0]);
  irsrrm::AdmmParams ap = irsrrm::AdmmParams::for_delta(delta);

  json root;
  root["K"] = K;
  root["M"] = M;
  root["L"] = L;
  root["sigma2"] = sc.sigma2;
  root["p_max"] = sc.p_max;
  root["delta"] = delta;
  root["alpha"] = ap.alpha;
  root["c"] = ap.c;
  root["eps_bisect"] = ap.eps_bisect;
  root["zero_threshold"] = ap.zero_threshold;
  root["master_seed"] = master_seed;
  json instances = json::array();
  for (int t = 0; t < count; ++t) {
    auto geo = irsrrm::sample_positions(
        sc, irsrrm::Rng::substream(master_seed, t, "geometry").next_u64());
    auto ch = irsrrm::generate_channels(
        sc, geo, irsrrm::Rng::substream(master_seed, t, "channels").next_u64());
    irsrrm::rvec p_max = Eigen::Map<const irsrrm::rvec>(sc.p_max.data(), sc.K);
    auto eff = irsrrm::make_effective_channels(ch, p_max, sc.sigma2);
    json inst;
    inst["trial"] = t;
    inst["gamma_hi"] = irsrrm::sinr_upper_bound(eff);
    json hbar_re = json::array(), hbar_im = json::array();
    for (int j = 0; j < K; ++j) {
      json row_re = json::array(), row_im = json::array();
      for (int k = 0; k < K; ++k) {
        json v_re = json::array(), v_im = json::array();
        const auto& v = eff.hbar(j, k);
        for (int n = 0; n < v.size(); ++n) {
          v_re.push_back(v(n).real());
          v_im.push_back(v(n).imag());
        }
        row_re.push_back(v_re);
        row_im.push_back(v_im);
      }
      hbar_re.push_back(row_re);
      hbar_im.push_back(row_im);
    }
    inst["hbar_re"] = hbar_re;
    inst["hbar_im"] = hbar_im;
    instances.push_back(inst);
  }
  root["instances"] = instances;
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "cannot open output file: " << out_path << "\n";
    return 1;
  }
  out << root.dump();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IRS reflection resource management simulator"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "Run a sweep from a config file and write CSV");
  std::string config_path, out_path, trace_dir;
  std::optional<int> workers;
  std::optional<uint64_t> seed;
  sim->add_option("--config", config_path, "Config file (key = value)")->required();
  sim->add_option("--out", out_path, "Output CSV path")->required();
  sim->add_option("--workers", workers, "Concurrent trial workers");
  sim->add_option("--trace-dir", trace_dir, "Directory for ADMM iteration traces");
  sim->add_option("--seed", seed, "Override master_seed");

  auto* bnd = app.add_subcommand("bound", "Print the module-budget bound above which all modules trigger");
  int bM = 0, bK = 0, bN = 0;
  double bp = 20.0;
  bnd->add_option("--M", bM, "Module count")->required();
  bnd->add_option("--K", bK, "Pair count")->required();
  bnd->add_option("--N", bN, "Total element count")->required();
  bnd->add_option("--pmax-dbm", bp, "Per-ST power cap in dBm")->required();

  auto* dump = app.add_subcommand("dump-instances", "Emit deterministic instances as JSON");
  std::string dump_out = "instances.json";
  int d_count = 50, dK = 4, dM = 5, dL = 4;
  uint64_t d_seed = 424242;
  double d_frac = 0.6;
  dump->add_option("--out", dump_out, "Output JSON path")->required();
  dump->add_option("--count", d_count, "Instance count");
  dump->add_option("--K", dK, "Pair count");
  dump->add_option("--M", dM, "Module count");
  dump->add_option("--L", dL, "Elements per module");
  dump->add_option("--seed", d_seed, "Master seed");
  dump->add_option("--delta-frac", d_frac, "delta as a fraction of the bound");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(config_path, out_path, workers, trace_dir, seed);
    if (bnd->parsed()) return cmd_bound(bM, bK, bN, bp);
    if (dump->parsed())
      return cmd_dump_instances(dump_out, d_count, dK, dM, dL, d_seed, d_frac);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
