#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "irsrrm/common.hpp"

namespace irsrrm {

/// Full description of one simulation campaign. Parsed from a flat
/// `key = value` config file; unknown keys are a hard error.
struct ExperimentConfig {
  int K = 4;
  int M = 5;
  int L = 4;
  double p_max_dbm = 20.0;
  double sigma2_dbm = -90.0;

  std::string sweep;                 ///< "", "delta", "K", "M", "L", "p_max_dbm", "csi_xi"
  std::vector<double> sweep_values;  ///< empty: single run at the base point

  std::vector<std::string> methods{"admm"};  ///< of {admm, mes, mrs, no_irs, af}
  int trials = 50;
  uint64_t master_seed = 1;

  double c = 1.0;
  std::optional<double> delta;  ///< default: 0.6 * Lemma bound of the scenario
  double tol_primal = 1e-4;
  double eps_bisect = 1e-4;
  double tol_feas = 1e-7;
  int max_inner_iter = 4000;
  int max_feas_iter = 20000;
  int max_outer_iter = 50;
  std::string mu_mode = "dual-ascent";  ///< or "paper-literal"
  double zero_threshold = 1e-3;

  std::optional<double> csi_xi;  ///< channel-estimate reliability in [0, 1]
  double sigma_v2_dbm = -90.0;   ///< AF relay receive noise
  double bandwidth_mhz = 10.0;   ///< recorded only; rates stay per Hz
  bool record_runtime = false;   ///< keep the CSV byte-reproducible by default
  int workers = 1;

  void validate() const;
};

ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

/// One (method, sweep value, trial) outcome.
struct TrialRecord {
  int trial = 0;
  std::string method;
  double sweep_value = 0.0;
  double min_sinr_db = 0.0;
  rvec per_user_sinr;
  int triggered_count = 0;
  uint64_t subset_mask = 0;
  double total_tx_power_w = 0.0;
  double sum_rate_bph = 0.0;
  double ee_bpjphz = 0.0;
  int phase1_iters = 0;
  int outer_iters = 0;
  double runtime_ms = 0.0;
  std::string warnings;
};

/// Runs every requested (method, value, trial) cell; deterministic for a
/// given master_seed regardless of worker count or execution order.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg,
                                        const std::string& trace_dir = "");

/// CSV with the TrialRecord fields in declared order, floats at 9
/// significant digits, subsets as hex bitmasks.
std::string to_csv(const std::vector<TrialRecord>& records);

struct AggregateRow {
  std::string method;
  double sweep_value = 0.0;
  int n = 0;
  int n_warned = 0;
  double mean_min_sinr_db = 0.0, se_min_sinr_db = 0.0;
  double mean_triggered = 0.0, se_triggered = 0.0;
  double mean_tx_power_w = 0.0, se_tx_power_w = 0.0;
  double mean_ee = 0.0, se_ee = 0.0;
};

/// Mean/standard-error summary per (method, sweep value); rows with warnings
/// are excluded from the statistics and counted separately.
std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& records);

std::string format_aggregate(const std::vector<AggregateRow>& rows);

}  // namespace irsrrm
