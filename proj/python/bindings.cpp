#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "irsrrm/admm.hpp"
#include "irsrrm/baselines.hpp"
#include "irsrrm/common.hpp"
#include "irsrrm/experiment.hpp"
#include "irsrrm/maxmin.hpp"
#include "irsrrm/model.hpp"
#include "irsrrm/rng.hpp"
#include "irsrrm/scenario.hpp"

namespace py = pybind11;
using namespace irsrrm;

namespace {

EffectiveChannels instance_channels(int K, int M, int L, uint64_t master_seed, uint64_t trial) {
  Scenario sc = Scenario::defaults(K, M, L);
  Geometry geo = sample_positions(sc, Rng::substream(master_seed, trial, "geometry").next_u64());
  ChannelSet ch = generate_channels(sc, geo, Rng::substream(master_seed, trial, "channels").next_u64());
  rvec p_max = Eigen::Map<const rvec>(sc.p_max.data(), sc.K);
  return make_effective_channels(ch, p_max, sc.sigma2);
}

py::dict solve_instance(int K, int M, int L, uint64_t master_seed, uint64_t trial,
                        double delta_frac, double eps) {
  Scenario sc = Scenario::defaults(K, M, L);
  EffectiveChannels eff = instance_channels(K, M, L, master_seed, trial);
  double delta = delta_frac * delta_upper_bound(M, K, sc.n_elements(), sc.p_max[0]);
  AdmmParams ap = AdmmParams::for_delta(delta);
  ap.eps_bisect = eps;
  SelectionResult sel = bisection_identify(eff, ap);
  MaxMinOptions mo;
  mo.eps = eps;
  MaxMinSolution sol =
      alternate(eff, sel.subset, Rng::substream(master_seed, trial, "phase2-init").next_u64(), mo);
  py::dict out;
  out["subset"] = sel.subset;
  out["delta"] = delta;
  out["gamma_phase1"] = sel.gamma_star;
  out["objective"] = sel.objective;
  out["block_norms"] = sel.block_norms;
  out["gamma"] = sol.gamma;
  out["p"] = sol.p;
  out["phi"] = sol.phi;
  out["min_sinr"] = sol.phi.size() ? sinr_all(sol.phi, sol.p, eff).minCoeff() : 0.0;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "IRS reflection resource management: group-sparse module selection "
            "and max-min SINR optimization";

  m.def("dbm_to_watts", &dbm_to_watts, py::arg("dbm"));
  m.def("watts_to_dbm", &watts_to_dbm, py::arg("watts"));
  m.def("delta_upper_bound", &delta_upper_bound, py::arg("M"), py::arg("K"), py::arg("N"),
        py::arg("p_max_max"),
        "Budget above which the module-size constraint is provably inactive.");

  m.def("effective_channel", &effective_channel, py::arg("g_k"), py::arg("h_j"));
  m.def(
      "sinr_all",
      [](const cvec& phi, const rvec& p, const std::vector<cvec>& hbar_flat, int K, double sigma2) {
        EffectiveChannels eff;
        eff.K = K;
        if (static_cast<int>(hbar_flat.size()) != K * K)
          throw std::invalid_argument("hbar_flat must have K*K entries (row-major j, k)");
        int n = static_cast<int>(hbar_flat[0].size());
        if (n % 1 != 0) throw std::invalid_argument("bad channel length");
        eff.M = 1;
        eff.L = n;
        eff.sigma2 = sigma2;
        eff.p_max = rvec::Constant(K, 1.0);
        eff.hb = hbar_flat;
        return sinr_all(phi, p, eff);
      },
      py::arg("phi"), py::arg("p"), py::arg("hbar_flat"), py::arg("K"), py::arg("sigma2"),
      "SINRs from effective channels given as a row-major [j][k] list.");

  m.def("update_w_block", &update_w_block, py::arg("Xi_m"), py::arg("alpha"), py::arg("c"),
        "Block soft-threshold of the group-sparse splitting.");
  m.def(
      "soc_project",
      [](double x0, const rvec& xrest, double a) { return soc_project(x0, xrest, a); },
      py::arg("x0"), py::arg("xrest"), py::arg("a"));
  m.def(
      "power_min_fixed_point",
      [](double gamma, const rmat& gains, double sigma2, const rvec& p_max) -> py::object {
        auto p = power_min_fixed_point(gamma, gains, sigma2, p_max);
        if (!p) return py::none();
        return py::cast(*p);
      },
      py::arg("gamma"), py::arg("gains"), py::arg("sigma2"), py::arg("p_max"),
      "Componentwise-minimal feasible power or None.");

  m.def("solve_instance", &solve_instance, py::arg("K"), py::arg("M"), py::arg("L"),
        py::arg("master_seed"), py::arg("trial"), py::arg("delta_frac") = 0.6,
        py::arg("eps") = 1e-4,
        "Full pipeline on one deterministic instance: selection, then max-min.");

  m.def(
      "run_experiment_csv",
      [](const std::string& config_path) {
        ExperimentConfig cfg = parse_config_file(config_path);
        return to_csv(run_experiment(cfg));
      },
      py::arg("config_path"), "Run a config file and return the CSV text.");

  m.attr("__version__") = "0.1.0";
}
