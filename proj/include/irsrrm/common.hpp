#pragma once

#include <Eigen/Dense>
#include <complex>

namespace irsrrm {

using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;
using rvec = Eigen::VectorXd;
using rmat = Eigen::MatrixXd;
using cd = std::complex<double>;

/// dBm -> watts, 10^((dBm - 30) / 10). All internal math is in watts.
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

/// watts -> dBm.
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

/// Linear power ratio -> dB.
inline double to_db(double x) { return 10.0 * std::log10(x); }

}  // namespace irsrrm
