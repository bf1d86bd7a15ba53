#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace risce {

using cd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

// Error taxonomy. Everything derives from a std exception so callers that do
// not care about the distinction can catch std::exception.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class RankDeficient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateChannel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Physical and algorithmic parameters of one simulated RIS uplink.
///
/// Power quantities are linear. `noise_var` is the per-entry variance of the
/// receiver noise; the transmit power `P` is relative to it.
struct SystemConfig {
  int M = 32;   // BS antennas
  int L = 32;   // RIS elements
  int K = 4;    // users
  int T = 4;    // pilot length
  int B = 16;   // sub-frames
  double P = 10.0;
  double noise_var = 1.0;
  int G_r = 128;  // cascaded-AoA grid size
  int G_t = 128;  // BS AoD grid size
  int N_f = 4;    // BS-RIS paths
  int N_h = 1;    // RIS-user paths per user
  double varsigma = 1e-9;
  double d = 0.1;
  std::uint64_t seed = 1;

  /// Throws InvalidArgument naming the first violated invariant.
  void validate() const;
};

}  // namespace risce
