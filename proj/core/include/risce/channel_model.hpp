#pragma once

#include <vector>

#include "risce/random.hpp"
#include "risce/types.hpp"

namespace risce {

inline constexpr double kPi = 3.14159265358979323846;

/// One BS->RIS propagation path. Angles are physical, in [0, 2*pi); the array
/// response uses their sine (half-wavelength spacing).
struct BsRisPath {
  cd gain;
  double aoa = 0.0;  // arrival at the RIS
  double aod = 0.0;  // departure from the BS
};

/// One RIS->user path.
struct RisUserPath {
  cd gain;
  double aod = 0.0;  // departure from the RIS towards the user
};

/// Ground truth for one channel draw.
struct ChannelRealization {
  CMat F;                    // L x M, BS -> RIS
  std::vector<CVec> h;       // K vectors of length L, RIS -> user
  std::vector<CMat> G;       // K cascaded channels diag(h_k^H) F, each L x M
  std::vector<BsRisPath> bs_ris_paths;
  std::vector<std::vector<RisUserPath>> ris_user_paths;

  int users() const { return static_cast<int>(G.size()); }
};

struct AngularDictionary {
  CMat A_R;  // L x G_r
  CMat A_T;  // M x G_t
  RVec grid_r;
  RVec grid_t;
};

/// Diagonal of the scaling matrix that maps the reference user's cascaded
/// channel onto user k's: G_k = diag(alpha) G_1.
struct ScalingMatrix {
  CVec diag;
  CMat dense() const { return diag.asDiagonal(); }
};

/// Maps x into [-1, 1) using the 2-periodicity of the array response.
double wrap_spatial_frequency(double x);

/// Spatial frequency of a physical angle for half-wavelength spacing.
inline double spatial_frequency(double angle) { return std::sin(angle); }

/// Physical angle in [0, 2*pi) whose sine is `freq` (freq in [-1, 1]).
double angle_for_frequency(double freq);

/// Uniform linear array response; entry n is exp(-i*pi*phi*n)/sqrt(X).
CVec steering_vector(int X, double phi);

/// Builds F, h_k and G_k from explicit path lists.
ChannelRealization synthesize_channels(const SystemConfig& cfg, std::vector<BsRisPath> bs_ris,
                                       std::vector<std::vector<RisUserPath>> ris_user);

/// Draws gains from CN(0,1) and angles uniformly on [0, 2*pi).
ChannelRealization sample_channels(const SystemConfig& cfg, Rng& rng);

/// Spatial frequency of the cascaded RIS-side steering vector for BS-RIS path
/// p and RIS-user path q of user k, wrapped into [-1, 1).
double cascaded_frequency(const ChannelRealization& chan, int k, int p, int q);

/// Relative residual of the best representation A_R X A_T^H of G (minimum
/// norm least squares). Test helper.
double cascaded_vad_residual(const CMat& G, const AngularDictionary& dict);

ScalingMatrix scaling_matrix(const CVec& h_k, const CVec& h_1);

/// Uniform grid {-1 + 2j/G} for j = 0..G-1.
RVec uniform_grid(int G);

AngularDictionary build_dictionary(const SystemConfig& cfg);

/// Steering matrix whose columns are steering_vector(X, grid[j]).
CMat steering_matrix(int X, const RVec& grid);

}  // namespace risce
