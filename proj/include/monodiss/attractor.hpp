#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "monodiss/evolution.hpp"

namespace monodiss {

struct AbsorbingOptions {
  double T = 10.0;
  int samples = 100;  ///< uniform sample count on (0, T]
  /// Fixed radii to test instead of fitting them from the tail.
  std::optional<double> radius_l2;
  std::optional<double> radius_h1;
  int workers = 0;
};

struct AbsorbingReport {
  double R_l2 = 0.0;  ///< in units of ||u||
  double R_h1 = 0.0;  ///< in units of ||grad u||
  std::vector<double> entry_l2;  ///< first sample time after which ||u|| <= R_l2
  std::vector<double> entry_h1;
  std::vector<double> initial_l2;
  std::vector<bool> re_exit;  ///< true if a trajectory left the ball after entering
};

/// Fitted radii are 1.1 times the largest norm over t in [T/2, T]. With
/// fixed radii, a trajectory still outside at T is a Refusal. Ensembles need
/// at least 3 initial magnitudes (a factor 2 apart in L^2).
AbsorbingReport absorbing_radius(const EvolutionConfig& config, const std::vector<SpectralField>& initial,
                                 const AbsorbingOptions& options = {});

struct AttractorCloud {
  std::vector<SpectralField> snapshots;
  std::vector<double> times;
  std::vector<int> source;  ///< ensemble member of each snapshot
  double burn_in = 0.0;
  double spacing = 0.0;
  std::vector<std::size_t> projection;  ///< coefficient indices, leading energy first
  std::optional<double> ball_radius;
  bool outside_ball = false;
  nlohmann::json ensemble = nlohmann::json::object();
};

struct CloudOptions {
  double burn_in = 1.0;
  int snapshots_per_trajectory = 25;
  double spacing = 0.1;  ///< decorrelation time, 1/alpha_fit by convention
  int projection_size = 8;
  std::optional<double> ball_radius;  ///< L^2 radius for the inside-ball flag
  int workers = 0;
};

AttractorCloud sample_cloud(const EvolutionConfig& config, const std::vector<SpectralField>& initial,
                            const CloudOptions& options);

/// Coefficient indices sorted by mean squared value over the snapshots.
std::vector<std::size_t> leading_projection(const std::vector<SpectralField>& snapshots, int count);

struct BoxCount {
  double dimension = 0.0;
  double r_squared = 0.0;
  std::vector<double> eps;
  std::vector<double> counts;
  bool truncated = false;  ///< finest scales dropped because boxes ran out of points
};

/// Slope of log N(eps) against log(1/eps) on the projected coordinates.
BoxCount box_counting_dimension(const std::vector<std::vector<double>>& points, const std::vector<double>& eps);
BoxCount box_counting_dimension(const AttractorCloud& cloud, const std::vector<double>& eps);

struct AttractionRate {
  double alpha = 0.0;
  double Q = 0.0;
  double floor = 0.0;
  std::vector<double> times;
  std::vector<double> distances;  ///< max over probes of dist(u(t), cloud)
  int fitted_points = 0;
};

struct AttractionOptions {
  double T = 3.0;
  int samples = 60;
  /// Fit only once the distance has fallen below this fraction of its start,
  /// so that the asymptotic linear regime dominates.
  double start_fraction = 1e-2;
  int workers = 0;
};

/// Fits dist(u(t), cloud) <= Q e^{-alpha t} over samples between the start
/// fraction and 1e3 times the cloud floor (largest nearest-neighbour
/// distance among snapshots). Refuses when fewer than 3 samples qualify or
/// the distances do not decrease.
AttractionRate attraction_rate(const EvolutionConfig& config, const AttractorCloud& cloud,
                               const std::vector<SpectralField>& probes, const AttractionOptions& options = {});

/// Deterministic k-means (farthest-point initialisation from the snapshot
/// of largest norm); returns the centroids.
std::vector<SpectralField> cluster_centroids(const std::vector<SpectralField>& snapshots, int k,
                                             int max_iter = 100);

void to_json(nlohmann::json& j, const AbsorbingReport& r);
void to_json(nlohmann::json& j, const BoxCount& b);
void to_json(nlohmann::json& j, const AttractionRate& a);
/// Metadata header plus serialized snapshots.
nlohmann::json cloud_json(const AttractorCloud& cloud);
std::string box_count_csv(const BoxCount& b);

}  // namespace monodiss
