#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "confheat/geometry.hpp"
#include "confheat/rng.hpp"

/// Windowed configurations, Poisson sampling and the independent heat-flow
/// sampler for the kernel measures P_{t,γ}.
namespace confheat::points {

/// Intensity of the Poisson tail assumed beyond the window, for analytic bounds.
struct TailModel {
  double intensity = 1.0;
  friend bool operator==(const TailModel&, const TailModel&) = default;
};

/// Centered ball B(0, radius) carrying a Poisson intensity z·Lebesgue.
struct Window {
  double radius = 1.0;
  double intensity = 1.0;
  void validate() const;
  double volume(int dim) const;
};

/// Finite weighted point set in R^d: the restriction of a configuration to
/// B(0, R). Multiplicities > 1 model multiple configurations.
class Configuration {
 public:
  Configuration() = default;
  Configuration(int dim, double window_radius);

  int dim() const { return sites_.dim(); }
  double window_radius() const { return window_radius_; }
  /// Throws InputError if a stored site would leave the window.
  void set_window_radius(double radius);

  /// Number of distinct sites.
  std::size_t size() const { return sites_.size(); }
  /// Number of particles counted with multiplicity.
  std::size_t particle_count() const;
  bool empty() const { return sites_.empty(); }
  bool is_simple() const;

  std::span<const double> position(std::size_t i) const { return sites_[i]; }
  std::uint32_t multiplicity(std::size_t i) const { return multiplicity_[i]; }
  const PointSet& sites() const { return sites_; }
  const std::vector<std::uint32_t>& multiplicities() const { return multiplicity_; }

  /// Appends a site. Throws InputError for non-finite coordinates, zero
  /// multiplicity, or a position outside the window.
  void add(std::span<const double> position, std::uint32_t multiplicity = 1);
  void add(std::initializer_list<double> position, std::uint32_t multiplicity = 1);

  /// Particles with multiplicity unfolded, in site order.
  PointSet particles() const;

  std::optional<TailModel> tail_model;

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  PointSet sites_;
  std::vector<std::uint32_t> multiplicity_;
  double window_radius_ = 0.0;
};

/// Builds a configuration from unfolded particles with window max(radius, max |x|),
/// or 1 if that is zero.
Configuration from_particles(const PointSet& particles, double window_radius);

/// Poisson(z·vol B(0,R)) many i.i.d. uniform points on the ball.
Configuration sample_poisson(const Window& window, int dim, RandomStream& rng);
Configuration sample_poisson(const Window& window, int dim, std::uint64_t seed, std::uint32_t replica);

/// Default window enlargement for diffuse: 6 sqrt(2t) sqrt(d) + 1.
double default_pad(int dim, double t);

/// Moves every particle (multiplicity m = m independent particles) by an
/// independent heat-kernel transition. Particle k of replica r draws from the
/// substream (seed, r, k). The output window is R + pad, widened further if a
/// particle lands beyond it.
Configuration diffuse(const Configuration& gamma, double t, std::uint64_t seed, std::uint32_t replica,
                      std::optional<double> pad = std::nullopt);

/// Upper bound for E_{π_z}[Σ_{|x|>R} exp(-|x|/n)] from the unit-shell series
/// z Σ_{k>⌈R⌉} e^{-(k-1)/n} c_d k^d.
double truncation_tail_bound(double radius, int n, int dim, double intensity);

/// Lexicographically sorted sites with coincident positions merged.
Configuration as_multiset(const Configuration& gamma);

nlohmann::ordered_json to_json(const Configuration& gamma);
Configuration configuration_from_json(const nlohmann::json& j);
std::string serialize(const Configuration& gamma);
Configuration deserialize(const std::string& text);

}  // namespace confheat::points
