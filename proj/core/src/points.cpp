#include "confheat/points.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "confheat/error.hpp"
#include "confheat/kernel.hpp"
#include "confheat/special.hpp"

namespace confheat::points {

void Window::validate() const {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InputError("window: radius must be positive");
  if (!(intensity > 0.0) || !std::isfinite(intensity)) throw InputError("window: intensity must be positive");
}

double Window::volume(int dim) const { return special::unit_ball_volume(dim) * std::pow(radius, dim); }

Configuration::Configuration(int dim, double window_radius) : sites_(dim), window_radius_(window_radius) {
  if (dim < 1) throw InputError("configuration: dimension must be >= 1");
  if (!(window_radius > 0.0) || !std::isfinite(window_radius)) {
    throw InputError("configuration: window radius must be positive");
  }
}

void Configuration::set_window_radius(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InputError("configuration: window radius must be positive");
  for (std::size_t i = 0; i < size(); ++i) {
    if (norm(position(i)) > radius) throw InputError("configuration: site outside the new window");
  }
  window_radius_ = radius;
}

std::size_t Configuration::particle_count() const {
  return std::accumulate(multiplicity_.begin(), multiplicity_.end(), std::size_t{0});
}

bool Configuration::is_simple() const {
  if (std::ranges::any_of(multiplicity_, [](std::uint32_t m) { return m != 1; })) return false;
  return sites_.all_distinct();
}

void Configuration::add(std::span<const double> position, std::uint32_t multiplicity) {
  require_finite_point(position, dim(), "configuration");
  if (multiplicity == 0) throw InputError("configuration: multiplicity must be >= 1");
  if (norm(position) > window_radius_) throw InputError("configuration: position outside the window");
  sites_.push_back(position);
  multiplicity_.push_back(multiplicity);
}

void Configuration::add(std::initializer_list<double> position, std::uint32_t multiplicity) {
  add(std::span<const double>(position.begin(), position.size()), multiplicity);
}

PointSet Configuration::particles() const {
  PointSet out(dim());
  out.reserve(particle_count());
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::uint32_t m = 0; m < multiplicity_[i]; ++m) out.push_back(position(i));
  }
  return out;
}

Configuration from_particles(const PointSet& particles, double window_radius) {
  double radius = window_radius;
  for (std::size_t i = 0; i < particles.size(); ++i) radius = std::max(radius, norm(particles[i]));
  if (!(radius > 0.0)) radius = 1.0;
  Configuration out(particles.dim(), radius);
  for (std::size_t i = 0; i < particles.size(); ++i) out.add(particles[i]);
  return out;
}

Configuration sample_poisson(const Window& window, int dim, RandomStream& rng) {
  window.validate();
  if (dim < 1) throw InputError("sample_poisson: dimension must be >= 1");
  Configuration out(dim, window.radius);
  const std::uint64_t count = rng.poisson(window.intensity * window.volume(dim));
  std::vector<double> x(static_cast<std::size_t>(dim));
  for (std::uint64_t i = 0; i < count; ++i) {
    // Isotropic direction times R U^{1/d}.
    double len2 = 0.0;
    do {
      len2 = 0.0;
      for (double& v : x) {
        v = rng.normal();
        len2 += v * v;
      }
    } while (len2 == 0.0);
    const double radius = window.radius * std::pow(rng.uniform(), 1.0 / dim);
    const double scale = radius / std::sqrt(len2);
    for (double& v : x) v *= scale;
    // Round-off can push |x| a hair past R.
    if (norm(x) > window.radius) {
      const double shrink = window.radius / norm(x);
      for (double& v : x) v *= shrink;
    }
    out.add(x);
  }
  return out;
}

Configuration sample_poisson(const Window& window, int dim, std::uint64_t seed, std::uint32_t replica) {
  RandomStream rng(seed, replica, 0, StreamTag::kPoisson);
  return sample_poisson(window, dim, rng);
}

double default_pad(int dim, double t) { return 6.0 * std::sqrt(2.0 * t) * std::sqrt(static_cast<double>(dim)) + 1.0; }

Configuration diffuse(const Configuration& gamma, double t, std::uint64_t seed, std::uint32_t replica,
                      std::optional<double> pad) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InputError("diffuse: t must be positive");
  const int dim = gamma.dim();
  const double enlarge = pad.value_or(default_pad(dim, t));
  if (!(enlarge >= 0.0)) throw InputError("diffuse: pad must be nonnegative");
  const kernel::HeatKernelParams params{dim, t};
  PointSet moved(dim);
  moved.reserve(gamma.particle_count());
  std::vector<double> y(static_cast<std::size_t>(dim));
  std::uint32_t particle = 0;
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    for (std::uint32_t m = 0; m < gamma.multiplicity(i); ++m, ++particle) {
      RandomStream rng(seed, replica, particle, StreamTag::kDiffuse);
      kernel::sample_transition(params, gamma.position(i), rng, y);
      moved.push_back(y);
    }
  }
  Configuration out = from_particles(moved, gamma.window_radius() + enlarge);
  out.tail_model = gamma.tail_model;
  return out;
}

double truncation_tail_bound(double radius, int n, int dim, double intensity) {
  if (!(radius > 0.0)) throw InputError("truncation_tail_bound: radius must be positive");
  if (n < 1 || dim < 1) throw InputError("truncation_tail_bound: n and dim must be >= 1");
  if (!(intensity >= 0.0)) throw InputError("truncation_tail_bound: intensity must be nonnegative");
  const double c_d = special::unit_ball_volume(dim);
  const double start = std::ceil(radius) + 1.0;
  double sum = 0.0;
  // Terms decay like k^d e^{-k/n}; stop once past the peak and negligible.
  for (double k = start;; k += 1.0) {
    const double term = std::exp(-(k - 1.0) / n + dim * std::log(k));
    sum += term;
    if (k > dim * n && term < 1e-17 * sum) break;
    if (k > start + 1e7) throw NumericalError("truncation_tail_bound: series did not converge");
  }
  return intensity * c_d * sum;
}

Configuration as_multiset(const Configuration& gamma) {
  std::vector<std::size_t> order(gamma.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return lex_less(gamma.position(a), gamma.position(b));
  });
  Configuration out(gamma.dim(), gamma.window_radius());
  out.tail_model = gamma.tail_model;
  std::size_t i = 0;
  while (i < order.size()) {
    std::uint32_t mult = gamma.multiplicity(order[i]);
    std::size_t j = i + 1;
    while (j < order.size() && std::ranges::equal(gamma.position(order[j]), gamma.position(order[i]))) {
      mult += gamma.multiplicity(order[j]);
      ++j;
    }
    out.add(gamma.position(order[i]), mult);
    i = j;
  }
  return out;
}

nlohmann::ordered_json to_json(const Configuration& gamma) {
  nlohmann::ordered_json j;
  j["dim"] = gamma.dim();
  j["window_radius"] = gamma.window_radius();
  auto points = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    auto pos = gamma.position(i);
    points.push_back({std::vector<double>(pos.begin(), pos.end()), gamma.multiplicity(i)});
  }
  j["points"] = std::move(points);
  if (gamma.tail_model) j["tail_model"] = {{"intensity", gamma.tail_model->intensity}};
  return j;
}

Configuration configuration_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("configuration JSON: expected an object");
  for (const auto& [key, value] : j.items()) {
    if (key != "dim" && key != "window_radius" && key != "points" && key != "tail_model") {
      throw InputError("configuration JSON: unknown key '" + key + "'");
    }
  }
  try {
    Configuration out(j.at("dim").get<int>(), j.at("window_radius").get<double>());
    for (const auto& entry : j.at("points")) {
      if (!entry.is_array() || entry.size() != 2) {
        throw InputError("configuration JSON: each point must be [[coords...], multiplicity]");
      }
      const auto coords = entry[0].get<std::vector<double>>();
      out.add(coords, entry[1].get<std::uint32_t>());
    }
    if (j.contains("tail_model")) out.tail_model = TailModel{j["tail_model"].at("intensity").get<double>()};
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("configuration JSON: ") + e.what());
  }
}

std::string serialize(const Configuration& gamma) { return to_json(gamma).dump(); }

Configuration deserialize(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("configuration JSON: ") + e.what());
  }
  return configuration_from_json(j);
}

}  // namespace confheat::points
