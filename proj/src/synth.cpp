#include "accessflow/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "accessflow/config.hpp"
#include "accessflow/rng.hpp"

namespace accessflow {

namespace {

constexpr double kLatMin = 30.36, kLatMax = 35.0;
constexpr double kLonMin = -85.6, kLonMax = -80.84;

struct Core {
  GeoPoint at;
  double weight;
};

// Atlanta, Augusta, Savannah, Columbus, Macon.
const Core kCores[] = {{{33.75, -84.39}, 1.0},
                       {{33.47, -81.97}, 0.35},
                       {{32.08, -81.09}, 0.35},
                       {{32.46, -84.99}, 0.30},
                       {{32.84, -83.63}, 0.30}};

std::string make_id(char prefix, int i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%0*d", prefix, width, i);
  return buf;
}

// Sum of a few random plane waves over the box, roughly in [-1, 1].
struct SmoothField {
  struct Wave {
    double kx, ky, phase, amp;
  };
  std::vector<Wave> waves;

  explicit SmoothField(Rng& rng) {
    for (int m = 0; m < 3; ++m) {
      const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double freq = rng.uniform(0.5, 2.0) * 2.0 * std::numbers::pi;
      waves.push_back({freq * std::cos(angle), freq * std::sin(angle),
                       rng.uniform(0.0, 2.0 * std::numbers::pi), 1.0 / (m + 1.5)});
    }
  }
  double operator()(const GeoPoint& p) const {
    const double x = (p.lon - kLonMin) / (kLonMax - kLonMin);
    const double y = (p.lat - kLatMin) / (kLatMax - kLatMin);
    double s = 0.0;
    for (const auto& w : waves) s += w.amp * std::sin(w.kx * x + w.ky * y + w.phase);
    return s;
  }
};

}  // namespace

void SynthParams::validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument("invalid synth params: " + m); };
  if (n_counties < 1) fail("n_counties must be positive");
  if (n_tracts < n_counties) fail("n_tracts must be >= n_counties");
  if (n_physicians < 0) fail("n_physicians must be >= 0");
  if (n_urban_cores < 1) fail("n_urban_cores must be positive");
  if (n_regions < 1 || n_regions > n_counties) fail("n_regions must lie in [1, n_counties]");
  if (!(density_decay > 0.0)) fail("density_decay must be > 0");
  if (!(core_peak >= 0.0)) fail("core_peak must be >= 0");
  if (!(gamma >= 1.0)) fail("gamma must be >= 1");
  if (!(medicaid_share_base >= 0.0 && medicaid_share_base <= 1.0)) fail("medicaid_share_base must lie in [0,1]");
  if (!std::isfinite(medicaid_share_gradient)) fail("medicaid_share_gradient must be finite");
  if (!(acceptance_mean >= 0.0 && acceptance_mean <= 1.0)) fail("acceptance_mean must lie in [0,1]");
  if (!(acceptance_spread >= 0.0)) fail("acceptance_spread must be >= 0");
  if (!(tract_population > 0.0)) fail("tract_population must be > 0");
  if (!(capacity_mean > 0.0)) fail("capacity_mean must be > 0");
}

SynthParams parse_synth_params(std::istream& in) {
  SynthParams p;
  for (const auto& kv : parse_key_values(in)) {
    const auto& k = kv.key;
    if (k == "n_counties") p.n_counties = static_cast<int>(parse_integer(kv));
    else if (k == "n_tracts") p.n_tracts = static_cast<int>(parse_integer(kv));
    else if (k == "n_physicians") p.n_physicians = static_cast<int>(parse_integer(kv));
    else if (k == "n_urban_cores") p.n_urban_cores = static_cast<int>(parse_integer(kv));
    else if (k == "n_regions") p.n_regions = static_cast<int>(parse_integer(kv));
    else if (k == "density_decay") p.density_decay = parse_real(kv);
    else if (k == "core_peak") p.core_peak = parse_real(kv);
    else if (k == "gamma") p.gamma = parse_real(kv);
    else if (k == "medicaid_share_base") p.medicaid_share_base = parse_real(kv);
    else if (k == "medicaid_share_gradient") p.medicaid_share_gradient = parse_real(kv);
    else if (k == "acceptance_mean") p.acceptance_mean = parse_real(kv);
    else if (k == "acceptance_spread") p.acceptance_spread = parse_real(kv);
    else if (k == "tract_population") p.tract_population = parse_real(kv);
    else if (k == "capacity_mean") p.capacity_mean = parse_real(kv);
    else if (k == "seed") {
      const auto v = parse_integer(kv);
      if (v < 0) throw ConfigError("line " + std::to_string(kv.line) + ": seed must be >= 0");
      p.seed = static_cast<std::uint64_t>(v);
    } else {
      throw ConfigError("line " + std::to_string(kv.line) + ": unknown key '" + k + "'");
    }
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return p;
}

SynthParams load_synth_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open params file " + path);
  return parse_synth_params(in);
}

Dataset generate(const SynthParams& params) {
  params.validate();
  Rng rng(params.seed);

  // County grid, row 0 in the south; only the first n_counties cells are used.
  const double width_mi = (kLonMax - kLonMin) * 57.5;
  const double height_mi = (kLatMax - kLatMin) * 69.0;
  const int cols = std::max(
      1, static_cast<int>(std::ceil(std::sqrt(params.n_counties * width_mi / height_mi))));
  const int rows = (params.n_counties + cols - 1) / cols;
  const double cw = (kLonMax - kLonMin) / cols;
  const double ch = (kLatMax - kLatMin) / rows;
  auto cell_of = [&](const GeoPoint& p) {
    const int c = std::clamp(static_cast<int>((p.lon - kLonMin) / cw), 0, cols - 1);
    const int r = std::clamp(static_cast<int>((p.lat - kLatMin) / ch), 0, rows - 1);
    return r * cols + c;
  };

  // Regions: contiguous chunks of counties in boustrophedon order.
  std::vector<int> region_of_county(params.n_counties);
  {
    int k = 0;
    for (int r = 0; r < rows; ++r) {
      for (int i = 0; i < cols; ++i) {
        const int c = r % 2 == 0 ? i : cols - 1 - i;
        const int idx = r * cols + c;
        if (idx >= params.n_counties) continue;
        region_of_county[idx] = static_cast<int>(
            static_cast<long long>(k) * params.n_regions / params.n_counties);
        ++k;
      }
    }
  }

  std::vector<Core> cores;
  for (int i = 0; i < params.n_urban_cores; ++i) {
    if (i < static_cast<int>(std::size(kCores))) {
      cores.push_back(kCores[i]);
    } else {
      cores.push_back({{rng.uniform(kLatMin, kLatMax), rng.uniform(kLonMin, kLonMax)},
                       rng.uniform(0.1, 0.3)});
    }
  }
  auto density = [&](const GeoPoint& p) {
    double d = 1.0;
    for (const auto& c : cores) {
      d += params.core_peak * c.weight * std::exp(-distance_miles(p, c.at) / params.density_decay);
    }
    return d;
  };
  auto core_distance = [&](const GeoPoint& p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : cores) best = std::min(best, distance_miles(p, c.at));
    return best;
  };
  double max_density = 1.0;
  for (const auto& c : cores) max_density = std::max(max_density, density(c.at));

  // Tract centroids: one per county, the rest drawn in proportion to density.
  std::vector<GeoPoint> points;
  std::vector<int> point_county;
  for (int c = 0; c < params.n_counties; ++c) {
    const int r = c / cols, q = c % cols;
    const GeoPoint p{kLatMin + (r + 0.5 + rng.uniform(-0.3, 0.3)) * ch,
                     kLonMin + (q + 0.5 + rng.uniform(-0.3, 0.3)) * cw};
    points.push_back(p);
    point_county.push_back(c);
  }
  while (static_cast<int>(points.size()) < params.n_tracts) {
    const GeoPoint p{rng.uniform(kLatMin, kLatMin + rows * ch),
                     rng.uniform(kLonMin, kLonMin + cols * cw)};
    const int c = cell_of(p);
    const double u = rng.uniform();
    if (c >= params.n_counties) continue;
    if (u * max_density > density(p)) continue;
    points.push_back(p);
    point_county.push_back(c);
  }

  std::vector<County> counties;
  for (int c = 0; c < params.n_counties; ++c) {
    const double rate = std::clamp(params.acceptance_mean + params.acceptance_spread * rng.normal(),
                                   0.0, 1.0);
    counties.push_back({make_id('C', c + 1, 3), rate});
  }
  std::vector<Region> regions;
  for (int g = 0; g < params.n_regions; ++g) {
    const double other = rng.uniform(0.88, 0.97);
    const double medicaid = std::max(0.0, other - rng.uniform(0.10, 0.25));
    regions.push_back({make_id('R', g + 1, 2), medicaid, other});
  }

  std::vector<SmoothField> fields;
  for (int f = 0; f < 6; ++f) fields.emplace_back(rng);

  const double log_max = std::log(max_density);
  std::vector<Tract> tracts;
  std::vector<double> tract_density;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const GeoPoint& p = points[i];
    const double dens = density(p) * std::exp(0.2 * rng.normal());
    const double rel = std::clamp(std::log(std::max(dens, 1.0)) / log_max, 0.0, 1.0);
    const double total = params.tract_population * rng.uniform(0.6, 1.4);
    const double share = std::clamp(
        params.medicaid_share_base + params.medicaid_share_gradient * (1.0 - rel) +
            0.05 * rng.normal(),
        0.05, 0.9);

    Tract t;
    t.id = make_id('T', static_cast<int>(i) + 1, 4);
    t.centroid = p;
    t.county_id = counties[point_county[i]].id;
    t.region_id = regions[region_of_county[point_county[i]]].id;
    t.pop_medicaid = std::round(total * share);
    t.pop_other = std::round(total) - t.pop_medicaid;
    t.covariates["income"] = 38000.0 + 22000.0 * rel + 7000.0 * fields[0](p) + 3000.0 * rng.normal();
    t.covariates["education"] =
        std::clamp(0.15 + 0.25 * rel + 0.06 * fields[1](p) + 0.03 * rng.normal(), 0.0, 1.0);
    t.covariates["unemployment"] =
        std::clamp(0.09 - 0.03 * rel + 0.02 * fields[2](p) + 0.01 * rng.normal(), 0.0, 1.0);
    t.covariates["nonwhite"] =
        std::clamp(0.30 + 0.20 * rel + 0.12 * fields[3](p) + 0.05 * rng.normal(), 0.0, 1.0);
    t.covariates["density"] = 40.0 * dens;
    t.covariates["dist_hospital"] =
        std::max(0.5, 0.35 * core_distance(p) + 6.0 * std::abs(fields[4](p)) + rng.uniform(0.0, 2.0));
    t.covariates["diversity"] =
        std::clamp(0.45 + 0.15 * rel + 0.12 * fields[5](p) + 0.04 * rng.normal(), 0.0, 1.0);
    tracts.push_back(std::move(t));
    tract_density.push_back(dens);
  }

  // Physicians: a tract is picked with weight (density / max)^gamma.
  std::vector<double> cum(tracts.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < tracts.size(); ++i) {
    acc += std::pow(tract_density[i] / max_density, params.gamma);
    cum[i] = acc;
  }
  std::vector<PhysicianSite> sites;
  for (int j = 0; j < params.n_physicians; ++j) {
    const double u = rng.uniform() * acc;
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    const std::size_t t = std::min(static_cast<std::size_t>(it - cum.begin()), tracts.size() - 1);
    PhysicianSite s;
    s.id = make_id('P', j + 1, 4);
    s.location = {std::clamp(tracts[t].centroid.lat + rng.uniform(-0.01, 0.01), -90.0, 90.0),
                  tracts[t].centroid.lon + rng.uniform(-0.01, 0.01)};
    s.county_id = tracts[t].county_id;
    const double kind = rng.uniform();
    s.site_type = kind < 0.05   ? SiteType::public_hospital
                  : kind < 0.20 ? SiteType::community_clinic
                                : SiteType::private_office;
    s.capacity = std::round(params.capacity_mean * rng.uniform(0.6, 1.4));
    sites.push_back(std::move(s));
  }

  return Dataset(std::move(tracts), std::move(sites), std::move(counties), std::move(regions));
}

SynthParams georgia_preset() {
  SynthParams p;
  p.seed = 20140;
  return p;
}

}  // namespace accessflow
