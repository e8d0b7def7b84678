#ifndef ACCESSFLOW_GEO_HPP
#define ACCESSFLOW_GEO_HPP

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace accessflow {

/// Latitude/longitude pair in degrees.
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

inline constexpr double kEarthRadiusMiles = 3958.7613;

/// Great-circle (haversine) distance in miles on a sphere of mean Earth radius.
double distance_miles(const GeoPoint& a, const GeoPoint& b);

enum class Program { medicaid = 0, other = 1 };
enum class Vehicle { yes = 0, no = 1 };
enum class SiteType { public_hospital = 0, community_clinic = 1, private_office = 2 };

const char* to_string(Program p);
const char* to_string(Vehicle v);
const char* to_string(SiteType t);
SiteType parse_site_type(const std::string& s);  // throws std::invalid_argument

/// Covariate names in tracts.csv column order.
inline const std::array<std::string, 7> kCovariateNames = {
    "income", "education", "unemployment", "nonwhite",
    "density", "dist_hospital", "diversity"};

struct Tract {
  std::string id;
  GeoPoint centroid;
  std::string county_id;
  std::string region_id;
  double pop_medicaid = 0.0;
  double pop_other = 0.0;
  std::map<std::string, double> covariates;

  double population(Program p) const {
    return p == Program::medicaid ? pop_medicaid : pop_other;
  }
};

struct County {
  std::string id;
  double acceptance_rate = 0.0;
};

struct Region {
  std::string id;
  double vehicle_rate_medicaid = 0.0;
  double vehicle_rate_other = 0.0;
};

struct PhysicianSite {
  std::string id;
  GeoPoint location;
  std::string county_id;
  SiteType site_type = SiteType::private_office;
  double capacity = 0.0;
};

/// Error raised while loading or validating a dataset.
class DataError : public std::runtime_error {
 public:
  enum class Kind { MalformedRow, DuplicateId, DanglingReference, InvalidCoordinate, InvalidValue };

  DataError(Kind kind, std::string where, const std::string& message)
      : std::runtime_error(message), kind_(kind), where_(std::move(where)) {}

  Kind kind() const { return kind_; }
  /// Offending id, or "file:line" for row-level errors.
  const std::string& where() const { return where_; }

 private:
  Kind kind_;
  std::string where_;
};

/// Validated, immutable collection of tracts, sites, counties and regions.
/// Indices into the vectors are the canonical handles used by all solvers.
class Dataset {
 public:
  Dataset() = default;
  /// Validates ids, foreign keys, coordinates and value ranges. Throws DataError.
  Dataset(std::vector<Tract> tracts, std::vector<PhysicianSite> sites,
          std::vector<County> counties, std::vector<Region> regions);

  const std::vector<Tract>& tracts() const { return tracts_; }
  const std::vector<PhysicianSite>& sites() const { return sites_; }
  const std::vector<County>& counties() const { return counties_; }
  const std::vector<Region>& regions() const { return regions_; }

  const Region& region_of(const Tract& t) const { return regions_[region_index_.at(t.region_id)]; }
  const County& county(const std::string& id) const { return counties_[county_index_.at(id)]; }
  std::size_t tract_index(const std::string& id) const { return tract_index_.at(id); }
  std::size_t site_index(const std::string& id) const { return site_index_.at(id); }

 private:
  std::vector<Tract> tracts_;
  std::vector<PhysicianSite> sites_;
  std::vector<County> counties_;
  std::vector<Region> regions_;
  std::unordered_map<std::string, std::size_t> tract_index_;
  std::unordered_map<std::string, std::size_t> site_index_;
  std::unordered_map<std::string, std::size_t> county_index_;
  std::unordered_map<std::string, std::size_t> region_index_;
};

Dataset load_dataset(std::istream& tracts, std::istream& physicians, std::istream& counties,
                     std::istream& regions);
/// Loads tracts.csv, physicians.csv, counties.csv and regions.csv from a directory.
Dataset load_dataset_dir(const std::string& dir);

void write_tracts_csv(std::ostream& out, const Dataset& data);
void write_physicians_csv(std::ostream& out, const Dataset& data);
void write_counties_csv(std::ostream& out, const Dataset& data);
void write_regions_csv(std::ostream& out, const Dataset& data);
void write_dataset_dir(const std::string& dir, const Dataset& data);

/// Base travel radii in miles. Defaults are 10 (with a car) and 25 (without).
struct TravelRadii {
  double vehicle = 10.0;
  double no_vehicle = 25.0;
};

/// One unit of demand: a (tract, program, vehicle) slice of a tract's population.
struct DemandGroup {
  std::size_t tract = 0;
  Program program = Program::medicaid;
  Vehicle vehicle = Vehicle::yes;
  double population = 0.0;
  double radius = 0.0;
};

/// Splits a tract into its four demand groups, ordered
/// (medicaid,yes), (medicaid,no), (other,yes), (other,no).
/// Only Medicaid radii are multiplied by `mobility_scale`.
std::array<DemandGroup, 4> split_demand(const Tract& tract, std::size_t tract_index,
                                        const Region& region, double mobility_scale,
                                        const TravelRadii& radii = {});

/// All demand groups of a dataset, four per tract in tract order.
std::vector<DemandGroup> build_demand(const Dataset& data, double mobility_scale,
                                      const TravelRadii& radii = {});

/// Feasible (group, site) pair with its travel distance.
struct Edge {
  std::size_t group = 0;
  std::size_t site = 0;
  double distance = 0.0;
};

/// Per-tract list of sites sorted by (distance, site id), truncated at a
/// maximum radius. Reusable across acceptance realizations.
class CatchmentIndex {
 public:
  struct Entry {
    std::size_t site;
    double distance;
  };

  CatchmentIndex(const Dataset& data, double max_radius);

  std::span<const Entry> near(std::size_t tract) const;
  double max_radius() const { return max_radius_; }

 private:
  double max_radius_;
  std::vector<std::size_t> offsets_;
  std::vector<Entry> entries_;
};

/// Edges (g, j, d) with d <= radius(g) and, for Medicaid groups, an accepting site.
/// Sorted by (group, distance, site id). `acceptance` is indexed by site.
std::vector<Edge> eligible_edges(std::span<const DemandGroup> groups, const Dataset& data,
                                 const std::vector<bool>& acceptance);
std::vector<Edge> eligible_edges(std::span<const DemandGroup> groups,
                                 const std::vector<bool>& acceptance,
                                 const CatchmentIndex& index);

}  // namespace accessflow

#endif  // ACCESSFLOW_GEO_HPP
