#include "accessflow/geo.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <unordered_set>

#include "csv.hpp"

namespace accessflow {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

bool valid_point(const GeoPoint& p) {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 &&
         p.lon >= -180.0 && p.lon <= 180.0;
}

void expect_header(csv::Reader& r, const std::vector<std::string>& expected) {
  std::vector<std::string> fields;
  if (!r.next(fields)) {
    throw DataError(DataError::Kind::MalformedRow, r.where(), r.name + ": missing header row");
  }
  for (auto& f : fields) f = csv::trim(f);
  if (fields != expected) {
    throw DataError(DataError::Kind::MalformedRow, r.where(), r.name + ": unexpected header");
  }
}

double number(const csv::Reader& r, const std::string& field) {
  const auto v = csv::parse_double(field);
  if (!v) {
    throw DataError(DataError::Kind::MalformedRow, r.where(),
                    r.where() + ": not a number: '" + field + "'");
  }
  return *v;
}

void expect_width(const csv::Reader& r, const std::vector<std::string>& fields, std::size_t n) {
  if (fields.size() != n) {
    throw DataError(DataError::Kind::MalformedRow, r.where(),
                    r.where() + ": expected " + std::to_string(n) + " fields, got " +
                        std::to_string(fields.size()));
  }
}

}  // namespace

double distance_miles(const GeoPoint& a, const GeoPoint& b) {
  const double phi1 = a.lat * kDegToRad;
  const double phi2 = b.lat * kDegToRad;
  const double dphi = (b.lat - a.lat) * kDegToRad;
  const double dlambda = (b.lon - a.lon) * kDegToRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  return 2.0 * kEarthRadiusMiles * std::asin(std::min(1.0, std::sqrt(h)));
}

const char* to_string(Program p) { return p == Program::medicaid ? "medicaid" : "other"; }
const char* to_string(Vehicle v) { return v == Vehicle::yes ? "yes" : "no"; }

const char* to_string(SiteType t) {
  switch (t) {
    case SiteType::public_hospital: return "public_hospital";
    case SiteType::community_clinic: return "community_clinic";
    case SiteType::private_office: return "private_office";
  }
  return "private_office";
}

SiteType parse_site_type(const std::string& s) {
  if (s == "public_hospital") return SiteType::public_hospital;
  if (s == "community_clinic") return SiteType::community_clinic;
  if (s == "private_office") return SiteType::private_office;
  throw std::invalid_argument("unknown site_type '" + s + "'");
}

Dataset::Dataset(std::vector<Tract> tracts, std::vector<PhysicianSite> sites,
                 std::vector<County> counties, std::vector<Region> regions)
    : tracts_(std::move(tracts)),
      sites_(std::move(sites)),
      counties_(std::move(counties)),
      regions_(std::move(regions)) {
  using Kind = DataError::Kind;
  auto index_ids = [](const auto& items, auto& index) {
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (!index.emplace(items[i].id, i).second) {
        throw DataError(Kind::DuplicateId, items[i].id, "duplicate id '" + items[i].id + "'");
      }
    }
  };
  index_ids(counties_, county_index_);
  index_ids(regions_, region_index_);
  index_ids(tracts_, tract_index_);
  index_ids(sites_, site_index_);

  auto unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
  for (const auto& c : counties_) {
    if (!unit(c.acceptance_rate)) {
      throw DataError(Kind::InvalidValue, c.id, "county '" + c.id + "': acceptance_rate outside [0,1]");
    }
  }
  for (const auto& r : regions_) {
    if (!unit(r.vehicle_rate_medicaid) || !unit(r.vehicle_rate_other)) {
      throw DataError(Kind::InvalidValue, r.id, "region '" + r.id + "': vehicle rate outside [0,1]");
    }
  }
  for (const auto& t : tracts_) {
    if (!valid_point(t.centroid)) {
      throw DataError(Kind::InvalidCoordinate, t.id, "tract '" + t.id + "': invalid coordinate");
    }
    if (!county_index_.contains(t.county_id)) {
      throw DataError(Kind::DanglingReference, t.county_id,
                      "tract '" + t.id + "' references unknown county '" + t.county_id + "'");
    }
    if (!region_index_.contains(t.region_id)) {
      throw DataError(Kind::DanglingReference, t.region_id,
                      "tract '" + t.id + "' references unknown region '" + t.region_id + "'");
    }
    if (!std::isfinite(t.pop_medicaid) || !std::isfinite(t.pop_other) || t.pop_medicaid < 0.0 ||
        t.pop_other < 0.0) {
      throw DataError(Kind::InvalidValue, t.id, "tract '" + t.id + "': invalid population");
    }
  }
  for (const auto& s : sites_) {
    if (!valid_point(s.location)) {
      throw DataError(Kind::InvalidCoordinate, s.id, "site '" + s.id + "': invalid coordinate");
    }
    if (!county_index_.contains(s.county_id)) {
      throw DataError(Kind::DanglingReference, s.county_id,
                      "site '" + s.id + "' references unknown county '" + s.county_id + "'");
    }
    if (!std::isfinite(s.capacity) || s.capacity <= 0.0) {
      throw DataError(Kind::InvalidValue, s.id, "site '" + s.id + "': capacity must be > 0");
    }
  }
}

Dataset load_dataset(std::istream& tracts_in, std::istream& physicians_in, std::istream& counties_in,
                     std::istream& regions_in) {
  std::vector<std::string> f;

  std::vector<County> counties;
  csv::Reader cr{counties_in, "counties.csv"};
  expect_header(cr, {"id", "acceptance_rate"});
  while (cr.next(f)) {
    expect_width(cr, f, 2);
    counties.push_back({csv::trim(f[0]), number(cr, f[1])});
  }

  std::vector<Region> regions;
  csv::Reader rr{regions_in, "regions.csv"};
  expect_header(rr, {"id", "veh_rate_medicaid", "veh_rate_other"});
  while (rr.next(f)) {
    expect_width(rr, f, 3);
    regions.push_back({csv::trim(f[0]), number(rr, f[1]), number(rr, f[2])});
  }

  std::vector<Tract> tracts;
  csv::Reader tr{tracts_in, "tracts.csv"};
  std::vector<std::string> tract_header = {"id", "lat", "lon", "county_id", "region_id",
                                           "pop_medicaid", "pop_other"};
  tract_header.insert(tract_header.end(), kCovariateNames.begin(), kCovariateNames.end());
  expect_header(tr, tract_header);
  while (tr.next(f)) {
    expect_width(tr, f, tract_header.size());
    Tract t;
    t.id = csv::trim(f[0]);
    t.centroid = {number(tr, f[1]), number(tr, f[2])};
    t.county_id = csv::trim(f[3]);
    t.region_id = csv::trim(f[4]);
    t.pop_medicaid = number(tr, f[5]);
    t.pop_other = number(tr, f[6]);
    for (std::size_t c = 0; c < kCovariateNames.size(); ++c) {
      t.covariates[kCovariateNames[c]] = number(tr, f[7 + c]);
    }
    tracts.push_back(std::move(t));
  }

  std::vector<PhysicianSite> sites;
  csv::Reader pr{physicians_in, "physicians.csv"};
  expect_header(pr, {"id", "lat", "lon", "county_id", "site_type", "capacity"});
  while (pr.next(f)) {
    expect_width(pr, f, 6);
    PhysicianSite s;
    s.id = csv::trim(f[0]);
    s.location = {number(pr, f[1]), number(pr, f[2])};
    s.county_id = csv::trim(f[3]);
    try {
      s.site_type = parse_site_type(csv::trim(f[4]));
    } catch (const std::invalid_argument& e) {
      throw DataError(DataError::Kind::MalformedRow, pr.where(), pr.where() + ": " + e.what());
    }
    s.capacity = number(pr, f[5]);
    sites.push_back(std::move(s));
  }

  return Dataset(std::move(tracts), std::move(sites), std::move(counties), std::move(regions));
}

Dataset load_dataset_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  auto open = [&](const char* name) {
    std::ifstream in(fs::path(dir) / name, std::ios::binary);
    if (!in) {
      throw DataError(DataError::Kind::MalformedRow, name,
                      "cannot open " + (fs::path(dir) / name).string());
    }
    return in;
  };
  auto t = open("tracts.csv");
  auto p = open("physicians.csv");
  auto c = open("counties.csv");
  auto r = open("regions.csv");
  return load_dataset(t, p, c, r);
}

void write_tracts_csv(std::ostream& out, const Dataset& data) {
  out << "id,lat,lon,county_id,region_id,pop_medicaid,pop_other";
  for (const auto& name : kCovariateNames) out << ',' << name;
  out << '\n';
  for (const auto& t : data.tracts()) {
    out << t.id << ',' << csv::fmt(t.centroid.lat) << ',' << csv::fmt(t.centroid.lon) << ','
        << t.county_id << ',' << t.region_id << ',' << csv::fmt(t.pop_medicaid) << ','
        << csv::fmt(t.pop_other);
    for (const auto& name : kCovariateNames) {
      const auto it = t.covariates.find(name);
      out << ',' << csv::fmt(it == t.covariates.end() ? 0.0 : it->second);
    }
    out << '\n';
  }
}

void write_physicians_csv(std::ostream& out, const Dataset& data) {
  out << "id,lat,lon,county_id,site_type,capacity\n";
  for (const auto& s : data.sites()) {
    out << s.id << ',' << csv::fmt(s.location.lat) << ',' << csv::fmt(s.location.lon) << ','
        << s.county_id << ',' << to_string(s.site_type) << ',' << csv::fmt(s.capacity) << '\n';
  }
}

void write_counties_csv(std::ostream& out, const Dataset& data) {
  out << "id,acceptance_rate\n";
  for (const auto& c : data.counties()) out << c.id << ',' << csv::fmt(c.acceptance_rate) << '\n';
}

void write_regions_csv(std::ostream& out, const Dataset& data) {
  out << "id,veh_rate_medicaid,veh_rate_other\n";
  for (const auto& r : data.regions()) {
    out << r.id << ',' << csv::fmt(r.vehicle_rate_medicaid) << ','
        << csv::fmt(r.vehicle_rate_other) << '\n';
  }
}

void write_dataset_dir(const std::string& dir, const Dataset& data) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
    return out;
  };
  auto t = open("tracts.csv");
  write_tracts_csv(t, data);
  auto p = open("physicians.csv");
  write_physicians_csv(p, data);
  auto c = open("counties.csv");
  write_counties_csv(c, data);
  auto r = open("regions.csv");
  write_regions_csv(r, data);
}

std::array<DemandGroup, 4> split_demand(const Tract& tract, std::size_t tract_index,
                                        const Region& region, double mobility_scale,
                                        const TravelRadii& radii) {
  const double med_car = tract.pop_medicaid * region.vehicle_rate_medicaid;
  const double oth_car = tract.pop_other * region.vehicle_rate_other;
  return {{
      {tract_index, Program::medicaid, Vehicle::yes, med_car, radii.vehicle * mobility_scale},
      {tract_index, Program::medicaid, Vehicle::no, tract.pop_medicaid - med_car,
       radii.no_vehicle * mobility_scale},
      {tract_index, Program::other, Vehicle::yes, oth_car, radii.vehicle},
      {tract_index, Program::other, Vehicle::no, tract.pop_other - oth_car, radii.no_vehicle},
  }};
}

std::vector<DemandGroup> build_demand(const Dataset& data, double mobility_scale,
                                      const TravelRadii& radii) {
  std::vector<DemandGroup> groups;
  groups.reserve(4 * data.tracts().size());
  for (std::size_t i = 0; i < data.tracts().size(); ++i) {
    const auto& t = data.tracts()[i];
    const auto four = split_demand(t, i, data.region_of(t), mobility_scale, radii);
    groups.insert(groups.end(), four.begin(), four.end());
  }
  return groups;
}

CatchmentIndex::CatchmentIndex(const Dataset& data, double max_radius) : max_radius_(max_radius) {
  const auto& sites = data.sites();
  offsets_.reserve(data.tracts().size() + 1);
  offsets_.push_back(0);
  std::vector<Entry> row;
  for (const auto& t : data.tracts()) {
    row.clear();
    for (std::size_t j = 0; j < sites.size(); ++j) {
      const double d = distance_miles(t.centroid, sites[j].location);
      if (d <= max_radius) row.push_back({j, d});
    }
    std::sort(row.begin(), row.end(), [&](const Entry& a, const Entry& b) {
      if (a.distance != b.distance) return a.distance < b.distance;
      return sites[a.site].id < sites[b.site].id;
    });
    entries_.insert(entries_.end(), row.begin(), row.end());
    offsets_.push_back(entries_.size());
  }
}

std::span<const CatchmentIndex::Entry> CatchmentIndex::near(std::size_t tract) const {
  return {entries_.data() + offsets_[tract], offsets_[tract + 1] - offsets_[tract]};
}

std::vector<Edge> eligible_edges(std::span<const DemandGroup> groups,
                                 const std::vector<bool>& acceptance,
                                 const CatchmentIndex& index) {
  std::vector<Edge> edges;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& group = groups[g];
    if (group.radius > index.max_radius()) {
      throw std::invalid_argument("eligible_edges: catchment index radius too small");
    }
    const bool needs_acceptance = group.program == Program::medicaid;
    for (const auto& e : index.near(group.tract)) {
      if (e.distance > group.radius) break;
      if (needs_acceptance && !acceptance[e.site]) continue;
      edges.push_back({g, e.site, e.distance});
    }
  }
  return edges;
}

std::vector<Edge> eligible_edges(std::span<const DemandGroup> groups, const Dataset& data,
                                 const std::vector<bool>& acceptance) {
  double max_radius = 0.0;
  for (const auto& g : groups) max_radius = std::max(max_radius, g.radius);
  return eligible_edges(groups, acceptance, CatchmentIndex(data, max_radius));
}

}  // namespace accessflow
