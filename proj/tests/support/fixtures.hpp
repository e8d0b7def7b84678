#ifndef ACCESSFLOW_TESTS_FIXTURES_HPP
#define ACCESSFLOW_TESTS_FIXTURES_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "accessflow/geo.hpp"

namespace fixtures {

inline accessflow::Tract tract(const std::string& id, double lat, double lon,
                               double pop_medicaid, double pop_other,
                               const std::string& county = "C1", const std::string& region = "R1") {
  accessflow::Tract t;
  t.id = id;
  t.centroid = {lat, lon};
  t.county_id = county;
  t.region_id = region;
  t.pop_medicaid = pop_medicaid;
  t.pop_other = pop_other;
  double v = 1.0;
  for (const auto& name : accessflow::kCovariateNames) t.covariates[name] = v++;
  return t;
}

inline accessflow::PhysicianSite site(const std::string& id, double lat, double lon,
                                      double capacity, const std::string& county = "C1",
                                      accessflow::SiteType type = accessflow::SiteType::private_office) {
  accessflow::PhysicianSite s;
  s.id = id;
  s.location = {lat, lon};
  s.county_id = county;
  s.site_type = type;
  s.capacity = capacity;
  return s;
}

/// Latitude offset of `miles` due north.
inline double north(double miles) { return miles / 69.09332; }

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("accessflow_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures

#endif  // ACCESSFLOW_TESTS_FIXTURES_HPP
