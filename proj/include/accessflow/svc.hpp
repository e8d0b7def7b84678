#ifndef ACCESSFLOW_SVC_HPP
#define ACCESSFLOW_SVC_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "accessflow/geo.hpp"
#include "accessflow/metrics.hpp"
#include "accessflow/spline.hpp"

namespace accessflow {

class SvcError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConstantColumn : public SvcError {
 public:
  explicit ConstantColumn(const std::string& name)
      : SvcError("covariate '" + name + "' is constant"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class TooFewRows : public SvcError {
 public:
  using SvcError::SvcError;
};

class SingularSystem : public SvcError {
 public:
  using SvcError::SvcError;
};

class BootstrapFailed : public SvcError {
 public:
  using SvcError::SvcError;
};

/// Regression design: response over tracts, z-scored covariates (sample std,
/// n - 1), and centroids min-max scaled to [0, 1] per axis.
struct Design {
  Eigen::VectorXd y;
  Eigen::MatrixXd x;
  Eigen::MatrixX2d coords;
  std::vector<std::string> names;
  Eigen::VectorXd means;
  Eigen::VectorXd stds;
  std::vector<std::size_t> tracts;  // dataset tract index per row
  std::size_t dropped = 0;          // rows with a MISSING response
};

/// Standardizes raw rows. Throws ConstantColumn or TooFewRows (< 10 p rows).
Design make_design(Eigen::VectorXd y, const Eigen::MatrixXd& raw_x, Eigen::MatrixX2d raw_coords,
                   std::vector<std::string> names, std::size_t dropped = 0);

/// Design for one measure and program over the given covariates
/// (default: all tract covariates). `measures` are per tract-program.
Design build_design(std::span<const AccessMeasures> measures, const std::vector<Tract>& tracts,
                    Measure measure, Program program,
                    const std::vector<std::string>& covariates = {});

enum class TermMode { constant, varying };

struct TermSpec {
  TermMode mode = TermMode::constant;
  double lambda = 1.0;
};

struct SvcSpec {
  std::map<std::string, TermSpec> terms;  // missing names use defaults
  int basis_k = 6;
  double tolerance = 1e-6;
  int max_iterations = 100;

  // Inputs for the command-line driver.
  Measure measure = Measure::travel_cost;
  Program program = Program::medicaid;
  int bootstrap_B = 200;
  std::uint64_t seed = 1;

  /// density and dist_hospital vary in space by default; the rest are constant.
  TermSpec term(const std::string& name) const;
  void validate() const;
};

/// Keys: svc.<covariate>.mode (constant|varying), svc.<covariate>.lambda,
/// svc.basis_k, svc.tolerance, svc.max_iterations, svc.measure, svc.program,
/// svc.bootstrap_B, svc.seed. Unknown keys throw ConfigError.
SvcSpec parse_svc_spec(std::istream& in);
SvcSpec load_svc_spec(const std::string& path);

struct SvcFit {
  double intercept = 0.0;
  std::vector<TermMode> modes;
  Eigen::VectorXd slopes;        // scalar part per covariate
  Eigen::MatrixXd beta;          // rows x p: slope + centred field at each row
  std::vector<Eigen::VectorXd> theta;  // spline coefficients (empty for constant terms)
  Eigen::VectorXd fitted;
  bool converged = false;
  int n_iterations = 0;
  double rss = 0.0;
  std::vector<double> rss_history;  // after initialization, then after each sweep
};

/// Minimizes |y - Z theta|^2 + lambda theta' P theta through a pivoted LDLT
/// of Z'Z + lambda P. A singular system gives the minimum-norm minimizer when
/// lambda > 0 and throws SingularSystem when lambda = 0.
Eigen::VectorXd penalized_solve(const Eigen::Ref<const Eigen::MatrixXd>& z,
                                const Eigen::Ref<const Eigen::VectorXd>& y, double lambda,
                                const Eigen::Ref<const Eigen::MatrixXd>& penalty);

/// Same problem from the Gram matrix G = Z'Z and b = Z'y.
Eigen::VectorXd penalized_solve_gram(const Eigen::Ref<const Eigen::MatrixXd>& gram,
                                     const Eigen::Ref<const Eigen::VectorXd>& zty, double lambda,
                                     const Eigen::Ref<const Eigen::MatrixXd>& penalty);

/// Backfitting of y = a + sum_j beta_j(s) x_j. Constant terms are scalars;
/// varying terms are tensor splines in the coordinates, split into a scalar
/// slope and a field with mean zero over the rows.
SvcFit backfit(const Design& design, const SvcSpec& spec);
/// Same, reusing a basis built on design.coords.
SvcFit backfit(const Design& design, const SvcSpec& spec, const TensorBasis& basis);

struct Bands {
  Eigen::MatrixXd lo;  // rows x p
  Eigen::MatrixXd hi;
  int replicates = 0;
  int attempts = 0;
};

/// Percentile (2.5, 97.5) bootstrap bands of beta_j(s) at the design rows.
/// Rows are resampled with replacement; replicate a uses stream
/// derive_seed(seed, a). Failed replicates are redrawn up to 2B attempts.
Bands bootstrap_ci(const Design& design, const SvcSpec& spec, int B, std::uint64_t seed,
                   int threads = 1);

/// GCV score n RSS / (n - edf)^2, edf = 1 + constant terms + the traces of
/// the varying smoothers at convergence.
double gcv_score(const Design& design, const SvcSpec& spec);
/// Lambda from `grid` (applied to all varying terms) with the lowest GCV score.
double select_lambda_gcv(const Design& design, const SvcSpec& spec,
                         const std::vector<double>& grid);

}  // namespace accessflow

#endif  // ACCESSFLOW_SVC_HPP
