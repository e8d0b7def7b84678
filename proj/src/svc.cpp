#include "accessflow/svc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>

#include "accessflow/config.hpp"
#include "accessflow/parallel.hpp"
#include "accessflow/rng.hpp"

namespace accessflow {

Design make_design(Eigen::VectorXd y, const Eigen::MatrixXd& raw_x, Eigen::MatrixX2d raw_coords,
                   std::vector<std::string> names, std::size_t dropped) {
  const Eigen::Index n = y.size();
  const Eigen::Index p = raw_x.cols();
  if (raw_x.rows() != n || raw_coords.rows() != n || static_cast<Eigen::Index>(names.size()) != p) {
    throw std::invalid_argument("make_design: dimension mismatch");
  }
  if (n < 10 * std::max<Eigen::Index>(p, 1) || n < 2) {
    throw TooFewRows("design has " + std::to_string(n) + " usable rows, needs at least " +
                     std::to_string(10 * std::max<Eigen::Index>(p, 1)));
  }
  Design d;
  d.y = std::move(y);
  d.names = std::move(names);
  d.dropped = dropped;
  d.means = raw_x.colwise().mean().transpose();
  d.stds.resize(p);
  d.x.resize(n, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const Eigen::VectorXd c = raw_x.col(j).array() - d.means(j);
    const double sd = std::sqrt(c.squaredNorm() / static_cast<double>(n - 1));
    const double scale = raw_x.col(j).cwiseAbs().maxCoeff();
    if (!(sd > 1e-12 * std::max(scale, 1e-300))) throw ConstantColumn(d.names[j]);
    d.stds(j) = sd;
    d.x.col(j) = c / sd;
  }
  for (int a = 0; a < 2; ++a) {
    const double lo = raw_coords.col(a).minCoeff();
    const double hi = raw_coords.col(a).maxCoeff();
    if (hi > lo) {
      raw_coords.col(a) = (raw_coords.col(a).array() - lo) / (hi - lo);
    } else {
      raw_coords.col(a).setConstant(0.5);
    }
  }
  d.coords = std::move(raw_coords);
  return d;
}

Design build_design(std::span<const AccessMeasures> measures, const std::vector<Tract>& tracts,
                    Measure measure, Program program, const std::vector<std::string>& covariates) {
  std::vector<std::string> names = covariates;
  if (names.empty()) names.assign(kCovariateNames.begin(), kCovariateNames.end());

  std::vector<std::size_t> rows;
  std::vector<double> ys;
  std::size_t dropped = 0;
  for (const auto& m : measures) {
    if (m.program != program) continue;
    if (m.tract >= tracts.size()) throw std::invalid_argument("build_design: tract out of range");
    const auto v = value_of(m, measure);
    if (!v) {
      ++dropped;
      continue;
    }
    rows.push_back(m.tract);
    ys.push_back(*v);
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(names.size());
  if (n < 10 * std::max<Eigen::Index>(p, 1)) {
    throw TooFewRows("design has " + std::to_string(n) + " usable rows, needs at least " +
                     std::to_string(10 * std::max<Eigen::Index>(p, 1)));
  }
  Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(ys.data(), n);
  Eigen::MatrixXd x(n, p);
  Eigen::MatrixX2d coords(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& t = tracts[rows[static_cast<std::size_t>(i)]];
    for (Eigen::Index j = 0; j < p; ++j) {
      const auto it = t.covariates.find(names[static_cast<std::size_t>(j)]);
      if (it == t.covariates.end()) {
        throw std::invalid_argument("tract " + t.id + " lacks covariate " +
                                    names[static_cast<std::size_t>(j)]);
      }
      x(i, j) = it->second;
    }
    coords(i, 0) = t.centroid.lon;
    coords(i, 1) = t.centroid.lat;
  }
  Design d = make_design(std::move(y), x, std::move(coords), std::move(names), dropped);
  d.tracts = std::move(rows);
  return d;
}

TermSpec SvcSpec::term(const std::string& name) const {
  if (const auto it = terms.find(name); it != terms.end()) return it->second;
  TermSpec t;
  if (name == "density" || name == "dist_hospital") t.mode = TermMode::varying;
  return t;
}

void SvcSpec::validate() const {
  if (basis_k < 4) throw ConfigError("svc.basis_k must be >= 4");
  if (!(tolerance > 0.0)) throw ConfigError("svc.tolerance must be > 0");
  if (max_iterations < 1) throw ConfigError("svc.max_iterations must be >= 1");
  if (bootstrap_B < 50) throw ConfigError("svc.bootstrap_B must be >= 50");
  for (const auto& [name, t] : terms) {
    if (!(t.lambda >= 0.0)) throw ConfigError("svc." + name + ".lambda must be >= 0");
  }
}

SvcSpec parse_svc_spec(std::istream& in) {
  SvcSpec spec;
  for (const auto& kv : parse_key_values(in)) {
    const std::string& k = kv.key;
    auto bad = [&](const std::string& why) {
      return ConfigError("line " + std::to_string(kv.line) + ": " + why);
    };
    if (k.rfind("svc.", 0) != 0) throw bad("unknown key '" + k + "'");
    const std::string rest = k.substr(4);
    if (rest == "basis_k") spec.basis_k = static_cast<int>(parse_integer(kv));
    else if (rest == "tolerance") spec.tolerance = parse_real(kv);
    else if (rest == "max_iterations") spec.max_iterations = static_cast<int>(parse_integer(kv));
    else if (rest == "bootstrap_B") spec.bootstrap_B = static_cast<int>(parse_integer(kv));
    else if (rest == "seed") {
      const auto v = parse_integer(kv);
      if (v < 0) throw bad("svc.seed must be >= 0");
      spec.seed = static_cast<std::uint64_t>(v);
    } else if (rest == "measure") {
      try {
        spec.measure = parse_measure(kv.value);
      } catch (const std::invalid_argument&) {
        throw bad("unknown measure '" + kv.value + "'");
      }
    } else if (rest == "program") {
      if (kv.value == "medicaid") spec.program = Program::medicaid;
      else if (kv.value == "other") spec.program = Program::other;
      else throw bad("program must be medicaid or other");
    } else {
      const auto dot = rest.rfind('.');
      const std::string cov = dot == std::string::npos ? "" : rest.substr(0, dot);
      const std::string field = dot == std::string::npos ? "" : rest.substr(dot + 1);
      if (std::find(kCovariateNames.begin(), kCovariateNames.end(), cov) == kCovariateNames.end()) {
        throw bad("unknown key '" + k + "'");
      }
      TermSpec t = spec.term(cov);
      if (field == "mode") {
        if (kv.value == "constant") t.mode = TermMode::constant;
        else if (kv.value == "varying") t.mode = TermMode::varying;
        else throw bad("mode must be constant or varying");
      } else if (field == "lambda") {
        t.lambda = parse_real(kv);
      } else {
        throw bad("unknown key '" + k + "'");
      }
      spec.terms[cov] = t;
    }
  }
  spec.validate();
  return spec;
}

SvcSpec load_svc_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open spec file " + path);
  return parse_svc_spec(in);
}

namespace {

// Eigenvectors of the penalty; eigenvalues below a relative cutoff count as
// exact zeros (the bilinear null space).
struct PenaltyEigen {
  Eigen::MatrixXd vectors;
  Eigen::VectorXd values;
};

PenaltyEigen penalty_eigen(const Eigen::MatrixXd& penalty) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(penalty);
  PenaltyEigen e{es.eigenvectors(), es.eigenvalues()};
  const double top = e.values.size() > 0 ? e.values.cwiseAbs().maxCoeff() : 0.0;
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    if (e.values(i) <= 1e-10 * top) e.values(i) = 0.0;
  }
  return e;
}

// Factorization of G + lambda P, reused across backfit sweeps. With lambda > 0
// the system is rotated into the penalty eigenbasis and scaled to unit
// diagonal before factoring, so a huge lambda only inflates well-separated
// diagonal entries instead of ruining the conditioning.
class PenalizedSystem {
 public:
  PenalizedSystem(const Eigen::MatrixXd& gram, double lambda, const PenaltyEigen& eig) {
    Eigen::MatrixXd a;
    if (lambda > 0.0) {
      rotation_ = eig.vectors;
      a = rotation_.transpose() * gram * rotation_;
      a.diagonal() += lambda * eig.values;
    } else {
      a = gram;
    }
    scale_ = a.diagonal().unaryExpr([](double v) { return v > 0.0 ? 1.0 / std::sqrt(v) : 1.0; });
    const Eigen::MatrixXd scaled = scale_.asDiagonal() * a * scale_.asDiagonal();
    ldlt_.compute(scaled);
    const Eigen::VectorXd d = ldlt_.vectorD().cwiseAbs();
    const double dmax = d.size() > 0 ? d.maxCoeff() : 0.0;
    const double threshold = dmax * 1e-12 * static_cast<double>(std::max<Eigen::Index>(a.rows(), 1));
    const bool singular = ldlt_.info() != Eigen::Success || !(dmax > 0.0) ||
                          (d.array() <= threshold).any();
    if (singular) {
      if (lambda == 0.0) throw SingularSystem("normal equations are singular and lambda = 0");
      // Minimum-norm solution; the rotation is orthogonal so norms carry over.
      cod_ = std::make_unique<Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>>(a);
      cod_->setThreshold(1e-12);
    }
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd r = rotation_.size() > 0 ? Eigen::VectorXd(rotation_.transpose() * rhs) : rhs;
    Eigen::VectorXd x;
    if (cod_) {
      x = cod_->solve(r);
    } else {
      x = scale_.asDiagonal() * ldlt_.solve(Eigen::VectorXd(scale_.asDiagonal() * r));
    }
    return rotation_.size() > 0 ? Eigen::VectorXd(rotation_ * x) : x;
  }

 private:
  Eigen::MatrixXd rotation_;  // empty when lambda = 0
  Eigen::VectorXd scale_;
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
  std::unique_ptr<Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>> cod_;
};

// x-weighted Gram of the basis rows: sum_i w_i^2 B_i B_i'.
Eigen::MatrixXd weighted_gram(const TensorBasis& basis, const std::vector<std::size_t>& rows,
                              const Eigen::Ref<const Eigen::VectorXd>& w) {
  const int m = basis.cols();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m, m);
  constexpr int nz = TensorBasis::kRowNonzeros;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& idx = basis.index[rows[i]];
    const auto& val = basis.value[rows[i]];
    const double w2 = w(static_cast<Eigen::Index>(i)) * w(static_cast<Eigen::Index>(i));
    for (int a = 0; a < nz; ++a) {
      const double va = w2 * val[a];
      for (int b = 0; b < nz; ++b) g(idx[a], idx[b]) += va * val[b];
    }
  }
  return g;
}

Eigen::VectorXd weighted_rhs(const TensorBasis& basis, const std::vector<std::size_t>& rows,
                             const Eigen::Ref<const Eigen::VectorXd>& w,
                             const Eigen::Ref<const Eigen::VectorXd>& r) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(basis.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double s = w(ii) * r(ii);
    const auto& idx = basis.index[rows[i]];
    const auto& val = basis.value[rows[i]];
    for (int a = 0; a < TensorBasis::kRowNonzeros; ++a) out(idx[a]) += s * val[a];
  }
  return out;
}

Eigen::VectorXd eval_rows(const TensorBasis& basis, const std::vector<std::size_t>& rows,
                          const Eigen::VectorXd& theta) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& idx = basis.index[rows[i]];
    const auto& val = basis.value[rows[i]];
    double s = 0.0;
    for (int a = 0; a < TensorBasis::kRowNonzeros; ++a) s += val[a] * theta(idx[a]);
    out(static_cast<Eigen::Index>(i)) = s;
  }
  return out;
}

// Backfit on the given response and covariates; row i uses basis row rows[i].
SvcFit fit_rows(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, const TensorBasis& basis,
                const PenaltyEigen& eig, const std::vector<std::size_t>& rows,
                const std::vector<TermSpec>& terms, const SvcSpec& spec) {
  const Eigen::Index n = y.size();
  const Eigen::Index p = x.cols();
  SvcFit fit;
  fit.modes.resize(static_cast<std::size_t>(p));
  fit.theta.resize(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) fit.modes[static_cast<std::size_t>(j)] = terms[static_cast<std::size_t>(j)].mode;

  // Ordinary least squares start with every term constant.
  Eigen::MatrixXd a(n, p + 1);
  a.col(0).setOnes();
  a.rightCols(p) = x;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-12);
  if (qr.rank() < p + 1) throw SingularSystem("covariates are collinear");
  const Eigen::VectorXd coef = qr.solve(y);
  fit.intercept = coef(0);
  fit.beta.resize(n, p);
  for (Eigen::Index j = 0; j < p; ++j) fit.beta.col(j).setConstant(coef(j + 1));

  std::vector<std::unique_ptr<PenalizedSystem>> systems(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto& t = terms[static_cast<std::size_t>(j)];
    if (t.mode != TermMode::varying) continue;
    systems[static_cast<std::size_t>(j)] = std::make_unique<PenalizedSystem>(
        weighted_gram(basis, rows, x.col(j)), t.lambda, eig);
    fit.theta[static_cast<std::size_t>(j)] = Eigen::VectorXd::Constant(basis.cols(), coef(j + 1));
  }

  Eigen::VectorXd eta = (fit.beta.array() * x.array()).rowwise().sum();
  auto rss_now = [&] { return (y.array() - fit.intercept - eta.array()).square().sum(); };
  fit.rss_history.push_back(rss_now());

  const double nd = static_cast<double>(n);
  for (int it = 1; it <= spec.max_iterations; ++it) {
    const Eigen::MatrixXd prev_beta = fit.beta;
    const double prev_intercept = fit.intercept;
    for (Eigen::Index j = 0; j < p; ++j) {
      const auto jj = static_cast<std::size_t>(j);
      const Eigen::VectorXd own = fit.beta.col(j).cwiseProduct(x.col(j));
      const Eigen::VectorXd r = y.array() - fit.intercept - (eta - own).array();
      if (fit.modes[jj] == TermMode::constant) {
        const double b = x.col(j).dot(r) / x.col(j).squaredNorm();
        fit.beta.col(j).setConstant(b);
      } else {
        fit.theta[jj] = systems[jj]->solve(weighted_rhs(basis, rows, x.col(j), r));
        fit.beta.col(j) = eval_rows(basis, rows, fit.theta[jj]);
      }
      eta += fit.beta.col(j).cwiseProduct(x.col(j)) - own;
    }
    fit.intercept = (y - eta).sum() / nd;
    // Fresh sum so rounding in the running update never accumulates.
    eta = (fit.beta.array() * x.array()).rowwise().sum();
    fit.rss_history.push_back(rss_now());
    fit.n_iterations = it;

    double change = std::abs(fit.intercept - prev_intercept);
    if (n > 0 && p > 0) change = std::max(change, (fit.beta - prev_beta).cwiseAbs().maxCoeff());
    if (change < spec.tolerance) {
      fit.converged = true;
      break;
    }
  }

  fit.slopes = fit.beta.colwise().mean().transpose();
  fit.fitted = fit.intercept + eta.array();
  fit.rss = fit.rss_history.back();
  return fit;
}

std::vector<TermSpec> resolve_terms(const Design& design, const SvcSpec& spec) {
  std::vector<TermSpec> terms;
  for (const auto& name : design.names) terms.push_back(spec.term(name));
  return terms;
}

std::vector<std::size_t> identity_rows(Eigen::Index n) {
  std::vector<std::size_t> rows(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return rows;
}

double percentile(std::vector<double>& v, double q) {
  std::sort(v.begin(), v.end());
  if (v.size() == 1) return v.front();
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

Eigen::VectorXd penalized_solve_gram(const Eigen::Ref<const Eigen::MatrixXd>& gram,
                                     const Eigen::Ref<const Eigen::VectorXd>& zty, double lambda,
                                     const Eigen::Ref<const Eigen::MatrixXd>& penalty) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  if (gram.rows() != gram.cols() || gram.rows() != zty.size() ||
      penalty.rows() != gram.rows() || penalty.cols() != gram.cols()) {
    throw std::invalid_argument("penalized_solve: dimension mismatch");
  }
  PenalizedSystem sys(gram, lambda, penalty_eigen(penalty));
  return sys.solve(zty);
}

Eigen::VectorXd penalized_solve(const Eigen::Ref<const Eigen::MatrixXd>& z,
                                const Eigen::Ref<const Eigen::VectorXd>& y, double lambda,
                                const Eigen::Ref<const Eigen::MatrixXd>& penalty) {
  if (z.rows() != y.size()) throw std::invalid_argument("penalized_solve: dimension mismatch");
  const Eigen::MatrixXd gram = z.transpose() * z;
  const Eigen::VectorXd zty = z.transpose() * y;
  return penalized_solve_gram(gram, zty, lambda, penalty);
}

SvcFit backfit(const Design& design, const SvcSpec& spec, const TensorBasis& basis) {
  if (static_cast<Eigen::Index>(basis.rows()) != design.y.size()) {
    throw std::invalid_argument("backfit: basis rows do not match the design");
  }
  return fit_rows(design.y, design.x, basis, penalty_eigen(basis.penalty),
                  identity_rows(design.y.size()),
                  resolve_terms(design, spec), spec);
}

SvcFit backfit(const Design& design, const SvcSpec& spec) {
  return backfit(design, spec, build_basis(design.coords, spec.basis_k));
}

Bands bootstrap_ci(const Design& design, const SvcSpec& spec, int B, std::uint64_t seed,
                   int threads) {
  if (B < 50) throw std::invalid_argument("bootstrap needs B >= 50");
  const TensorBasis basis = build_basis(design.coords, spec.basis_k);
  const auto terms = resolve_terms(design, spec);
  const PenaltyEigen eig = penalty_eigen(basis.penalty);
  const Eigen::Index n = design.y.size();
  const Eigen::Index p = design.x.cols();

  // Each attempt draws from its own stream, so which attempts succeed does
  // not depend on scheduling.
  auto attempt = [&](std::size_t a, Eigen::MatrixXd& out) {
    Rng rng(derive_seed(seed, a));
    std::vector<std::size_t> rows(static_cast<std::size_t>(n));
    Eigen::VectorXd yb(n);
    Eigen::MatrixXd xb(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto r = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n)));
      rows[static_cast<std::size_t>(i)] = r;
      yb(i) = design.y(static_cast<Eigen::Index>(r));
      xb.row(i) = design.x.row(static_cast<Eigen::Index>(r));
    }
    const SvcFit fit = fit_rows(yb, xb, basis, eig, rows, terms, spec);
    out.resize(n, p);
    for (Eigen::Index j = 0; j < p; ++j) {
      if (terms[static_cast<std::size_t>(j)].mode == TermMode::varying) {
        out.col(j) = basis.evaluate(fit.theta[static_cast<std::size_t>(j)]);
      } else {
        out.col(j).setConstant(fit.slopes(j));
      }
    }
  };

  std::vector<Eigen::MatrixXd> draws;
  std::size_t next = 0;
  const auto max_attempts = static_cast<std::size_t>(2 * B);
  while (draws.size() < static_cast<std::size_t>(B) && next < max_attempts) {
    const std::size_t batch =
        std::min(static_cast<std::size_t>(B) - draws.size(), max_attempts - next);
    std::vector<Eigen::MatrixXd> out(batch);
    std::vector<char> ok(batch, 0);
    parallel_for(batch, threads, [&](std::size_t i) {
      try {
        attempt(next + i, out[i]);
        ok[i] = 1;
      } catch (const SvcError&) {
      }
    });
    for (std::size_t i = 0; i < batch; ++i) {
      if (ok[i]) draws.push_back(std::move(out[i]));
    }
    next += batch;
  }
  if (draws.size() < static_cast<std::size_t>(B)) {
    throw BootstrapFailed("only " + std::to_string(draws.size()) + " of " + std::to_string(B) +
                          " bootstrap replicates succeeded in " + std::to_string(next) +
                          " attempts");
  }

  Bands bands;
  bands.replicates = B;
  bands.attempts = static_cast<int>(next);
  bands.lo.resize(n, p);
  bands.hi.resize(n, p);
  std::vector<double> v(draws.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      for (std::size_t b = 0; b < draws.size(); ++b) v[b] = draws[b](i, j);
      bands.lo(i, j) = percentile(v, 0.025);
      bands.hi(i, j) = percentile(v, 0.975);
    }
  }
  return bands;
}

double gcv_score(const Design& design, const SvcSpec& spec) {
  const TensorBasis basis = build_basis(design.coords, spec.basis_k);
  const auto terms = resolve_terms(design, spec);
  const auto rows = identity_rows(design.y.size());
  const PenaltyEigen eig = penalty_eigen(basis.penalty);
  const SvcFit fit = fit_rows(design.y, design.x, basis, eig, rows, terms, spec);
  double edf = 1.0;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    if (terms[j].mode == TermMode::constant) {
      edf += 1.0;
      continue;
    }
    const Eigen::MatrixXd g = weighted_gram(basis, rows, design.x.col(static_cast<Eigen::Index>(j)));
    const PenalizedSystem sys(g, terms[j].lambda, eig);
    double trace = 0.0;
    for (Eigen::Index c = 0; c < g.cols(); ++c) trace += sys.solve(g.col(c))(c);
    edf += trace;
  }
  const double n = static_cast<double>(design.y.size());
  const double denom = n - edf;
  if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
  return n * fit.rss / (denom * denom);
}

double select_lambda_gcv(const Design& design, const SvcSpec& spec,
                         const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("lambda grid is empty");
  double best = grid.front();
  double best_score = std::numeric_limits<double>::infinity();
  for (double lambda : grid) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
    SvcSpec s = spec;
    for (const auto& name : design.names) {
      TermSpec t = s.term(name);
      if (t.mode == TermMode::varying) t.lambda = lambda;
      s.terms[name] = t;
    }
    double score = std::numeric_limits<double>::infinity();
    try {
      score = gcv_score(design, s);
    } catch (const SingularSystem&) {
    }
    if (score < best_score) {
      best_score = score;
      best = lambda;
    }
  }
  return best;
}

}  // namespace accessflow
