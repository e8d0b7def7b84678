#include "accessflow/network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace accessflow {

NetworkSimplex::NetworkSimplex(int node_count) : node_count_(node_count) {
  if (node_count < 0) throw std::invalid_argument("NetworkSimplex: negative node count");
}

int NetworkSimplex::add_arc(int tail, int head, double upper, double cost) {
  if (initialized_) throw std::logic_error("NetworkSimplex: add_arc after run()");
  if (tail < 0 || tail >= node_count_ || head < 0 || head >= node_count_) {
    throw std::out_of_range("NetworkSimplex: arc endpoint out of range");
  }
  if (!(upper >= 0.0) || !std::isfinite(upper) || !std::isfinite(cost)) {
    throw std::invalid_argument("NetworkSimplex: arc bounds/cost must be finite, upper >= 0");
  }
  source_.push_back(tail);
  target_.push_back(head);
  lower_.push_back(0.0);
  upper_.push_back(upper);
  cost_.push_back(cost);
  flow_.push_back(0.0);
  state_.push_back(kStateLower);
  return arc_count_++;
}

void NetworkSimplex::set_cost(int arc, double cost) {
  cost_.at(arc) = cost;
}

void NetworkSimplex::set_bounds(int arc, double lower, double upper) {
  const double f = flow_.at(arc);
  if (lower > f || upper < f) {
    throw std::invalid_argument("NetworkSimplex::set_bounds: bounds must contain current flow");
  }
  lower_[arc] = lower;
  upper_[arc] = upper;
  if (state_[arc] != kStateTree) state_[arc] = (f == upper && upper > lower) ? kStateUpper : kStateLower;
}

double NetworkSimplex::total_cost() const {
  double c = 0.0;
  for (int e = 0; e < arc_count_; ++e) c += cost_[e] * flow_[e];
  return c;
}

// Artificial root with one zero-capacity arc per node; zero flow is feasible
// because every node has zero supply.
void NetworkSimplex::init_tree() {
  const int n = node_count_;
  const int all = arc_count_ + n;
  source_.resize(all);
  target_.resize(all);
  lower_.resize(all, 0.0);
  upper_.resize(all, 0.0);
  cost_.resize(all, 0.0);
  flow_.resize(all, 0.0);
  state_.resize(all, kStateTree);

  root_ = n;
  parent_.assign(n + 1, -1);
  pred_.assign(n + 1, -1);
  thread_.assign(n + 1, 0);
  rev_thread_.assign(n + 1, 0);
  succ_num_.assign(n + 1, 1);
  last_succ_.assign(n + 1, 0);
  pred_dir_.assign(n + 1, kDirUp);
  pi_.assign(n + 1, 0.0);

  parent_[root_] = -1;
  pred_[root_] = -1;
  thread_[root_] = n > 0 ? 0 : root_;
  rev_thread_[n > 0 ? 0 : root_] = root_;
  succ_num_[root_] = n + 1;
  last_succ_[root_] = n > 0 ? n - 1 : root_;
  for (int u = 0; u < n; ++u) {
    const int e = arc_count_ + u;
    source_[e] = u;
    target_[e] = root_;
    state_[e] = kStateTree;
    parent_[u] = root_;
    pred_[u] = e;
    pred_dir_[u] = kDirUp;
    thread_[u] = u + 1 < n ? u + 1 : root_;
    if (u + 1 < n) rev_thread_[u + 1] = u;
    succ_num_[u] = 1;
    last_succ_[u] = u;
  }
  if (n > 0) rev_thread_[root_] = n - 1;

  block_size_ = std::max(10, static_cast<int>(std::sqrt(static_cast<double>(all))));
  next_arc_ = 0;
  initialized_ = true;
}

void NetworkSimplex::recompute_potentials() {
  pi_[root_] = 0.0;
  for (int u = thread_[root_]; u != root_; u = thread_[u]) {
    const int e = pred_[u];
    pi_[u] = pi_[parent_[u]] - pred_dir_[u] * cost_[e];
  }
}

void NetworkSimplex::refresh_nonbasic_states() {
  const int all = static_cast<int>(state_.size());
  for (int e = 0; e < all; ++e) {
    if (state_[e] == kStateTree) continue;
    state_[e] = (flow_[e] == upper_[e] && upper_[e] > lower_[e]) ? kStateUpper : kStateLower;
  }
}

bool NetworkSimplex::find_entering_arc() {
  const int all = static_cast<int>(state_.size());
  double best = 0.0;
  int cnt = block_size_;
  int e = next_arc_;
  in_arc_ = -1;
  for (int scanned = 0; scanned < all; ++scanned) {
    if (state_[e] != kStateTree && upper_[e] > lower_[e]) {
      const double c = state_[e] * reduced_cost(e);
      if (c < best) {
        best = c;
        in_arc_ = e;
      }
    }
    if (--cnt == 0) {
      if (best < -eps_) {
        next_arc_ = e;
        return true;
      }
      cnt = block_size_;
    }
    if (++e == all) e = 0;
  }
  if (best < -eps_) {
    next_arc_ = e;
    return true;
  }
  return false;
}

void NetworkSimplex::find_join_node() {
  int u = source_[in_arc_];
  int v = target_[in_arc_];
  while (u != v) {
    if (succ_num_[u] < succ_num_[v]) {
      u = parent_[u];
    } else {
      v = parent_[v];
    }
  }
  join_ = u;
}

bool NetworkSimplex::find_leaving_arc() {
  if (state_[in_arc_] == kStateLower) {
    first_ = source_[in_arc_];
    second_ = target_[in_arc_];
  } else {
    first_ = target_[in_arc_];
    second_ = source_[in_arc_];
  }
  delta_ = upper_[in_arc_] - lower_[in_arc_];
  int result = 0;

  for (int u = first_; u != join_; u = parent_[u]) {
    const int e = pred_[u];
    const double d = pred_dir_[u] == kDirUp ? flow_[e] - lower_[e] : upper_[e] - flow_[e];
    if (d < delta_) {
      delta_ = d;
      u_out_ = u;
      result = 1;
    }
  }
  for (int u = second_; u != join_; u = parent_[u]) {
    const int e = pred_[u];
    const double d = pred_dir_[u] == kDirUp ? upper_[e] - flow_[e] : flow_[e] - lower_[e];
    if (d <= delta_) {
      delta_ = d;
      u_out_ = u;
      result = 2;
    }
  }
  if (delta_ < 0.0) delta_ = 0.0;

  if (result == 1) {
    u_in_ = first_;
    v_in_ = second_;
  } else {
    u_in_ = second_;
    v_in_ = first_;
  }
  return result != 0;
}

void NetworkSimplex::change_flow(bool change) {
  if (delta_ > 0.0) {
    const double val = state_[in_arc_] * delta_;
    flow_[in_arc_] += val;
    for (int u = source_[in_arc_]; u != join_; u = parent_[u]) {
      flow_[pred_[u]] -= pred_dir_[u] * val;
    }
    for (int u = target_[in_arc_]; u != join_; u = parent_[u]) {
      flow_[pred_[u]] += pred_dir_[u] * val;
    }
  }
  if (change) {
    state_[in_arc_] = kStateTree;
    const int out = pred_[u_out_];
    if (flow_[out] - lower_[out] <= upper_[out] - flow_[out]) {
      flow_[out] = lower_[out];
      state_[out] = kStateLower;
    } else {
      flow_[out] = upper_[out];
      state_[out] = kStateUpper;
    }
  } else {
    // Entering arc moved to its opposite bound.
    flow_[in_arc_] = state_[in_arc_] == kStateLower ? upper_[in_arc_] : lower_[in_arc_];
    state_[in_arc_] = static_cast<signed char>(-state_[in_arc_]);
  }
}

void NetworkSimplex::update_tree_structure() {
  const int old_rev_thread = rev_thread_[u_out_];
  const int old_succ_num = succ_num_[u_out_];
  const int old_last_succ = last_succ_[u_out_];
  v_out_ = parent_[u_out_];

  if (u_in_ == u_out_) {
    parent_[u_in_] = v_in_;
    pred_[u_in_] = in_arc_;
    pred_dir_[u_in_] = u_in_ == source_[in_arc_] ? kDirUp : kDirDown;

    if (thread_[v_in_] != u_out_) {
      int after = thread_[old_last_succ];
      thread_[old_rev_thread] = after;
      rev_thread_[after] = old_rev_thread;
      after = thread_[v_in_];
      thread_[v_in_] = u_out_;
      rev_thread_[u_out_] = v_in_;
      thread_[old_last_succ] = after;
      rev_thread_[after] = old_last_succ;
    }
  } else {
    // When old_rev_thread == v_in, join and v_out coincide.
    const int thread_continue =
        old_rev_thread == v_in_ ? thread_[old_last_succ] : thread_[v_in_];

    // Re-hang the stem between u_in and u_out.
    int stem = u_in_;
    int par_stem = v_in_;
    int next_stem;
    int last = last_succ_[u_in_];
    int before;
    int after = thread_[last];
    thread_[v_in_] = u_in_;
    dirty_revs_.clear();
    dirty_revs_.push_back(v_in_);
    while (stem != u_out_) {
      next_stem = parent_[stem];
      thread_[last] = next_stem;
      dirty_revs_.push_back(last);

      before = rev_thread_[stem];
      thread_[before] = after;
      rev_thread_[after] = before;

      parent_[stem] = par_stem;
      par_stem = stem;
      stem = next_stem;

      last = last_succ_[stem] == last_succ_[par_stem] ? rev_thread_[par_stem] : last_succ_[stem];
      after = thread_[last];
    }
    parent_[u_out_] = par_stem;
    thread_[last] = thread_continue;
    rev_thread_[thread_continue] = last;
    last_succ_[u_out_] = last;

    if (old_rev_thread != v_in_) {
      thread_[old_rev_thread] = after;
      rev_thread_[after] = old_rev_thread;
    }

    for (int u : dirty_revs_) rev_thread_[thread_[u]] = u;

    int tmp_sc = 0;
    const int tmp_ls = last_succ_[u_out_];
    for (int u = u_out_, p = parent_[u]; u != u_in_; u = p, p = parent_[u]) {
      pred_[u] = pred_[p];
      pred_dir_[u] = static_cast<signed char>(-pred_dir_[p]);
      tmp_sc += succ_num_[u] - succ_num_[p];
      succ_num_[u] = tmp_sc;
      last_succ_[p] = tmp_ls;
    }
    pred_[u_in_] = in_arc_;
    pred_dir_[u_in_] = u_in_ == source_[in_arc_] ? kDirUp : kDirDown;
    succ_num_[u_in_] = old_succ_num;
  }

  const int up_limit_out = last_succ_[join_] == v_in_ ? join_ : -1;
  const int last_succ_out = last_succ_[u_out_];
  for (int u = v_in_; u != -1 && last_succ_[u] == v_in_; u = parent_[u]) {
    last_succ_[u] = last_succ_out;
  }

  if (join_ != old_rev_thread && v_in_ != old_rev_thread) {
    for (int u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u]) {
      last_succ_[u] = old_rev_thread;
    }
  } else if (last_succ_out != old_last_succ) {
    for (int u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u]) {
      last_succ_[u] = last_succ_out;
    }
  }

  for (int u = v_in_; u != join_; u = parent_[u]) succ_num_[u] += old_succ_num;
  for (int u = v_out_; u != join_; u = parent_[u]) succ_num_[u] -= old_succ_num;
}

void NetworkSimplex::update_potential() {
  const double sigma = pi_[v_in_] - pi_[u_in_] - pred_dir_[u_in_] * cost_[in_arc_];
  const int end = thread_[last_succ_[u_in_]];
  for (int u = u_in_; u != end; u = thread_[u]) pi_[u] += sigma;
}

NetworkSimplex::Status NetworkSimplex::run(std::int64_t max_pivots) {
  if (!initialized_) {
    for (int e = 0; e < arc_count_; ++e) {
      if (lower_[e] != 0.0) throw std::logic_error("NetworkSimplex: nonzero lower bound before first run");
    }
    init_tree();
  } else {
    refresh_nonbasic_states();
  }
  recompute_potentials();

  double max_cost = 1.0;
  for (int e = 0; e < arc_count_; ++e) max_cost = std::max(max_cost, std::abs(cost_[e]));
  eps_ = 1e-12 * max_cost;

  if (max_pivots < 0) {
    max_pivots = 200 * static_cast<std::int64_t>(state_.size()) + 10000;
  }
  std::int64_t local = 0;
  while (find_entering_arc()) {
    if (local++ >= max_pivots) return Status::iteration_limit;
    ++pivots_;
    find_join_node();
    const bool change = find_leaving_arc();
    change_flow(change);
    if (change) {
      update_tree_structure();
      update_potential();
    }
  }
  return Status::optimal;
}

bool NetworkSimplex::verify(double tol, bool check_optimality) const {
  if (!initialized_) return true;
  const int n = node_count_;
  // Thread visits every node exactly once, starting and ending at the root.
  std::vector<char> seen(n + 1, 0);
  int count = 0;
  int u = root_;
  do {
    if (u < 0 || u > n || seen[u]) return false;
    seen[u] = 1;
    ++count;
    if (rev_thread_[thread_[u]] != u) return false;
    u = thread_[u];
  } while (u != root_);
  if (count != n + 1) return false;

  std::vector<int> subtree(n + 1, 1);
  for (int v = rev_thread_[root_]; v != root_; v = rev_thread_[v]) subtree[parent_[v]] += subtree[v];
  for (int v = 0; v <= n; ++v) {
    if (subtree[v] != succ_num_[v]) return false;
  }
  for (int v = 0; v < n; ++v) {
    const int e = pred_[v];
    if (state_[e] != kStateTree) return false;
    const int other = pred_dir_[v] == kDirUp ? target_[e] : source_[e];
    const int self = pred_dir_[v] == kDirUp ? source_[e] : target_[e];
    if (self != v || other != parent_[v]) return false;
    if (std::abs(reduced_cost(e)) > 1e-7 * (1.0 + std::abs(pi_[v]))) return false;
  }

  std::vector<double> balance(n + 1, 0.0);
  const int all = static_cast<int>(state_.size());
  for (int e = 0; e < all; ++e) {
    if (flow_[e] < lower_[e] - tol || flow_[e] > upper_[e] + tol) return false;
    balance[source_[e]] -= flow_[e];
    balance[target_[e]] += flow_[e];
  }
  for (int v = 0; v <= n; ++v) {
    if (std::abs(balance[v]) > tol) return false;
  }
  if (check_optimality) {
    for (int e = 0; e < all; ++e) {
      if (state_[e] == kStateTree || upper_[e] <= lower_[e]) continue;
      if (state_[e] * reduced_cost(e) < -1e-7) return false;
    }
  }
  return true;
}

}  // namespace accessflow
