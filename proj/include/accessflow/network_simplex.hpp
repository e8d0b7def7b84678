#ifndef ACCESSFLOW_NETWORK_SIMPLEX_HPP
#define ACCESSFLOW_NETWORK_SIMPLEX_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

namespace accessflow {

/// Primal network simplex for min-cost circulations with bounded, real-valued
/// arc flows (lower <= flow <= upper). Node supplies are zero; every arc starts
/// at zero flow, so all lower bounds must be 0 before the first run().
///
/// The spanning-tree basis is kept between runs, so callers may change costs or
/// tighten bounds around the current flow and re-optimize from a warm start.
/// Tree bookkeeping (thread / reverse thread / successor counts) follows the
/// classic strongly feasible tree scheme with block-search pricing.
class NetworkSimplex {
 public:
  enum class Status { optimal, iteration_limit };

  explicit NetworkSimplex(int node_count);

  int add_arc(int tail, int head, double upper, double cost);

  int node_count() const { return node_count_; }
  int arc_count() const { return arc_count_; }

  void set_cost(int arc, double cost);
  /// New bounds must contain the arc's current flow.
  void set_bounds(int arc, double lower, double upper);

  Status run(std::int64_t max_pivots = -1);

  double flow(int arc) const { return flow_[arc]; }
  double cost(int arc) const { return cost_[arc]; }
  double total_cost() const;
  double potential(int node) const { return pi_[node]; }
  std::int64_t pivots() const { return pivots_; }

  /// Checks tree structure, flow bounds, conservation and reduced-cost
  /// optimality. Intended for tests.
  bool verify(double tol, bool check_optimality) const;

 private:
  static constexpr int kStateUpper = -1;
  static constexpr int kStateTree = 0;
  static constexpr int kStateLower = 1;
  static constexpr int kDirUp = 1;
  static constexpr int kDirDown = -1;

  void init_tree();
  void recompute_potentials();
  void refresh_nonbasic_states();
  bool find_entering_arc();
  void find_join_node();
  bool find_leaving_arc();
  void change_flow(bool change);
  void update_tree_structure();
  void update_potential();
  double reduced_cost(int arc) const {
    return cost_[arc] + pi_[source_[arc]] - pi_[target_[arc]];
  }

  int node_count_;
  int arc_count_ = 0;  // real arcs
  bool initialized_ = false;
  double eps_ = 1e-12;

  std::vector<int> source_, target_;
  std::vector<double> lower_, upper_, cost_, flow_;
  std::vector<signed char> state_;

  std::vector<int> parent_, pred_, thread_, rev_thread_, succ_num_, last_succ_;
  std::vector<signed char> pred_dir_;
  std::vector<int> dirty_revs_;
  std::vector<double> pi_;
  int root_ = -1;

  int block_size_ = 10;
  int next_arc_ = 0;
  std::int64_t pivots_ = 0;

  int in_arc_ = -1, join_ = -1, u_in_ = -1, v_in_ = -1, u_out_ = -1, v_out_ = -1;
  int first_ = -1, second_ = -1;
  double delta_ = 0.0;
};

}  // namespace accessflow

#endif  // ACCESSFLOW_NETWORK_SIMPLEX_HPP
