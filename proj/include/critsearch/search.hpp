#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "critsearch/partition_tree.hpp"

namespace critsearch {

/// Evaluation budget of a search run. Cache look-ups (POO) are free;
/// every objective call raises n_used by exactly one.
struct Budget {
  int n_max = 4000;
  int n_used = 0;
};

/// Black-box objective over the unit cube.
using SearchObjective = std::function<double(const UnitPoint&)>;

struct NodeRef {
  int depth = 0;
  std::uint64_t index = 1;
};

/// One objective evaluation as it appears in a run trace.
struct EvalRecord {
  int index = 0;  // 1-based evaluation number, strictly increasing
  UnitPoint point;
  double kappa = 0.0;
  bool critical = false;
  std::optional<NodeRef> node;       // tree-guided searches only
  std::optional<int> instance_id;    // POO only
};

struct HooParams {
  double nu1 = 1.0;
  double rho = 0.3;
  std::uint64_t seed = 1;
  int stream = 1;      // rng sub-stream; POO instances use their own
  bool audit = false;  // record per-round selection data for invariants
};

struct PooParams {
  double nu_max = 1.0;
  double rho_max = 0.3;
  std::uint64_t seed = 1;
};

struct DooParams {
  double nu1 = 1.0;
  double rho = 0.3;
};

struct SooParams {
  double epsilon = 0.6;
};

/// Optimistic upper bound of one tree node (HOO):
///   mean + sqrt(2 ln n_total / T) + nu1 * rho^depth,
/// and +infinity while the node is unvisited.
double hoo_u_value(long visits, double reward_sum, long n_total, int depth,
                   double nu1, double rho);

struct McResult {
  std::vector<EvalRecord> records;
};

/// Per-round audit data of a HOO run: the selected root-to-leaf path
/// and, for every branching on it, the B-values of the chosen child and
/// its sibling at selection time.
struct HooAuditRound {
  std::vector<PartitionTree::NodeId> path;
  std::vector<double> chosen_b;
  std::vector<double> sibling_b;
};

struct HooResult {
  std::vector<EvalRecord> records;
  PartitionTree tree;
  std::vector<HooAuditRound> audit;  // filled when HooParams.audit
};

struct PooInstanceStats {
  int instance_id = 0;
  double rho = 0.0;
  long requests = 0;     // leaf evaluations asked for
  long fresh_evals = 0;  // requests that consumed budget
  long cache_hits = 0;
  double reward_sum = 0.0;
  long critical = 0;
};

struct PooResult {
  std::vector<EvalRecord> records;  // fresh evaluations only
  std::vector<double> instance_rhos;
  std::vector<PooInstanceStats> instances;
  long cache_hits = 0;
  int best_instance = 1;  // highest mean observed reward
};

struct DooResult {
  std::vector<EvalRecord> records;
  PartitionTree tree;
};

struct SooResult {
  std::vector<EvalRecord> records;
  PartitionTree tree;
};

/// Baseline: n_max independent uniform draws from [0,1]^d.
McResult mc_run(Budget budget, std::uint64_t seed, const SearchObjective& f,
                double critical_threshold, std::size_t dim = 2);

/// Hierarchical optimistic optimization. Each round descends the tree
/// along argmax-B children (ties broken uniformly at random), samples
/// the reached leaf uniformly, splits it, and refreshes U- and B-values
/// bottom-up along the chosen path.
HooResult hoo_run(Budget budget, const HooParams& p, const SearchObjective& f,
                  double critical_threshold, std::size_t dim = 2);

/// Parallel-HOO instance schedule for a given budget: M is the smallest
/// power of two covering 0.5 * D_max * ln(n / ln n) instances, where
/// D_max = ln 2 / ln(1/rho_max); instance j runs with rho_max^(M/j).
std::vector<double> poo_schedule(double rho_max, int n_max);

/// Runs the scheduled HOO instances round-robin with a shared
/// evaluation cache keyed by tree node, so no cell is simulated twice.
PooResult poo_run(Budget budget, const PooParams& p, const SearchObjective& f,
                  double critical_threshold, std::size_t dim = 2);

/// Deterministic optimistic optimization: repeatedly splits the leaf
/// with the highest value(center) + nu1 * rho^depth (ties toward the
/// shallower, then lower-indexed leaf) and evaluates both child centers.
DooResult doo_run(Budget budget, const DooParams& p, const SearchObjective& f,
                  double critical_threshold, std::size_t dim = 2);

/// Simultaneous optimistic optimization: depth sweeps h = 0, 1, ...
/// bounded by floor(t^epsilon) where t is the 1-based number of the
/// upcoming split; at each depth the best leaf splits if its value is
/// no worse than every value already expanded this sweep.
SooResult soo_run(Budget budget, const SooParams& p, const SearchObjective& f,
                  double critical_threshold, std::size_t dim = 2);

}  // namespace critsearch
