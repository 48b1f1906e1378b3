#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "actc/rng.hpp"

namespace actc::topology {

// Directed graph over n agents. An edge (from -> to) means "from" is an
// in-neighbor of "to", i.e. "to" listens to "from".
struct Adjacency {
  int n = 0;
  // in_neighbors[k] holds the sorted in-neighborhood of k (self included
  // when the self-loop edge (k -> k) is present).
  std::vector<std::vector<int>> in_neighbors;

  explicit Adjacency(int num_nodes = 0);
  void add_edge(int from, int to);        // idempotent
  bool has_edge(int from, int to) const;
  void add_self_loops();                  // (k -> k) for every k
  int num_edges() const;
};

// Column-stochastic combination matrix with entry (l, k) = a_lk, the weight
// agent k puts on agent l. Construction goes through validate().
class CombinationMatrix {
 public:
  // Default-constructed instances are empty placeholders; every non-empty
  // instance comes out of validate().
  CombinationMatrix() = default;

  const Eigen::MatrixXd& matrix() const { return a_; }
  int size() const { return static_cast<int>(a_.rows()); }
  double operator()(int from, int to) const { return a_(from, to); }

  // Sorted in-neighborhood of k: { l : a_lk > 0 }.
  const std::vector<int>& in_neighbors(int k) const {
    return in_neighbors_.at(k);
  }
  // Sorted out-neighborhood of l: { k : a_lk > 0 }.
  const std::vector<int>& out_neighbors(int l) const {
    return out_neighbors_.at(l);
  }

  Adjacency support() const;  // edge (l -> k) wherever a_lk > 0

 private:
  friend CombinationMatrix validate(const Eigen::MatrixXd& a);
  Eigen::MatrixXd a_;
  std::vector<std::vector<int>> in_neighbors_;
  std::vector<std::vector<int>> out_neighbors_;
};

// Checks: entries non-negative, every column sums to 1 within 1e-12, the
// support graph is strongly connected, and at least one self-loop exists
// (primitivity). Throws NotColumnStochastic / NotStronglyConnected /
// NoSelfLoop respectively.
CombinationMatrix validate(const Eigen::MatrixXd& a);

// Perron eigenvector of a validated combination matrix: entrywise positive,
// sums to one, with ||A pi - pi||_inf <= 1e-10.
struct PerronVector {
  Eigen::VectorXd pi;
};

// Power iteration from the uniform vector; stops when the iterate moves by
// less than tol in l-infinity norm. Throws NoConvergence past max_iters.
PerronVector perron(const CombinationMatrix& matrix, double tol = 1e-13,
                    int max_iters = 1000000);

// Distributed estimate: runs the n consensus recursions y <- A' y, the k-th
// started from the k-th canonical basis vector. Every component of the k-th
// recursion converges to pi_k; the estimate is assembled from the view of
// agent 0. Agrees with perron() to the solver tolerance.
PerronVector consensus_perron_estimate(const CombinationMatrix& matrix,
                                       double tol = 1e-13,
                                       int max_iters = 1000000);

// Preferential-attachment graph: nodes join one at a time, each connecting
// attachment_edges undirected edges to existing nodes picked with
// probability proportional to current degree (multi-edges collapsed).
// Self-loops are then added everywhere. Deterministic for a fixed rng state.
Adjacency bollobas_riordan(int n, int attachment_edges, Rng& rng);

// Uniform-averaging rule: a_lk = 1 / |N_k| for l in N_k.
CombinationMatrix averaging_rule(const Adjacency& adjacency);

// Relative-degree rule: a_lk = n_l / sum_{m in N_k} n_m with n_l = |N_l|.
CombinationMatrix relative_degree_rule(const Adjacency& adjacency);

// Edge-list serialization: one "from to" pair per line, preceded by a
// header line "n <num_nodes>".
void write_edge_list(std::ostream& out, const Adjacency& adjacency);
Adjacency read_edge_list(std::istream& in);

// Dense CSV (one row per matrix row) for combination matrices.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& a);
Eigen::MatrixXd read_matrix_csv(std::istream& in);

}  // namespace actc::topology
