#include "actc/topology.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "actc/errors.hpp"

namespace actc::topology {

namespace {

constexpr double kColumnSumTol = 1e-12;

// Iterative DFS over an implicit edge view (avoids recursion limits on
// large graphs). edges(node) must return the traversal neighbors.
template <typename EdgeView>
std::vector<bool> reachable_from(int start, int n, const EdgeView& edges) {
  std::vector<bool> seen(n, false);
  std::vector<int> stack{start};
  seen[start] = true;
  while (!stack.empty()) {
    const int node = stack.back();
    stack.pop_back();
    for (int next : edges(node)) {
      if (!seen[next]) {
        seen[next] = true;
        stack.push_back(next);
      }
    }
  }
  return seen;
}

}  // namespace

Adjacency::Adjacency(int num_nodes)
    : n(num_nodes),
      in_neighbors(static_cast<std::size_t>(std::max(num_nodes, 0))) {
  if (num_nodes < 0) throw InvalidArgument("node count must be non-negative");
}

void Adjacency::add_edge(int from, int to) {
  if (from < 0 || from >= n || to < 0 || to >= n) {
    throw InvalidArgument("edge endpoint out of range");
  }
  std::vector<int>& list = in_neighbors[to];
  auto it = std::lower_bound(list.begin(), list.end(), from);
  if (it == list.end() || *it != from) list.insert(it, from);
}

bool Adjacency::has_edge(int from, int to) const {
  const std::vector<int>& list = in_neighbors.at(to);
  return std::binary_search(list.begin(), list.end(), from);
}

void Adjacency::add_self_loops() {
  for (int k = 0; k < n; ++k) add_edge(k, k);
}

int Adjacency::num_edges() const {
  int total = 0;
  for (const std::vector<int>& list : in_neighbors) {
    total += static_cast<int>(list.size());
  }
  return total;
}

Adjacency CombinationMatrix::support() const {
  Adjacency adjacency(size());
  for (int k = 0; k < size(); ++k) {
    for (int l : in_neighbors_[k]) adjacency.add_edge(l, k);
  }
  return adjacency;
}

CombinationMatrix validate(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n || n < 1) {
    throw DimensionMismatch("combination matrix must be square");
  }
  if ((a.array() < 0.0).any()) {
    throw NotColumnStochastic("combination weights must be non-negative");
  }
  for (int k = 0; k < n; ++k) {
    const double sum = a.col(k).sum();
    if (std::abs(sum - 1.0) > kColumnSumTol) {
      throw NotColumnStochastic("column " + std::to_string(k) +
                                " sums to " + std::to_string(sum));
    }
  }

  CombinationMatrix matrix;
  matrix.a_ = a;
  matrix.in_neighbors_.resize(n);
  matrix.out_neighbors_.resize(n);
  bool any_self_loop = false;
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      if (a(l, k) > 0.0) {
        matrix.in_neighbors_[k].push_back(l);
        matrix.out_neighbors_[l].push_back(k);
        if (l == k) any_self_loop = true;
      }
    }
  }

  // Strong connectivity of the support: every node reachable from node 0
  // along out-edges and along in-edges.
  auto out_view = [&](int node) -> const std::vector<int>& {
    return matrix.out_neighbors_[node];
  };
  auto in_view = [&](int node) -> const std::vector<int>& {
    return matrix.in_neighbors_[node];
  };
  const std::vector<bool> fwd = reachable_from(0, n, out_view);
  const std::vector<bool> bwd = reachable_from(0, n, in_view);
  for (int k = 0; k < n; ++k) {
    if (!fwd[k]) {
      throw NotStronglyConnected("no path from node 0 to node " +
                                 std::to_string(k));
    }
    if (!bwd[k]) {
      throw NotStronglyConnected("no path from node " + std::to_string(k) +
                                 " to node 0");
    }
  }
  if (!any_self_loop) {
    throw NoSelfLoop("support graph needs at least one self-loop");
  }
  return matrix;
}

PerronVector perron(const CombinationMatrix& matrix, double tol,
                    int max_iters) {
  const int n = matrix.size();
  const Eigen::MatrixXd& a = matrix.matrix();
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / n);
  for (int iter = 0; iter < max_iters; ++iter) {
    Eigen::VectorXd next = a * v;
    next /= next.sum();  // guard against round-off drift of the total mass
    const double change = (next - v).cwiseAbs().maxCoeff();
    v = next;
    if (change < tol) return PerronVector{v};
  }
  throw NoConvergence("power iteration did not converge within " +
                      std::to_string(max_iters) + " iterations");
}

PerronVector consensus_perron_estimate(const CombinationMatrix& matrix,
                                       double tol, int max_iters) {
  const int n = matrix.size();
  // Column k of y is the state of the k-th consensus recursion y <- A' y
  // started from e_k; all its entries tend to pi_k.
  Eigen::MatrixXd y = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd at = matrix.matrix().transpose();
  for (int iter = 0; iter < max_iters; ++iter) {
    Eigen::MatrixXd next = at * y;
    const double change = (next - y).cwiseAbs().maxCoeff();
    y = next;
    if (change < tol) {
      // Assemble from agent 0's view; its row sums to one exactly because
      // A' is row-stochastic.
      Eigen::VectorXd estimate = y.row(0).transpose();
      estimate /= estimate.sum();
      return PerronVector{estimate};
    }
  }
  throw NoConvergence("consensus recursions did not converge within " +
                      std::to_string(max_iters) + " iterations");
}

Adjacency bollobas_riordan(int n, int attachment_edges, Rng& rng) {
  if (n < 2) throw InvalidArgument("need at least two nodes");
  if (attachment_edges < 1) {
    throw InvalidArgument("need at least one attachment edge per node");
  }
  Adjacency adjacency(n);
  // urn holds one entry per unit of (multigraph) degree; sampling an entry
  // uniformly implements degree-proportional attachment. Node 0 starts
  // with a single virtual entry so the first arrival has a target.
  std::vector<int> urn{0};
  for (int v = 1; v < n; ++v) {
    std::vector<int> picked;
    picked.reserve(attachment_edges);
    for (int e = 0; e < attachment_edges; ++e) {
      picked.push_back(urn[rng.uniform_int(urn.size())]);
    }
    for (int target : picked) {
      adjacency.add_edge(v, target);  // undirected: both directions
      adjacency.add_edge(target, v);
      urn.push_back(target);
      urn.push_back(v);
    }
  }
  adjacency.add_self_loops();
  return adjacency;
}

CombinationMatrix averaging_rule(const Adjacency& adjacency) {
  const int n = adjacency.n;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const std::vector<int>& neighborhood = adjacency.in_neighbors[k];
    if (neighborhood.empty()) {
      throw NotStronglyConnected("node " + std::to_string(k) +
                                 " has an empty neighborhood");
    }
    const double weight = 1.0 / static_cast<double>(neighborhood.size());
    for (int l : neighborhood) a(l, k) = weight;
  }
  return validate(a);
}

CombinationMatrix relative_degree_rule(const Adjacency& adjacency) {
  const int n = adjacency.n;
  Eigen::VectorXd degree(n);
  for (int k = 0; k < n; ++k) {
    degree[k] = static_cast<double>(adjacency.in_neighbors[k].size());
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const std::vector<int>& neighborhood = adjacency.in_neighbors[k];
    if (neighborhood.empty()) {
      throw NotStronglyConnected("node " + std::to_string(k) +
                                 " has an empty neighborhood");
    }
    double total = 0.0;
    for (int l : neighborhood) total += degree[l];
    for (int l : neighborhood) a(l, k) = degree[l] / total;
  }
  return validate(a);
}

void write_edge_list(std::ostream& out, const Adjacency& adjacency) {
  out << "n " << adjacency.n << "\n";
  for (int k = 0; k < adjacency.n; ++k) {
    for (int l : adjacency.in_neighbors[k]) {
      out << l << " " << k << "\n";
    }
  }
}

Adjacency read_edge_list(std::istream& in) {
  std::string tag;
  int n = 0;
  if (!(in >> tag >> n) || tag != "n") {
    throw IoError("edge list must start with a 'n <count>' header");
  }
  Adjacency adjacency(n);
  int from = 0;
  int to = 0;
  while (in >> from >> to) adjacency.add_edge(from, to);
  return adjacency;
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& a) {
  char buffer[32];
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", a(i, j));
      out << buffer << (j + 1 < a.cols() ? "," : "");
    }
    out << "\n";
  }
}

Eigen::MatrixXd read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("empty matrix file");
  const std::size_t cols = rows.front().size();
  Eigen::MatrixXd a(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw IoError("ragged matrix rows");
    for (std::size_t j = 0; j < cols; ++j) a(i, j) = rows[i][j];
  }
  return a;
}

}  // namespace actc::topology
