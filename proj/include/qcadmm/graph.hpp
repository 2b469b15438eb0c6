#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qcadmm {

/// Undirected edge, always stored with i < j.
struct Edge {
  int i = 0;
  int j = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Directed arc of the symmetric digraph; each edge contributes two arcs.
struct Arc {
  int tail = 0;
  int head = 0;
};

/// Connected simple undirected network over agents 0..N-1.
///
/// Edges are normalized to i < j and kept sorted lexicographically. The
/// constructor rejects self-loops, duplicates, out-of-range endpoints and
/// disconnected topologies with std::invalid_argument.
class NetworkGraph {
 public:
  NetworkGraph(int n_agents, const std::vector<std::pair<int, int>>& edges);

  int n_agents() const { return n_agents_; }
  int n_edges() const { return static_cast<int>(edges_.size()); }
  int n_arcs() const { return 2 * n_edges(); }

  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int agent) const { return neighbors_.at(agent); }
  int degree(int agent) const { return static_cast<int>(neighbors_.at(agent).size()); }
  int min_degree() const;
  int max_degree() const;

  /// Arcs in the canonical order: for each sorted edge (i,j), (i,j) then (j,i).
  std::vector<Arc> arcs() const;

  friend bool operator==(const NetworkGraph& a, const NetworkGraph& b) {
    return a.n_agents_ == b.n_agents_ && a.edges_ == b.edges_;
  }

 private:
  int n_agents_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> neighbors_;
};

/// Breadth-first connectivity check from agent 0.
bool is_connected(int n_agents, const std::vector<Edge>& edges);

NetworkGraph complete_graph(int n);
NetworkGraph path_graph(int n);

/// Connected graph with exactly `e` edges: start from K_n, shuffle the edge
/// list with a seeded mt19937_64, and drop each edge in turn unless doing so
/// disconnects the graph, until `e` edges remain.
NetworkGraph random_connected_graph(int n, int e, std::uint64_t seed);

/// Base (non-Kronecker-extended) incidence and Laplacian matrices.
///
/// Column q of the N x 2E incidence matrices corresponds to arcs()[q] = (i,j):
/// m_plus has +1 at rows i and j, m_minus has +1 at row i and -1 at row j.
struct GraphMatrices {
  int n_agents = 0;
  int n_edges = 0;
  std::vector<Arc> arcs;
  Eigen::MatrixXd m_plus;
  Eigen::MatrixXd m_minus;
  Eigen::MatrixXd l_plus;
  Eigen::MatrixXd l_minus;
  Eigen::MatrixXd w_degree;
  /// Moore-Penrose pseudoinverse of m_minus (2E x N), singular-value cutoff
  /// 1e-10 * sigma_max.
  Eigen::MatrixXd m_minus_pinv;
};

GraphMatrices build_matrices(const NetworkGraph& g);

struct SpectralData {
  double sigma_max_m_plus = 0.0;
  double sigma_max_m_minus = 0.0;
  double sigma_min_nonzero_m_minus = 0.0;
};

/// Singular values of M+/M- from the eigenvalues of 2L+ and 2L-. The
/// Kronecker extension with I_M leaves these unchanged.
SpectralData spectral_quantities(const GraphMatrices& m);

/// Membership of a stacked NM vector in range(L-), i.e. every coordinate
/// slice sums to zero across agents. Default tol is 1e-9 * (1 + ||v||).
bool is_in_column_space_l_minus(const Eigen::VectorXd& v, const GraphMatrices& m,
                                std::optional<double> tol = std::nullopt);

// Stacked-vector operators. An NM vector holds agent i's M-block at
// [i*M, (i+1)*M); a 2EM vector holds arc q's block at [q*M, (q+1)*M). These
// apply the Kronecker-extended matrices without materializing them.

Eigen::VectorXd apply_m_plus_t(const GraphMatrices& m, const Eigen::VectorXd& x, int m_dim);
Eigen::VectorXd apply_m_minus_t(const GraphMatrices& m, const Eigen::VectorXd& x, int m_dim);
Eigen::VectorXd apply_m_minus(const GraphMatrices& m, const Eigen::VectorXd& beta, int m_dim);
Eigen::VectorXd apply_l_minus(const GraphMatrices& m, const Eigen::VectorXd& x, int m_dim);
Eigen::VectorXd apply_l_plus(const GraphMatrices& m, const Eigen::VectorXd& x, int m_dim);

/// Dense mat (x) I_M.
Eigen::MatrixXd kron_identity(const Eigen::MatrixXd& mat, int m_dim);

}  // namespace qcadmm
