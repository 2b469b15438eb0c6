#include "qcadmm/graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>

#include "qcadmm/errors.hpp"

namespace qcadmm {

namespace {

std::vector<std::vector<int>> adjacency(int n, const std::vector<Edge>& edges) {
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : edges) {
    adj[e.i].push_back(e.j);
    adj[e.j].push_back(e.i);
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());
  return adj;
}

// Stacked NM vector viewed as an M x N column-major matrix (column = agent).
Eigen::Map<const Eigen::MatrixXd> as_blocks(const Eigen::VectorXd& v, int m_dim) {
  return {v.data(), m_dim, v.size() / m_dim};
}

void check_stacked(const Eigen::VectorXd& v, int m_dim, Eigen::Index blocks, const char* what) {
  if (m_dim <= 0 || v.size() != blocks * m_dim) {
    throw std::invalid_argument(std::string(what) + ": expected length " +
                                std::to_string(blocks * std::max(m_dim, 0)) + ", got " +
                                std::to_string(v.size()));
  }
}

}  // namespace

NetworkGraph::NetworkGraph(int n_agents, const std::vector<std::pair<int, int>>& edges)
    : n_agents_(n_agents) {
  if (n_agents <= 0) throw std::invalid_argument("graph needs at least one agent");
  edges_.reserve(edges.size());
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n_agents || b >= n_agents) {
      throw std::invalid_argument("edge endpoint out of range: (" + std::to_string(a) + "," +
                                  std::to_string(b) + ")");
    }
    if (a == b) throw std::invalid_argument("self-loop at agent " + std::to_string(a));
    edges_.push_back({std::min(a, b), std::max(a, b)});
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw std::invalid_argument("duplicate edge");
  }
  if (!is_connected(n_agents, edges_)) throw std::invalid_argument("graph is not connected");
  neighbors_ = adjacency(n_agents, edges_);
}

int NetworkGraph::min_degree() const {
  int d = n_agents_;
  for (const auto& nb : neighbors_) d = std::min(d, static_cast<int>(nb.size()));
  return d;
}

int NetworkGraph::max_degree() const {
  int d = 0;
  for (const auto& nb : neighbors_) d = std::max(d, static_cast<int>(nb.size()));
  return d;
}

std::vector<Arc> NetworkGraph::arcs() const {
  std::vector<Arc> out;
  out.reserve(2 * edges_.size());
  for (const auto& e : edges_) {
    out.push_back({e.i, e.j});
    out.push_back({e.j, e.i});
  }
  return out;
}

bool is_connected(int n_agents, const std::vector<Edge>& edges) {
  if (n_agents <= 0) return false;
  const auto adj = adjacency(n_agents, edges);
  std::vector<char> seen(n_agents, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == n_agents;
}

NetworkGraph complete_graph(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  return NetworkGraph(n, edges);
}

NetworkGraph path_graph(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return NetworkGraph(n, edges);
}

NetworkGraph random_connected_graph(int n, int e, std::uint64_t seed) {
  if (n <= 0) throw std::invalid_argument("n must be positive");
  const long long max_edges = static_cast<long long>(n) * (n - 1) / 2;
  if (e < n - 1 || e > max_edges) {
    throw std::invalid_argument("edge count " + std::to_string(e) + " outside [" +
                                std::to_string(n - 1) + ", " + std::to_string(max_edges) + "]");
  }
  std::vector<Edge> pool;
  pool.reserve(static_cast<std::size_t>(max_edges));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pool.push_back({i, j});

  std::mt19937_64 rng(seed);
  std::shuffle(pool.begin(), pool.end(), rng);

  // A bridge stays a bridge as further edges are removed, so one pass over the
  // shuffled list always reaches the target count.
  std::vector<char> keep(pool.size(), 1);
  std::size_t remaining = pool.size();
  for (std::size_t k = 0; k < pool.size() && remaining > static_cast<std::size_t>(e); ++k) {
    keep[k] = 0;
    std::vector<Edge> trial;
    trial.reserve(remaining - 1);
    for (std::size_t q = 0; q < pool.size(); ++q)
      if (keep[q]) trial.push_back(pool[q]);
    if (is_connected(n, trial)) {
      --remaining;
    } else {
      keep[k] = 1;
    }
  }

  std::vector<std::pair<int, int>> edges;
  edges.reserve(remaining);
  for (std::size_t q = 0; q < pool.size(); ++q)
    if (keep[q]) edges.emplace_back(pool[q].i, pool[q].j);
  return NetworkGraph(n, edges);
}

GraphMatrices build_matrices(const NetworkGraph& g) {
  GraphMatrices m;
  m.n_agents = g.n_agents();
  m.n_edges = g.n_edges();
  m.arcs = g.arcs();
  const int n = g.n_agents();
  const int arcs = g.n_arcs();

  m.m_plus = Eigen::MatrixXd::Zero(n, arcs);
  m.m_minus = Eigen::MatrixXd::Zero(n, arcs);
  for (int q = 0; q < arcs; ++q) {
    const auto [tail, head] = m.arcs[q];
    m.m_plus(tail, q) = 1.0;
    m.m_plus(head, q) = 1.0;
    m.m_minus(tail, q) = 1.0;
    m.m_minus(head, q) = -1.0;
  }
  m.l_plus = 0.5 * m.m_plus * m.m_plus.transpose();
  m.l_minus = 0.5 * m.m_minus * m.m_minus.transpose();
  m.w_degree = 0.5 * (m.l_plus + m.l_minus);

  if (arcs == 0) {
    m.m_minus_pinv = Eigen::MatrixXd::Zero(0, n);
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m.m_minus, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const double cutoff = 1e-10 * s(0);
    Eigen::VectorXd s_inv = Eigen::VectorXd::Zero(s.size());
    for (Eigen::Index k = 0; k < s.size(); ++k)
      if (s(k) > cutoff) s_inv(k) = 1.0 / s(k);
    m.m_minus_pinv = svd.matrixV() * s_inv.asDiagonal() * svd.matrixU().transpose();
  }
  return m;
}

SpectralData spectral_quantities(const GraphMatrices& m) {
  SpectralData out;
  if (m.n_edges == 0) return out;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> plus(2.0 * m.l_plus, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> minus(2.0 * m.l_minus, Eigen::EigenvaluesOnly);
  if (plus.info() != Eigen::Success || minus.info() != Eigen::Success) {
    throw NumericalError("Laplacian eigensolver failed", 0.0);
  }
  const auto& ev_plus = plus.eigenvalues();
  const auto& ev_minus = minus.eigenvalues();
  const double top_minus = ev_minus.maxCoeff();
  out.sigma_max_m_plus = std::sqrt(std::max(0.0, ev_plus.maxCoeff()));
  out.sigma_max_m_minus = std::sqrt(std::max(0.0, top_minus));

  // Eigenvalues are ascending; anything below the relative cutoff is the
  // nullspace of the Laplacian.
  const double cutoff = 1e-10 * top_minus;
  for (Eigen::Index k = 0; k < ev_minus.size(); ++k) {
    if (ev_minus(k) > cutoff) {
      out.sigma_min_nonzero_m_minus = std::sqrt(ev_minus(k));
      break;
    }
  }
  if (out.sigma_min_nonzero_m_minus <= 0.0) {
    throw NumericalError("signed Laplacian has no nonzero eigenvalue", 0.0);
  }
  return out;
}

bool is_in_column_space_l_minus(const Eigen::VectorXd& v, const GraphMatrices& m,
                                std::optional<double> tol) {
  if (m.n_agents <= 0 || v.size() % m.n_agents != 0 || v.size() == 0) {
    throw std::invalid_argument("vector length is not a multiple of the agent count");
  }
  const int m_dim = static_cast<int>(v.size() / m.n_agents);
  const double threshold = tol.value_or(1e-9 * (1.0 + v.norm()));
  // range(L-) is the orthogonal complement of span{1_N (x) e_l}; the residual
  // of projecting onto it is the per-coordinate mean replicated over agents.
  const Eigen::VectorXd means = as_blocks(v, m_dim).rowwise().mean();
  const double residual = means.norm() * std::sqrt(static_cast<double>(m.n_agents));
  return residual <= threshold;
}

Eigen::VectorXd apply_m_plus_t(const GraphMatrices& m, const Eigen::VectorXd& x, int m_dim) {
  check_stacked(x, m_dim, m.n_agents, "apply_m_plus_t");
  Eigen::VectorXd out(static_cast<Eigen::Index>(2) * m.n_edges * m_dim);
  Eigen::Map<Eigen::MatrixXd>(out.data(), m_dim, 2 * m.n_edges) = as_blocks(x, m_dim) * m.m_plus;
  return out;
}

Eigen::VectorXd apply_m_minus_t(const GraphMatrices& m, const Eigen::VectorXd& x, int m_dim) {
  check_stacked(x, m_dim, m.n_agents, "apply_m_minus_t");
  Eigen::VectorXd out(static_cast<Eigen::Index>(2) * m.n_edges * m_dim);
  Eigen::Map<Eigen::MatrixXd>(out.data(), m_dim, 2 * m.n_edges) = as_blocks(x, m_dim) * m.m_minus;
  return out;
}

Eigen::VectorXd apply_m_minus(const GraphMatrices& m, const Eigen::VectorXd& beta, int m_dim) {
  check_stacked(beta, m_dim, 2 * m.n_edges, "apply_m_minus");
  Eigen::VectorXd out(static_cast<Eigen::Index>(m.n_agents) * m_dim);
  Eigen::Map<Eigen::MatrixXd>(out.data(), m_dim, m.n_agents) =
      as_blocks(beta, m_dim) * m.m_minus.transpose();
  return out;
}

Eigen::VectorXd apply_l_minus(const GraphMatrices& m, const Eigen::VectorXd& x, int m_dim) {
  check_stacked(x, m_dim, m.n_agents, "apply_l_minus");
  Eigen::VectorXd out(x.size());
  Eigen::Map<Eigen::MatrixXd>(out.data(), m_dim, m.n_agents) = as_blocks(x, m_dim) * m.l_minus;
  return out;
}

Eigen::VectorXd apply_l_plus(const GraphMatrices& m, const Eigen::VectorXd& x, int m_dim) {
  check_stacked(x, m_dim, m.n_agents, "apply_l_plus");
  Eigen::VectorXd out(x.size());
  Eigen::Map<Eigen::MatrixXd>(out.data(), m_dim, m.n_agents) = as_blocks(x, m_dim) * m.l_plus;
  return out;
}

Eigen::MatrixXd kron_identity(const Eigen::MatrixXd& mat, int m_dim) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(mat.rows() * m_dim, mat.cols() * m_dim);
  for (Eigen::Index r = 0; r < mat.rows(); ++r)
    for (Eigen::Index c = 0; c < mat.cols(); ++c)
      if (mat(r, c) != 0.0)
        out.block(r * m_dim, c * m_dim, m_dim, m_dim) =
            mat(r, c) * Eigen::MatrixXd::Identity(m_dim, m_dim);
  return out;
}

}  // namespace qcadmm
