#include "rcp/topology.hpp"

#include <fstream>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace rcp {

Graph::Graph(int n, const std::vector<Edge>& edges) : n_(n) {
  if (n < 2) throw std::invalid_argument("graph needs at least 2 agents");
  for (const auto& [i, j, w] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n)
      throw std::invalid_argument("edge endpoint out of range");
    if (i == j) throw std::invalid_argument("self loops are not allowed");
    if (!(w > 0.0)) throw std::invalid_argument("edge weights must be positive");
    auto key = std::make_pair(std::min(i, j), std::max(i, j));
    edges_[key] = w;  // duplicate edges collapse, last weight wins
  }
  adj_.assign(n_, {});
  for (const auto& [key, w] : edges_) {
    adj_[key.first].push_back(key.second);
    adj_[key.second].push_back(key.first);
  }

  // BFS connectivity check.
  std::vector<char> seen(n_, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adj_[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        q.push(v);
      }
    }
  }
  if (reached != n_) throw std::invalid_argument("graph is not connected");
}

Graph Graph::ring(int n) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n, 1.0);
  return Graph(n, e);  // n=2 collapses to the single edge (0,1)
}

Graph Graph::torus(int rows, int cols) {
  if (rows < 2 || cols < 2)
    throw std::invalid_argument("torus needs rows >= 2 and cols >= 2");
  std::vector<Edge> e;
  auto id = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      e.emplace_back(id(r, c), id(r, (c + 1) % cols), 1.0);
      e.emplace_back(id(r, c), id((r + 1) % rows, c), 1.0);
    }
  }
  return Graph(rows * cols, e);  // wraparound duplicates collapse when dim == 2
}

Graph Graph::complete(int n) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j, 1.0);
  return Graph(n, e);
}

Graph Graph::from_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list: " + path);
  std::vector<Edge> e;
  int max_node = -1;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    int i, j;
    if (!(ss >> i)) {
      if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
      throw std::runtime_error("edge list line " + std::to_string(lineno) +
                               ": expected node id");
    }
    double w = 1.0;
    if (!(ss >> j)) {
      throw std::runtime_error("edge list line " + std::to_string(lineno) +
                               ": expected at least two node ids");
    }
    ss >> w;  // optional weight
    e.emplace_back(i, j, w);
    max_node = std::max(max_node, std::max(i, j));
  }
  if (e.empty()) throw std::runtime_error("edge list is empty: " + path);
  return Graph(max_node + 1, e);
}

Eigen::MatrixXd Graph::laplacian() const {
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n_, n_);
  for (const auto& [key, w] : edges_) {
    const auto [i, j] = key;
    L(i, i) += w;
    L(j, j) += w;
    L(i, j) -= w;
    L(j, i) -= w;
  }
  return L;
}

SpectralBounds Graph::spectral_bounds() const {
  if (bounds_valid_) return bounds_;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian());
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("Laplacian eigensolve failed");
  const auto& ev = solver.eigenvalues();  // ascending
  bounds_.lambda_min_pos = ev(1);         // ev(0) is the zero mode
  bounds_.lambda_max = ev(n_ - 1);
  bounds_valid_ = true;
  return bounds_;
}

}  // namespace rcp
