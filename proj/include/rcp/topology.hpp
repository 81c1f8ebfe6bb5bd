#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace rcp {

struct SpectralBounds {
  double lambda_min_pos = 0.0;  // smallest nonzero Laplacian eigenvalue
  double lambda_max = 0.0;      // largest Laplacian eigenvalue
};

// Undirected weighted communication graph over agents 0..n-1.
// Construction validates: no self loops, strictly positive weights,
// connectivity. Disconnected graphs have no consensus dynamics worth
// simulating, so they are rejected outright.
class Graph {
 public:
  using Edge = std::tuple<int, int, double>;  // (i, j, weight)

  Graph(int n, const std::vector<Edge>& edges);

  static Graph ring(int n);
  static Graph torus(int rows, int cols);
  static Graph complete(int n);
  // File format: one "i j [weight]" per line, 0-indexed, '#' comments.
  static Graph from_edge_list_file(const std::string& path);

  int size() const { return n_; }
  // Normalized edge set, keys (i,j) with i<j.
  const std::map<std::pair<int, int>, double>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int i) const { return adj_[i]; }

  Eigen::MatrixXd laplacian() const;  // degree matrix minus weight matrix

  // Dense symmetric eigensolve; cached after the first call.
  SpectralBounds spectral_bounds() const;

 private:
  int n_ = 0;
  std::map<std::pair<int, int>, double> edges_;
  std::vector<std::vector<int>> adj_;
  mutable bool bounds_valid_ = false;
  mutable SpectralBounds bounds_;
};

}  // namespace rcp
