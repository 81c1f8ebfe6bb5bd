#include "rcp/problems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace rcp {

namespace {

double sigmoid(double t) {
  // split to avoid overflow in exp for large |t|
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// log(1 + exp(t)) without overflow
double log1pexp(double t) {
  if (t > 35.0) return t;
  return std::log1p(std::exp(t));
}

}  // namespace

double Problem::loss(const Eigen::VectorXd& x) const {
  double s = 0.0;
  for (int i = 0; i < agents(); ++i) s += local_loss(i, x);
  return s / agents();
}

Eigen::VectorXd Problem::gradient(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim());
  for (int i = 0; i < agents(); ++i) g += local_gradient_full(i, x);
  return g / agents();
}

Dataset load_csv_dataset(const std::string& path, int label_column,
                         bool normalize, bool has_header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);

  std::vector<std::vector<double>> rows;
  std::string line;
  int expected_cols = -1;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && has_header) continue;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": non-numeric cell '" + cell + "'");
      }
    }
    if (expected_cols < 0) expected_cols = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != expected_cols)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("dataset is empty: " + path);
  if (label_column < 0 || label_column >= expected_cols)
    throw std::invalid_argument("label_column out of range");

  const int m = static_cast<int>(rows.size());
  const int d = expected_cols - 1;
  if (d < 1) throw std::runtime_error("dataset has no feature columns");

  Dataset ds;
  ds.features.resize(m, d);
  ds.labels.resize(m);
  for (int r = 0; r < m; ++r) {
    const double raw = rows[r][label_column];
    int lab;
    if (raw == 1.0) lab = 1;
    else if (raw == -1.0 || raw == 0.0) lab = -1;  // {0,1} maps to {-1,+1}
    else
      throw std::runtime_error("label must be in {0,1} or {-1,+1}, got " +
                               std::to_string(raw));
    ds.labels[r] = lab;
    int c = 0;
    for (int j = 0; j < expected_cols; ++j) {
      if (j == label_column) continue;
      ds.features(r, c++) = rows[r][j];
    }
  }

  if (normalize) {
    for (int j = 0; j < d; ++j) {
      const double lo = ds.features.col(j).minCoeff();
      const double hi = ds.features.col(j).maxCoeff();
      if (hi > lo)
        ds.features.col(j) = (ds.features.col(j).array() - lo) / (hi - lo);
      else
        ds.features.col(j).setZero();  // constant column carries no signal
    }
  }
  return ds;
}

std::vector<std::vector<int>> partition(int sample_count, int n_agents,
                                        PartitionStrategy strategy,
                                        std::uint64_t seed) {
  if (sample_count < n_agents)
    throw std::invalid_argument("fewer samples than agents");
  if (n_agents < 1) throw std::invalid_argument("need at least one agent");

  std::vector<int> order(sample_count);
  std::iota(order.begin(), order.end(), 0);
  RandomStream rng = RandomStream::derive(seed, 0, 0, StreamPurpose::partition);
  for (int i = sample_count - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.uniform_int(i + 1));
    std::swap(order[i], order[j]);
  }

  std::vector<std::vector<int>> parts(n_agents);
  if (strategy == PartitionStrategy::round_robin) {
    for (int i = 0; i < sample_count; ++i) parts[i % n_agents].push_back(order[i]);
  } else {
    // contiguous blocks, the first (sample_count mod n) agents get one extra
    const int base = sample_count / n_agents;
    const int extra = sample_count % n_agents;
    int pos = 0;
    for (int a = 0; a < n_agents; ++a) {
      const int take = base + (a < extra ? 1 : 0);
      for (int k = 0; k < take; ++k) parts[a].push_back(order[pos++]);
    }
  }
  return parts;
}

LogisticNonconvexProblem::LogisticNonconvexProblem(
    Dataset data, std::vector<std::vector<int>> agent_samples, double lambda,
    double alpha)
    : data_(std::move(data)),
      agent_samples_(std::move(agent_samples)),
      lambda_(lambda),
      alpha_(alpha) {
  if (agent_samples_.empty()) throw std::invalid_argument("no agents");
  for (const auto& s : agent_samples_) {
    if (s.empty()) throw std::invalid_argument("agent with no samples");
    for (int idx : s)
      if (idx < 0 || idx >= data_.size())
        throw std::invalid_argument("sample index out of range");
  }
  if (lambda_ < 0.0 || alpha_ <= 0.0)
    throw std::invalid_argument("need lambda >= 0 and alpha > 0");
}

Eigen::VectorXd LogisticNonconvexProblem::sample_gradient(
    int sample, const Eigen::VectorXd& x) const {
  const auto z = data_.features.row(sample).transpose();
  const double u = data_.labels[sample];
  return -u * sigmoid(-u * x.dot(z)) * z;
}

Eigen::VectorXd LogisticNonconvexProblem::regularizer_gradient(
    const Eigen::VectorXd& x) const {
  // d/dx_s of lambda*alpha*x_s^2/(1+alpha*x_s^2) = 2*lambda*alpha*x_s/(1+alpha*x_s^2)^2
  return x.unaryExpr([this](double v) {
    const double den = 1.0 + alpha_ * v * v;
    return 2.0 * lambda_ * alpha_ * v / (den * den);
  });
}

double LogisticNonconvexProblem::local_loss(int agent,
                                            const Eigen::VectorXd& x) const {
  const auto& idx = agent_samples_.at(agent);
  double s = 0.0;
  for (int i : idx) {
    const auto z = data_.features.row(i).transpose();
    const double u = data_.labels[i];
    s += log1pexp(-u * x.dot(z));
  }
  s /= idx.size();
  for (int j = 0; j < x.size(); ++j) {
    const double q = alpha_ * x(j) * x(j);
    s += lambda_ * q / (1.0 + q);
  }
  return s;
}

Eigen::VectorXd LogisticNonconvexProblem::local_gradient_full(
    int agent, const Eigen::VectorXd& x) const {
  const auto& idx = agent_samples_.at(agent);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim());
  for (int i : idx) g += sample_gradient(i, x);
  g /= idx.size();
  return g + regularizer_gradient(x);
}

GradientSample LogisticNonconvexProblem::local_gradient(
    int agent, const Eigen::VectorXd& x, int batch, RandomStream& rng) const {
  GradientSample out;
  out.agent = agent;
  if (batch <= 0) {
    out.value = local_gradient_full(agent, x);
    return out;
  }
  const auto& idx = agent_samples_.at(agent);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim());
  out.batch_indices.reserve(batch);
  for (int k = 0; k < batch; ++k) {  // uniform with replacement
    const int i = idx[rng.uniform_int(idx.size())];
    out.batch_indices.push_back(i);
    g += sample_gradient(i, x);
  }
  g /= batch;
  out.value = g + regularizer_gradient(x);
  return out;
}

double LogisticNonconvexProblem::smoothness() const {
  double max_z = 0.0;
  for (int r = 0; r < data_.size(); ++r)
    max_z = std::max(max_z, data_.features.row(r).squaredNorm());
  // per-sample logistic Hessian is bounded by ||z||^2/4; the regularizer's
  // second derivative peaks at 2*lambda*alpha (at the origin)
  return 0.25 * max_z + 2.0 * lambda_ * alpha_;
}

PLQuadraticProblem::PLQuadraticProblem(std::vector<Eigen::MatrixXd> A,
                                       std::vector<Eigen::VectorXd> b,
                                       double noise_std)
    : A_(std::move(A)), b_(std::move(b)), noise_std_(noise_std) {
  if (A_.empty() || A_.size() != b_.size())
    throw std::invalid_argument("need matching nonempty A and b lists");
  const int d = static_cast<int>(A_[0].rows());
  const int n = static_cast<int>(A_.size());
  for (int i = 0; i < n; ++i) {
    if (A_[i].rows() != d || A_[i].cols() != d || b_[i].size() != d)
      throw std::invalid_argument("inconsistent dimensions");
    if (!A_[i].isApprox(A_[i].transpose(), 1e-10))
      throw std::invalid_argument("A_i must be symmetric");
  }
  if (noise_std_ < 0.0) throw std::invalid_argument("noise_std must be >= 0");

  Q_ = Eigen::MatrixXd::Zero(d, d);
  p_ = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < n; ++i) {
    Q_ += A_[i];
    p_ += b_[i];
  }
  Q_ /= n;
  p_ /= n;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q_);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolve failed");
  const auto& ev = es.eigenvalues();
  const double lam_max = ev(d - 1);
  const double tol = std::max(1e-12, 1e-12 * std::abs(lam_max));
  nu_ = 0.0;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(d);
  for (int j = 0; j < d; ++j) {
    if (ev(j) > tol) {
      if (nu_ == 0.0) nu_ = ev(j);
      inv(j) = 1.0 / ev(j);
    }
  }
  if (nu_ == 0.0) throw std::invalid_argument("Q has no positive eigenvalue");
  // pseudo-inverse solve; requires p in range(Q) for the minimum to exist
  const Eigen::MatrixXd pinv =
      es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  x_star_ = pinv * p_;
  if ((Q_ * x_star_ - p_).norm() > 1e-8 * std::max(1.0, p_.norm()))
    throw std::invalid_argument("b is not consistent, objective is unbounded");
  f_star_ = 0.5 * x_star_.dot(Q_ * x_star_) - p_.dot(x_star_);

  L_f_ = 0.0;
  double mean_fi_star = 0.0;
  for (int i = 0; i < n; ++i) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ei(A_[i]);
    L_f_ = std::max(L_f_, ei.eigenvalues()(d - 1));
    // per-agent minimum, for the heterogeneity constant
    Eigen::VectorXd invi = Eigen::VectorXd::Zero(d);
    for (int j = 0; j < d; ++j)
      if (ei.eigenvalues()(j) > tol) invi(j) = 1.0 / ei.eigenvalues()(j);
    const Eigen::MatrixXd pi =
        ei.eigenvectors() * invi.asDiagonal() * ei.eigenvectors().transpose();
    const Eigen::VectorXd xi = pi * b_[i];
    mean_fi_star += 0.5 * xi.dot(A_[i] * xi) - b_[i].dot(xi);
  }
  mean_fi_star /= n;
  sigma_bar_ = 2.0 * L_f_ * (f_star_ - mean_fi_star);
}

double PLQuadraticProblem::local_loss(int agent, const Eigen::VectorXd& x) const {
  return 0.5 * x.dot(A_.at(agent) * x) - b_[agent].dot(x);
}

Eigen::VectorXd PLQuadraticProblem::local_gradient_full(
    int agent, const Eigen::VectorXd& x) const {
  return A_.at(agent) * x - b_[agent];
}

GradientSample PLQuadraticProblem::local_gradient(int agent,
                                                  const Eigen::VectorXd& x,
                                                  int batch,
                                                  RandomStream& rng) const {
  GradientSample out;
  out.agent = agent;
  out.value = local_gradient_full(agent, x);
  if (batch > 0 && noise_std_ > 0.0) {
    const double s = noise_std_ / std::sqrt(double(batch));
    for (int j = 0; j < out.value.size(); ++j) out.value(j) += s * rng.normal();
  }
  return out;
}

PLQuadraticProblem make_pl_quadratic(int n, int d, int rank_deficit,
                                     double condition, std::uint64_t seed,
                                     double noise_std, double hetero,
                                     double scale) {
  if (n < 1 || d < 1) throw std::invalid_argument("need n >= 1 and d >= 1");
  if (rank_deficit < 0 || rank_deficit >= d)
    throw std::invalid_argument("rank_deficit must be in [0, d)");
  if (condition < 1.0) throw std::invalid_argument("condition must be >= 1");
  if (hetero < 0.0 || hetero > 1.0)
    throw std::invalid_argument("hetero must be in [0,1]");

  RandomStream rng = RandomStream::derive(seed, 0, 0, StreamPurpose::init);

  // shared orthonormal eigenbasis
  Eigen::MatrixXd G(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) G(i, j) = rng.normal();
  const Eigen::MatrixXd V = Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();

  const int rank = d - rank_deficit;
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(d);
  for (int j = 0; j < rank; ++j)
    lam(j) = scale * std::pow(condition, rank == 1 ? 0.0 : double(j) / (rank - 1));

  // per-agent spectra: nonnegative, mean exactly the global spectrum
  std::vector<Eigen::MatrixXd> A(n);
  std::vector<Eigen::VectorXd> b(n);
  Eigen::MatrixXd S(n, d);
  for (int j = 0; j < d; ++j) {
    double mean = 0.0;
    for (int i = 0; i < n; ++i) {
      S(i, j) = std::max(0.05, 1.0 + hetero * rng.normal() * 0.5);
      mean += S(i, j);
    }
    mean /= n;
    for (int i = 0; i < n; ++i) S(i, j) /= mean;
  }

  const Eigen::VectorXd x_base = [&] {
    Eigen::VectorXd v(d);
    for (int j = 0; j < d; ++j) v(j) = rng.normal();
    return v;
  }();

  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd li = lam;
    for (int j = 0; j < d; ++j) li(j) *= S(i, j);
    A[i] = V * li.asDiagonal() * V.transpose();
    A[i] = 0.5 * (A[i] + A[i].transpose());  // fight drift from the products
    Eigen::VectorXd tgt = x_base;
    for (int j = 0; j < d; ++j) tgt(j) += hetero * rng.normal();
    b[i] = A[i] * tgt;  // keeps every b_i inside range(A_i)
  }
  return PLQuadraticProblem(std::move(A), std::move(b), noise_std);
}

double estimate_sigma(const Problem& problem, int points, int batch, int draws,
                      RandomStream& rng) {
  if (points < 1 || draws < 1)
    throw std::invalid_argument("need points >= 1 and draws >= 1");
  if (batch <= 0) return 0.0;  // full batch is exact
  double worst = 0.0;
  Eigen::VectorXd x(problem.dim());
  for (int p = 0; p < points; ++p) {
    for (int j = 0; j < x.size(); ++j) x(j) = rng.normal();
    for (int a = 0; a < problem.agents(); ++a) {
      const Eigen::VectorXd g = problem.local_gradient_full(a, x);
      double acc = 0.0;
      for (int r = 0; r < draws; ++r) {
        const auto gs = problem.local_gradient(a, x, batch, rng);
        acc += (gs.value - g).squaredNorm();
      }
      worst = std::max(worst, acc / draws);
    }
  }
  return worst;
}

double compute_reference_minimum(const Problem& problem, long long steps) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(problem.dim());
  const double L = problem.smoothness();
  const double eta0 = 1.0 / std::max(L, 1e-12);
  double best = problem.loss(x);
  for (long long t = 0; t < steps; ++t) {
    const double eta = eta0 / (1.0 + 10.0 * double(t) / double(steps));
    x -= eta * problem.gradient(x);
    if ((t & 1023) == 0) best = std::min(best, problem.loss(x));
  }
  return std::min(best, problem.loss(x));
}

std::uint64_t fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file for hashing: " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 15];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::optional<double> load_f_star_cache(const std::string& cache_path,
                                        std::uint64_t dataset_hash,
                                        double lambda, double alpha) {
  std::ifstream in(cache_path);
  if (!in) return std::nullopt;
  std::uint64_t hash;
  double lam, al, fs;
  long long steps;
  if (!(in >> hash >> lam >> al >> fs >> steps)) return std::nullopt;
  if (hash != dataset_hash || lam != lambda || al != alpha) return std::nullopt;
  return fs;
}

void save_f_star_cache(const std::string& cache_path, std::uint64_t dataset_hash,
                       double lambda, double alpha, double f_star,
                       long long steps) {
  std::ofstream out(cache_path);
  if (!out) throw std::runtime_error("cannot write cache: " + cache_path);
  out.precision(17);
  out << dataset_hash << ' ' << lambda << ' ' << alpha << ' ' << f_star << ' '
      << steps << '\n';
}

}  // namespace rcp
