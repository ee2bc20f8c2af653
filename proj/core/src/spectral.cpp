#include "rgg/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "rgg/calibration.hpp"
#include "rgg/errors.hpp"
#include "rgg/rng.hpp"

namespace rgg {

namespace {

constexpr std::size_t kMaxDimension = 4000;

// Solves (T - shift I) x = rhs for symmetric tridiagonal T by LU with partial
// pivoting. Zero pivots are nudged to `floor`, as inverse iteration wants.
Eigen::VectorXd tridiagonal_solve(const Eigen::VectorXd& diag, const Eigen::VectorXd& sub, double shift,
                                  Eigen::VectorXd rhs, double floor) {
  const Eigen::Index n = diag.size();
  std::vector<double> d(n), dl(n > 1 ? n - 1 : 0), du(n > 1 ? n - 1 : 0), du2(n > 2 ? n - 2 : 0, 0.0);
  std::vector<bool> swapped(n > 1 ? n - 1 : 0, false);
  for (Eigen::Index i = 0; i < n; ++i) d[i] = diag(i) - shift;
  for (Eigen::Index i = 0; i + 1 < n; ++i) dl[i] = du[i] = sub(i);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (std::fabs(d[i]) >= std::fabs(dl[i])) {
      if (d[i] == 0.0) d[i] = floor;
      const double fact = dl[i] / d[i];
      dl[i] = fact;
      d[i + 1] -= fact * du[i];
    } else {
      const double fact = d[i] / dl[i];
      d[i] = dl[i];
      dl[i] = fact;
      const double temp = du[i];
      du[i] = d[i + 1];
      d[i + 1] = temp - fact * d[i + 1];
      if (i + 2 < n) {
        du2[i] = du[i + 1];
        du[i + 1] = -fact * du[i + 1];
      }
      swapped[i] = true;
    }
  }
  if (d[n - 1] == 0.0) d[n - 1] = floor;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (swapped[i]) std::swap(rhs(i), rhs(i + 1));
    rhs(i + 1) -= dl[i] * rhs(i);
  }
  Eigen::VectorXd x(n);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    double acc = rhs(i);
    if (i + 1 < n) acc -= du[i] * x(i + 1);
    if (i + 2 < n) acc -= du2[i] * x(i + 2);
    x(i) = acc / d[i];
  }
  return x;
}

}  // namespace

Eigen::MatrixXd center_adjacency(const AdjacencyMatrix& adjacency, double p) {
  const auto n = static_cast<Eigen::Index>(adjacency.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index u = 0; u < n; ++u)
    for (Eigen::Index v = 0; v < n; ++v)
      m(u, v) = (adjacency(static_cast<std::size_t>(u), static_cast<std::size_t>(v)) ? 1.0 : 0.0) - p;
  return m;
}

SpectrumReport spectrum(const Eigen::MatrixXd& matrix, const SpectrumOptions& options) {
  const Eigen::Index n = matrix.rows();
  if (matrix.cols() != n) throw InvalidArgument("spectrum: matrix must be square");
  if (n == 0) throw InvalidArgument("spectrum: empty matrix");
  if (static_cast<std::size_t>(n) > kMaxDimension) throw InvalidArgument("spectrum: n must be <= 4000");
  if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw InvalidArgument("spectrum: matrix is not symmetric");

  Eigen::Tridiagonalization<Eigen::MatrixXd> tri(matrix);
  const Eigen::VectorXd diag = tri.diagonal();
  const Eigen::VectorXd sub = tri.subDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalFailure("spectrum: QL iteration failed", std::nan(""));

  SpectrumReport report;
  const Eigen::VectorXd& ascending = solver.eigenvalues();
  report.eigenvalues.assign(ascending.data(), ascending.data() + n);
  std::reverse(report.eigenvalues.begin(), report.eigenvalues.end());
  report.lambda1 = report.eigenvalues.front();
  report.lambda2_abs_max = n >= 2 ? std::max(std::fabs(report.eigenvalues[1]), std::fabs(report.eigenvalues.back())) : 0.0;
  for (double t : options.count_thresholds) report.counts[t] = count_large_eigs(report, t);

  const double norm2 = std::max(std::fabs(report.eigenvalues.front()), std::fabs(report.eigenvalues.back()));
  if (options.spot_checks > 0 && norm2 > 0.0) {
    const std::size_t checks = std::min<std::size_t>(options.spot_checks, static_cast<std::size_t>(n));
    Rng rng(0x73706563ULL);
    for (std::size_t c = 0; c < checks; ++c) {
      const std::size_t idx =
          checks == 1 ? 0 : c * (static_cast<std::size_t>(n) - 1) / (checks - 1);
      const double lambda = report.eigenvalues[idx];
      Eigen::VectorXd w(n);
      for (Eigen::Index i = 0; i < n; ++i) w(i) = rng.uniform01() - 0.5;
      w.normalize();
      for (int it = 0; it < 3; ++it) {
        w = tridiagonal_solve(diag, sub, lambda, w, norm2 * 1e-15);
        w.normalize();
      }
      const Eigen::VectorXd v = tri.matrixQ() * w;
      const double residual = (matrix * v - lambda * v).norm() / norm2;
      report.max_relative_residual = std::max(report.max_relative_residual, residual);
    }
    if (!(report.max_relative_residual <= options.residual_tolerance))
      throw NumericalFailure("spectrum: eigenpair residual above tolerance", report.max_relative_residual);
  }
  return report;
}

double large_eigenvalue_threshold(std::size_t n, double p, std::size_t d, double a, SpectralRegime regime) {
  if (!(a > 0.0)) throw InvalidArgument("large_eigenvalue_threshold: a must be positive");
  const double np = static_cast<double>(n) * p;
  const double dd = static_cast<double>(d);
  return regime == SpectralRegime::lq ? np / (a * std::sqrt(dd)) : np / (a * dd);
}

std::size_t count_large_eigs(const SpectrumReport& report, double threshold) {
  std::size_t count = 0;
  for (std::size_t i = 1; i < report.eigenvalues.size(); ++i)
    if (std::fabs(report.eigenvalues[i]) >= threshold) ++count;
  return count;
}

std::size_t count_large_eigs(const SpectrumReport& report, std::size_t n, double p, std::size_t d, double a,
                             SpectralRegime regime) {
  return count_large_eigs(report, large_eigenvalue_threshold(n, p, d, a, regime));
}

std::size_t ArcVector::support_size() const {
  return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](std::int8_t e) { return e != 0; }));
}

Eigen::VectorXd ArcVector::normalized() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(entries.size()));
  for (std::size_t i = 0; i < entries.size(); ++i) v(static_cast<Eigen::Index>(i)) = entries[i];
  const double norm = v.norm();
  if (norm > 0.0) v /= norm;
  return v;
}

double default_arc_half_width(int q) {
  const double mu = coordinate_moments(q).mu;
  return 0.5 * std::pow(0.5 * mu, 1.0 / q);
}

ArcVector arc_vector_q(const Positions& positions, std::size_t i, double c) {
  if (!(c > 0.0 && c < 0.25)) throw InvalidArgument("arc_vector_q: c must lie in (0, 1/4)");
  if (i >= positions.d()) throw InvalidArgument("arc_vector_q: dimension out of range");
  ArcVector out;
  out.dimension_index = i;
  out.centers = {0.0, 0.5};
  out.half_widths = {c, c};
  out.entries.resize(positions.n(), 0);
  for (std::size_t v = 0; v < positions.n(); ++v) {
    const double r = std::fabs(positions(v, i));
    if (r <= c) out.entries[v] = 1;
    else if (r >= 0.5 - c) out.entries[v] = -1;
  }
  out.degenerate = out.support_size() == 0;
  return out;
}

std::vector<ArcVector> arc_vectors_linf(const Positions& positions, std::size_t i, double xi) {
  if (!(xi > 0.0 && xi < 0.5)) throw InvalidArgument("arc_vectors_linf: xi must lie in (0, 1/2)");
  if (i >= positions.d()) throw InvalidArgument("arc_vectors_linf: dimension out of range");
  const auto m = static_cast<std::size_t>(std::floor(1.0 / xi));
  const double spacing = 0.5 / static_cast<double>(m);
  const double half = xi / 4.0;
  std::vector<ArcVector> out(m);
  for (std::size_t t = 0; t < m; ++t) {
    out[t].dimension_index = i;
    out[t].centers = {wrap_coordinate(static_cast<double>(t) * spacing),
                      wrap_coordinate(static_cast<double>(t) * spacing + 0.5)};
    out[t].half_widths = {half, half};
    out[t].entries.assign(positions.n(), 0);
  }
  for (std::size_t v = 0; v < positions.n(); ++v) {
    // Offset from the grid of 2m centers; slot j is the arc at j * spacing.
    const double x = positions(v, i) < 0.0 ? positions(v, i) + 1.0 : positions(v, i);
    const auto nearest = static_cast<long long>(std::floor(x / spacing + 0.5));
    for (long long j = nearest - 1; j <= nearest + 1; ++j) {
      const double center = static_cast<double>(j) * spacing;
      const double offset = x - center;
      if (offset >= -half && offset < half) {
        const auto slot = static_cast<std::size_t>(((j % static_cast<long long>(2 * m)) + 2 * m) % (2 * m));
        if (slot < m) out[slot].entries[v] = 1;
        else out[slot - m].entries[v] = -1;
        break;
      }
    }
  }
  for (auto& a : out) a.degenerate = a.support_size() == 0;
  return out;
}

std::size_t inter_cluster_edges(const AdjacencyMatrix& adjacency, const ArcVector& vector) {
  if (vector.entries.size() != adjacency.size()) throw InvalidArgument("inter_cluster_edges: size mismatch");
  std::vector<std::size_t> plus, minus;
  for (std::size_t v = 0; v < vector.entries.size(); ++v) {
    if (vector.entries[v] > 0) plus.push_back(v);
    if (vector.entries[v] < 0) minus.push_back(v);
  }
  std::size_t count = 0;
  for (std::size_t u : plus)
    for (std::size_t v : minus) count += adjacency(u, v) ? 1 : 0;
  return count;
}

double rayleigh(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& vector) {
  if (vector.size() != matrix.rows()) throw InvalidArgument("rayleigh: size mismatch");
  const double norm2 = vector.squaredNorm();
  if (norm2 == 0.0) throw InvalidArgument("rayleigh: zero vector");
  return vector.dot(matrix * vector) / norm2;
}

double gram_offdiag(std::span<const Eigen::VectorXd> vectors) {
  if (vectors.size() < 2) throw InvalidArgument("gram_offdiag: need at least two vectors");
  std::vector<Eigen::VectorXd> unit;
  unit.reserve(vectors.size());
  for (const auto& v : vectors) {
    const double norm = v.norm();
    unit.push_back(norm > 0.0 ? Eigen::VectorXd(v / norm) : v);
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < unit.size(); ++i)
    for (std::size_t j = i + 1; j < unit.size(); ++j) worst = std::max(worst, std::fabs(unit[i].dot(unit[j])));
  return worst;
}

std::vector<Eigen::VectorXd> gram_schmidt(std::span<const Eigen::VectorXd> vectors) {
  std::vector<Eigen::VectorXd> basis;
  for (const auto& v : vectors) {
    Eigen::VectorXd w = v;
    const double original = w.norm();
    if (original == 0.0) continue;
    for (const auto& b : basis) w -= b.dot(w) * b;
    const double norm = w.norm();
    if (norm <= 1e-10 * original) continue;
    basis.push_back(w / norm);
  }
  return basis;
}

LiftReport gram_schmidt_lift(const Eigen::MatrixXd& matrix, std::span<const Eigen::VectorXd> vectors,
                             double threshold) {
  LiftReport out;
  for (const auto& v : vectors) {
    if (v.norm() == 0.0) continue;
    out.rayleigh_before.push_back(rayleigh(matrix, v));
  }
  for (const auto& b : gram_schmidt(vectors)) out.rayleigh_after.push_back(rayleigh(matrix, b));
  out.above_before = static_cast<std::size_t>(
      std::count_if(out.rayleigh_before.begin(), out.rayleigh_before.end(), [&](double r) { return r >= threshold; }));
  out.above_after = static_cast<std::size_t>(
      std::count_if(out.rayleigh_after.begin(), out.rayleigh_after.end(), [&](double r) { return r >= threshold; }));
  return out;
}

}  // namespace rgg
