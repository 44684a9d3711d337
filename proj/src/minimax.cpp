#include "lipdev/minimax.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "lipdev/common.hpp"

namespace lipdev {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-12;
constexpr long kDantzigIterations = 20000;
constexpr long kMaxIterations = 200000;

struct Tableau {
  Eigen::MatrixXd T;       // rows: constraints, last column: rhs
  Eigen::RowVectorXd d;    // reduced costs (maximisation)
  double value = 0.0;      // current objective
  std::vector<Eigen::Index> basis;
  Eigen::Index allowed = 0;  // columns >= allowed may not enter

  Eigen::Index rhs() const { return T.cols() - 1; }

  void pivot(Eigen::Index r, Eigen::Index c) {
    T.row(r) /= T(r, c);
    for (Eigen::Index i = 0; i < T.rows(); ++i)
      if (i != r && T(i, c) != 0.0) T.row(i) -= T(i, c) * T.row(r);
    const double dc = d(c);
    d -= dc * T.row(r).head(d.size());
    value += dc * T(r, rhs());
    basis[static_cast<std::size_t>(r)] = c;
  }

  // Returns false when unbounded.
  bool run(long& iterations) {
    while (true) {
      if (++iterations > kMaxIterations) throw NumericError("simplex: iteration limit reached");
      const bool bland = iterations > kDantzigIterations;
      Eigen::Index enter = -1;
      double best = kCostTol;
      for (Eigen::Index j = 0; j < allowed; ++j) {
        if (d(j) > best) {
          enter = j;
          if (bland) break;
          best = d(j);
        }
      }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < T.rows(); ++i) {
        const double a = T(i, enter);
        if (a <= kPivotTol) continue;
        const double q = T(i, rhs()) / a;
        if (q < ratio || (q == ratio && basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
          ratio = q;
          leave = i;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }
};

}  // namespace

double simplex_max(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                   Eigen::VectorXd* z) {
  const Eigen::Index m = A.rows();
  const Eigen::Index nv = A.cols();
  if (b.size() != m || c.size() != nv) throw ConfigError("simplex: shape mismatch");
  if ((b.array() < 0).any()) throw ConfigError("simplex: right-hand side must be nonnegative");

  Tableau tab;
  tab.T = Eigen::MatrixXd::Zero(m, nv + m + 1);
  tab.T.leftCols(nv) = A;
  tab.T.block(0, nv, m, m).setIdentity();
  tab.T.col(nv + m) = b;
  tab.basis.resize(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) tab.basis[static_cast<std::size_t>(i)] = nv + i;

  // Phase 1: maximise -sum(artificials).
  tab.d = Eigen::RowVectorXd::Zero(nv + m);
  tab.d.head(nv) = A.colwise().sum();
  tab.value = -b.sum();
  tab.allowed = nv;
  long iterations = 0;
  tab.run(iterations);
  const double scale = std::max(1.0, b.cwiseAbs().sum());
  if (tab.value < -1e-9 * scale) throw NumericError("simplex: infeasible program");

  // Drive remaining artificials out; rows that cannot pivot are redundant.
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (tab.basis[static_cast<std::size_t>(i)] < nv) {
      keep.push_back(i);
      continue;
    }
    Eigen::Index col = -1;
    double best = kPivotTol * 1e3;
    for (Eigen::Index j = 0; j < nv; ++j)
      if (std::abs(tab.T(i, j)) > best) {
        best = std::abs(tab.T(i, j));
        col = j;
      }
    if (col >= 0) {
      tab.pivot(i, col);
      keep.push_back(i);
    }
  }
  if (static_cast<Eigen::Index>(keep.size()) < m) {
    Eigen::MatrixXd T2(static_cast<Eigen::Index>(keep.size()), tab.T.cols());
    std::vector<Eigen::Index> basis2;
    for (std::size_t k = 0; k < keep.size(); ++k) {
      T2.row(static_cast<Eigen::Index>(k)) = tab.T.row(keep[k]);
      basis2.push_back(tab.basis[static_cast<std::size_t>(keep[k])]);
    }
    tab.T = std::move(T2);
    tab.basis = std::move(basis2);
  }

  // Phase 2 with the true objective.
  tab.d = Eigen::RowVectorXd::Zero(nv + m);
  tab.d.head(nv) = c.transpose();
  tab.value = 0.0;
  for (Eigen::Index i = 0; i < tab.T.rows(); ++i) {
    const Eigen::Index bj = tab.basis[static_cast<std::size_t>(i)];
    const double cb = bj < nv ? c(bj) : 0.0;
    if (cb == 0.0) continue;
    tab.d -= cb * tab.T.row(i).head(nv + m);
    tab.value += cb * tab.T(i, tab.rhs());
  }
  if (!tab.run(iterations)) throw NumericError("simplex: unbounded program");

  if (z) {
    *z = Eigen::VectorXd::Zero(nv);
    for (Eigen::Index i = 0; i < tab.T.rows(); ++i) {
      const Eigen::Index bj = tab.basis[static_cast<std::size_t>(i)];
      if (bj < nv) (*z)(bj) = tab.T(i, tab.rhs());
    }
  }
  return tab.value;
}

double discrete_minimax(const Eigen::MatrixXd& B, const Eigen::VectorXd& f) {
  const Eigen::Index P = B.rows();
  const Eigen::Index k = B.cols();
  if (f.size() != P) throw ConfigError("minimax: shape mismatch");
  if (P == 0) return 0.0;
  const double fmax = f.cwiseAbs().maxCoeff();
  if (fmax == 0.0) return 0.0;
  if (k == 0) return fmax;

  // Variables w = u - v, u, v >= 0.
  Eigen::MatrixXd A(k + 1, 2 * P);
  A.topLeftCorner(k, P) = B.transpose();
  A.topRightCorner(k, P) = -B.transpose();
  A.row(k).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(k + 1);
  b(k) = 1.0;
  Eigen::VectorXd c(2 * P);
  c.head(P) = f / fmax;
  c.tail(P) = -f / fmax;
  return std::max(0.0, simplex_max(A, b, c)) * fmax;
}

}  // namespace lipdev
