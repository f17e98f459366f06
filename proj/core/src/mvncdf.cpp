#include "mlm/mvncdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace mlm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Gauss-Legendre nodes/weights on [0,1], cached per order.
struct GlRule {
  std::vector<double> x, w;
};

GlRule make_gl_rule(int n) {
  GlRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton iteration on P_n over [-1,1], Chebyshev initial guess.
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      double step = p1 / dp;
      t -= step;
      if (std::abs(step) < 1e-15) break;
    }
    rule.x[i] = 0.5 * (1.0 + t);
    rule.w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
  return rule;
}

const GlRule& gl48() {
  static const GlRule rule = make_gl_rule(48);
  return rule;
}

uint64_t splitmix64(uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic low-discrepancy rule: 8 fixed Cranley-Patterson shifts of a
// 512-point Kronecker (sqrt-prime) sequence, 4096 nodes total.
constexpr int kQmcShifts = 8;
constexpr int kQmcPointsPerShift = 512;
constexpr int kQmcMaxDim = 15;

struct QmcTable {
  double alpha[kQmcMaxDim];
  double shift[kQmcShifts][kQmcMaxDim];
};

const QmcTable& qmc_table() {
  static const QmcTable table = []() {
    QmcTable t;
    const int primes[kQmcMaxDim] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47};
    for (int i = 0; i < kQmcMaxDim; ++i) {
      double s = std::sqrt(static_cast<double>(primes[i]));
      t.alpha[i] = s - std::floor(s);
    }
    uint64_t state = 0x6d766e63646620ULL;
    for (int s = 0; s < kQmcShifts; ++s)
      for (int d = 0; d < kQmcMaxDim; ++d)
        t.shift[s][d] = (splitmix64(state) >> 11) * 0x1.0p-53;
    return t;
  }();
  return table;
}

double frac(double v) { return v - std::floor(v); }

}  // namespace

double norm_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2_v<double> / 2.0); }

double norm_ppf(double p) {
  if (std::isnan(p)) throw std::invalid_argument("norm_ppf: NaN argument");
  if (p <= 0.0) return -kInf;
  if (p >= 1.0) return kInf;
  // Wichura, Algorithm AS 241 (PPND16).
  const double q = p - 0.5;
  double r, x;
  if (std::abs(q) <= 0.425) {
    r = 0.180625 - q * q;
    x = q *
        (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
              6.7265770927008700853e4) *
                 r +
             4.5921953931549871457e4) *
                r +
            1.3731693765509461125e4) *
               r +
           1.9715909503065514427e3) *
              r +
          1.3314166789178437745e2) *
             r +
         3.3871328727963666080e0) /
        (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
              3.9307895800092710610e4) *
                 r +
             2.1213794301586595867e4) *
                r +
            5.3941960214247511077e3) *
               r +
           6.8718700749205790830e2) *
              r +
          4.2313330701600911252e1) *
             r +
         1.0);
    return x;
  }
  r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  if (r <= 5.0) {
    r -= 1.6;
    x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) *
                 r +
             1.27045825245236838258e0) *
                r +
            3.64784832476320460504e0) *
               r +
           5.76949722146069140550e0) *
              r +
          4.63033784615654529590e0) *
             r +
         1.42343711074968357734e0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) *
                 r +
             1.48103976427480074590e-1) *
                r +
            6.89767334985100004550e-1) *
               r +
           1.67638483018380384940e0) *
              r +
          2.05319162663775882187e0) *
             r +
         1.0);
  } else {
    r -= 5.0;
    x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) *
                 r +
             2.65321895265761230930e-2) *
                r +
            2.96560571828504891230e-1) *
               r +
           1.78482653991729133580e0) *
              r +
          5.46378491116411436990e0) *
             r +
         6.65790464350110377720e0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) *
                 r +
             7.86869131145613259100e-4) *
                r +
            1.48753612908506148525e-2) *
               r +
           1.36929880922735805310e-1) *
              r +
          5.99832206555887937690e-1) *
             r +
         1.0);
  }
  return (q < 0.0) ? -x : x;
}

double bvn_cdf(double h, double k, double rho) {
  if (std::isnan(h) || std::isnan(k) || std::isnan(rho))
    throw std::invalid_argument("bvn_cdf: NaN argument");
  if (h == -kInf || k == -kInf) return 0.0;
  if (h == kInf) return norm_cdf(k);
  if (k == kInf) return norm_cdf(h);
  rho = std::clamp(rho, -1.0, 1.0);
  if (rho == 0.0) return norm_cdf(h) * norm_cdf(k);
  if (rho >= 1.0) return norm_cdf(std::min(h, k));
  if (rho <= -1.0) return std::max(0.0, norm_cdf(h) - norm_cdf(-k));

  // Drezner-Wesolowsky integral over t = sin(theta):
  //   P = Phi(h)Phi(k) + 1/(2 pi) * int_0^{asin rho}
  //         exp(-(h^2 + k^2 - 2 h k sin th) / (2 cos^2 th)) dth.
  // The sine substitution keeps the integrand smooth up to |rho| -> 1.
  const double upper = std::asin(rho);
  const GlRule& gl = gl48();
  double sum = 0.0;
  for (size_t i = 0; i < gl.x.size(); ++i) {
    double th = upper * gl.x[i];
    double s = std::sin(th);
    double c2 = 1.0 - s * s;
    sum += gl.w[i] * std::exp(-(h * h + k * k - 2.0 * h * k * s) / (2.0 * c2));
  }
  double p = norm_cdf(h) * norm_cdf(k) + upper * sum / (2.0 * std::numbers::pi);
  return std::clamp(p, 0.0, 1.0);
}

SymEig sym_eig(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("sym_eig: matrix not square");
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("sym_eig: matrix not symmetric within tolerance");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (m + m.transpose()));
  if (solver.info() != Eigen::Success) throw std::runtime_error("sym_eig: eigensolver failed to converge");
  SymEig out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

CdfEvaluator::CdfEvaluator(const Eigen::MatrixXd& k, double tol) : tol_(tol) {
  n_ = static_cast<int>(k.rows());
  if (n_ == 0) {
    path_ = Path::empty;
    return;
  }
  if (n_ > 16) throw std::invalid_argument("mvn_cdf: dimension above 16 unsupported");
  if (k.cols() != n_) throw std::invalid_argument("mvn_cdf: covariance not square");
  k_ = k;

  const double trace = std::max(k.trace(), 0.0);
  const double det_tol = 1e-12 * std::max(trace, 1e-300);

  if (trace <= 0.0) {
    path_ = Path::deterministic;
    rank_ = 0;
    return;
  }

  // Diagonal (including zero-variance coordinates): product of marginals.
  bool diagonal = true;
  for (int i = 0; i < n_ && diagonal; ++i)
    for (int j = i + 1; j < n_ && diagonal; ++j)
      if (std::abs(k(i, j)) > 1e-13 * std::sqrt(std::max(k(i, i) * k(j, j), det_tol * det_tol)))
        diagonal = false;
  if (diagonal) {
    path_ = Path::diagonal;
    diag_sd_.resize(n_);
    rank_ = 0;
    for (int i = 0; i < n_; ++i) {
      diag_sd_[i] = (k(i, i) > det_tol) ? std::sqrt(k(i, i)) : 0.0;
      if (diag_sd_[i] > 0.0) ++rank_;
    }
    return;
  }

  SymEig eig = sym_eig(k);
  if (eig.values.minCoeff() < -1e-10 * trace)
    throw std::invalid_argument("mvn_cdf: covariance indefinite beyond clamping tolerance");

  rank_ = 0;
  while (rank_ < n_ && eig.values[rank_] > det_tol) ++rank_;
  if (rank_ == 0) {
    path_ = Path::deterministic;
    return;
  }

  l_.resize(n_, rank_);
  for (int j = 0; j < rank_; ++j) l_.col(j) = eig.vectors.col(j) * std::sqrt(eig.values[j]);

  if (rank_ == 1) {
    path_ = Path::rank_one;
    return;
  }

  // Coordinates whose whole variance sits in the clamped subspace behave as
  // deterministic; they are peeled off inside evaluate_reduced via L's rows.
  if (n_ == 2) {
    path_ = Path::bivariate;
    sd0_ = std::sqrt(k(0, 0));
    sd1_ = std::sqrt(k(1, 1));
    rho_ = std::clamp(k(0, 1) / (sd0_ * sd1_), -1.0, 1.0);
    return;
  }

  // Count live rows: rows of L with non-negligible norm.
  int live = 0;
  const double row_tol = 1e-7 * std::sqrt(eig.values[0]);
  for (int i = 0; i < n_; ++i)
    if (l_.row(i).norm() > row_tol) ++live;

  if (live == rank_) {
    // Full-rank on the live coordinates: Genz sequential rule on a Cholesky
    // factor, coordinates ordered by ascending standardized limit at eval time
    // is skipped; a fixed variance-based order keeps the factorization static.
    std::vector<int> live_idx;
    for (int i = 0; i < n_; ++i)
      if (l_.row(i).norm() > row_tol) live_idx.push_back(i);
    Eigen::MatrixXd sub(live, live);
    for (int a = 0; a < live; ++a)
      for (int b = 0; b < live; ++b) sub(a, b) = k(live_idx[a], live_idx[b]);
    Eigen::LLT<Eigen::MatrixXd> llt(sub);
    if (llt.info() == Eigen::Success) {
      path_ = Path::qmc_full;
      chol_ = llt.matrixL();
      order_ = live_idx;
      return;
    }
  }
  path_ = Path::qmc_degenerate;
}

MvnResult CdfEvaluator::evaluate(const Eigen::VectorXd& x) const {
  if (static_cast<int>(x.size()) != n_)
    throw std::invalid_argument("mvn_cdf: point dimension mismatch");
  for (int i = 0; i < n_; ++i) {
    if (std::isnan(x[i])) throw std::invalid_argument("mvn_cdf: NaN coordinate");
    if (x[i] == -kInf) return {0.0, 0.0};
  }
  bool has_inf = false;
  for (int i = 0; i < n_; ++i) has_inf |= (x[i] == kInf);
  if (has_inf) {
    // Drop the +inf coordinates and solve the reduced problem one-shot.
    std::vector<int> keep;
    for (int i = 0; i < n_; ++i)
      if (x[i] != kInf) keep.push_back(i);
    if (keep.empty()) return {1.0, 0.0};
    Eigen::MatrixXd ksub(keep.size(), keep.size());
    Eigen::VectorXd xsub(keep.size());
    for (size_t a = 0; a < keep.size(); ++a) {
      xsub[a] = x[keep[a]];
      for (size_t b = 0; b < keep.size(); ++b) ksub(a, b) = k_(keep[a], keep[b]);
    }
    return CdfEvaluator(ksub, tol_).evaluate(xsub);
  }
  return evaluate_reduced(x);
}

MvnResult CdfEvaluator::evaluate_reduced(const Eigen::VectorXd& x) const {
  switch (path_) {
    case Path::empty:
      return {1.0, 0.0};
    case Path::deterministic: {
      for (int i = 0; i < n_; ++i)
        if (x[i] < 0.0) return {0.0, 0.0};
      return {1.0, 0.0};
    }
    case Path::diagonal: {
      double p = 1.0;
      for (int i = 0; i < n_; ++i) {
        if (diag_sd_[i] == 0.0) {
          if (x[i] < 0.0) return {0.0, 0.0};
        } else {
          p *= norm_cdf(x[i] / diag_sd_[i]);
        }
      }
      return {std::clamp(p, 0.0, 1.0), 1e-14};
    }
    case Path::rank_one: {
      // Y = l * xi with xi ~ N(0,1): an interval in xi plus indicators.
      double lo = -kInf, hi = kInf;
      const double row_tol = 1e-13 * l_.col(0).cwiseAbs().maxCoeff();
      for (int i = 0; i < n_; ++i) {
        double c = l_(i, 0);
        if (std::abs(c) <= row_tol) {
          if (x[i] < 0.0) return {0.0, 0.0};
        } else if (c > 0.0) {
          hi = std::min(hi, x[i] / c);
        } else {
          lo = std::max(lo, x[i] / c);
        }
      }
      double p = std::max(0.0, norm_cdf(hi) - norm_cdf(lo));
      return {std::clamp(p, 0.0, 1.0), 1e-14};
    }
    case Path::bivariate: {
      double p = bvn_cdf(x[0] / sd0_, x[1] / sd1_, rho_);
      return {p, 1e-12};
    }
    case Path::qmc_full:
    case Path::qmc_degenerate:
      break;
  }

  const QmcTable& table = qmc_table();
  double shift_mean[kQmcShifts];

  if (path_ == Path::qmc_full) {
    // Genz sequential conditioning; smooth integrand over dim-1 QMC variables.
    const int dim = static_cast<int>(order_.size());
    Eigen::VectorXd b(dim);
    for (int i = 0; i < dim; ++i) b[i] = x[order_[i]];
    Eigen::VectorXd y(dim);
    for (int s = 0; s < kQmcShifts; ++s) {
      double acc = 0.0;
      for (int pt = 1; pt <= kQmcPointsPerShift; ++pt) {
        double f = norm_cdf(b[0] / chol_(0, 0));
        double e_prev = f;
        for (int i = 1; i < dim; ++i) {
          double u = frac(table.shift[s][i - 1] + pt * table.alpha[i - 1]);
          y[i - 1] = norm_ppf(std::min(std::max(u * e_prev, 1e-300), 1.0 - 1e-16));
          double t = b[i];
          for (int j = 0; j < i; ++j) t -= chol_(i, j) * y[j];
          e_prev = norm_cdf(t / chol_(i, i));
          f *= e_prev;
        }
        acc += f;
      }
      shift_mean[s] = acc / kQmcPointsPerShift;
    }
  } else {
    // Degenerate case: n live constraints in rank_ < n dimensions. QMC over
    // the first rank_-1 normal coordinates, the last handled as an interval.
    const int dfree = rank_ - 1;
    Eigen::VectorXd xi(std::max(dfree, 1));
    const double ctol = 1e-13 * l_.cwiseAbs().maxCoeff();
    for (int s = 0; s < kQmcShifts; ++s) {
      double acc = 0.0;
      for (int pt = 1; pt <= kQmcPointsPerShift; ++pt) {
        for (int d = 0; d < dfree; ++d) {
          double u = frac(table.shift[s][d] + pt * table.alpha[d]);
          xi[d] = norm_ppf(std::min(std::max(u, 1e-300), 1.0 - 1e-16));
        }
        double lo = -kInf, hi = kInf;
        bool feasible = true;
        for (int i = 0; i < n_ && feasible; ++i) {
          double rem = x[i];
          for (int d = 0; d < dfree; ++d) rem -= l_(i, d) * xi[d];
          double c = l_(i, dfree);
          if (std::abs(c) <= ctol) {
            feasible = (rem >= 0.0);
          } else if (c > 0.0) {
            hi = std::min(hi, rem / c);
          } else {
            lo = std::max(lo, rem / c);
          }
        }
        if (feasible && hi > lo) acc += norm_cdf(hi) - norm_cdf(lo);
      }
      shift_mean[s] = acc / kQmcPointsPerShift;
    }
  }

  double mean = 0.0;
  for (double v : shift_mean) mean += v;
  mean /= kQmcShifts;
  double var = 0.0;
  for (double v : shift_mean) var += (v - mean) * (v - mean);
  var /= (kQmcShifts - 1);
  double err = 3.0 * std::sqrt(var / kQmcShifts);
  return {std::clamp(mean, 0.0, 1.0), err};
}

MvnResult mvn_cdf(const GaussianCdfProblem& problem) {
  return CdfEvaluator(problem.k, problem.tol).evaluate(problem.x);
}

MvnResult mvn_cdf(const Eigen::MatrixXd& k, const Eigen::VectorXd& x, double tol) {
  return CdfEvaluator(k, tol).evaluate(x);
}

}  // namespace mlm
