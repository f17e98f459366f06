#include "mlm/decomp.hpp"

#include <cmath>
#include <stdexcept>

#include "mlm/mvncdf.hpp"

namespace mlm {

namespace {

Eigen::VectorXd taps_of(const WindowMatrices& matrices) {
  return matrices.tap_column(0).segment(matrices.m, matrices.ell + 1);
}

}  // namespace

QLambda compute_q_lambda(const std::vector<Eigen::MatrixXd>& g_blocks, const Eigen::MatrixXd& k_w,
                         const SelectorMatrices& selectors) {
  const int n = static_cast<int>(g_blocks.size());
  if (n == 0) throw std::invalid_argument("compute_q_lambda: no blocks");
  const int d = 2 * selectors.m;
  const int out = static_cast<int>(g_blocks[0].rows());
  const int dim = d * n;
  if (k_w.rows() != n * out || k_w.cols() != n * out)
    throw std::invalid_argument("compute_q_lambda: K_W dimension mismatch");

  // J = blockdiag(G_i SS^T alpha0); the Appendix matrix is J^T K_W J,
  // symmetric PSD by construction.
  const Eigen::MatrixXd w = selectors.sst * selectors.alpha0;
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n * out, dim);
  for (int i = 0; i < n; ++i) j.block(i * out, i * d, out, d) = g_blocks[static_cast<size_t>(i)] * w;

  Eigen::MatrixXd fmat = j.transpose() * k_w * j;
  fmat = 0.5 * (fmat + fmat.transpose()).eval();
  SymEig eig = sym_eig(fmat);

  QLambda ql;
  ql.lambda.resize(dim);
  ql.lambda_pinv.resize(dim);
  const double lead = std::max(eig.values[0], 0.0);
  const double cutoff = lead * dim * std::pow(2.0, -46);
  ql.rank = 0;
  for (int i = 0; i < dim; ++i) {
    const double v = std::max(eig.values[i], 0.0);
    if (v > cutoff) {
      ql.lambda[i] = std::sqrt(v);
      ql.lambda_pinv[i] = 1.0 / ql.lambda[i];
      ++ql.rank;
    } else {
      ql.lambda[i] = 0.0;
      ql.lambda_pinv[i] = 0.0;
    }
  }

  // Q = (I_n (x) alpha0) beta.
  ql.q.resize(dim, dim);
  for (int i = 0; i < n; ++i)
    ql.q.middleRows(i * d, d) = selectors.alpha0 * eig.vectors.middleRows(i * d, d);
  return ql;
}

QLambda compute_q_lambda(const SymbolWindows& windows, const Eigen::MatrixXd& k_w,
                         const SelectorMatrices& selectors, const WindowMatrices& matrices) {
  std::vector<Eigen::MatrixXd> g_blocks;
  g_blocks.reserve(static_cast<size_t>(windows.n()));
  for (int i = 0; i < windows.n(); ++i)
    g_blocks.push_back(build_g(windows.window(i), matrices, selectors));
  return compute_q_lambda(g_blocks, k_w, selectors);
}

RealizationTerms compute_realization_terms(const SymbolWindows& windows, const Eigen::MatrixXd& k_w,
                                           const SelectorMatrices& selectors,
                                           const WindowMatrices& matrices,
                                           const Constraint& constraint,
                                           const QLambda* precomputed) {
  RealizationTerms rt;
  rt.n = windows.n();
  rt.m = selectors.m;
  rt.constraint = constraint;
  const int n = rt.n;
  const int d = 2 * selectors.m;
  const int out = matrices.out_len();
  const int dim = d * n;

  std::vector<Eigen::MatrixXd> g_blocks;
  g_blocks.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) g_blocks.push_back(build_g(windows.window(i), matrices, selectors));
  if (precomputed) {
    if (precomputed->q.rows() != dim)
      throw std::invalid_argument("compute_realization_terms: QLambda dimension mismatch");
    rt.ql = *precomputed;
  } else {
    rt.ql = compute_q_lambda(g_blocks, k_w, selectors);
  }

  const Eigen::VectorXd h0 = matrices.tap_column(0);
  const Eigen::VectorXd taps = taps_of(matrices);

  // D_h = diag(A_{t_i}) (x) h0^T, one noise-window block per row.
  Eigen::MatrixXd d_h = Eigen::MatrixXd::Zero(n, n * out);
  for (int i = 0; i < n; ++i) {
    const double a0 = windows.window(i)[matrices.center()];
    d_h.row(i).segment(i * out, out) = a0 * h0.transpose();
  }

  // F = D_h K_W blockdiag(G_i SS^T) Q Lambda^+.
  const Eigen::MatrixXd kd = d_h * k_w;
  Eigen::MatrixXd m1(n, dim);
  for (int i = 0; i < n; ++i)
    m1.middleCols(i * d, d) =
        kd.middleCols(i * out, out) * (g_blocks[static_cast<size_t>(i)] * selectors.sst);
  rt.f = (m1 * rt.ql.q) * rt.ql.lambda_pinv.asDiagonal();

  rt.theta.resize(n);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd a = windows.window(i);
    const double a0 = a[matrices.center()];
    const Eigen::VectorXd t_gap = matrices.t_ones - matrices.t * a;
    rt.theta[i] = a0 * t_gap.dot(h0) - h0.squaredNorm();
  }

  rt.k_v = d_h * k_w * d_h.transpose() - rt.f * rt.f.transpose();
  rt.k_v = 0.5 * (rt.k_v + rt.k_v.transpose()).eval();

  rt.q_lambda.reserve(static_cast<size_t>(n));
  rt.mu_lin.reserve(static_cast<size_t>(n));
  rt.nu_lin.reserve(static_cast<size_t>(n));
  rt.dp.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd a = windows.window(i);
    rt.q_lambda.push_back(rt.ql.q.middleRows(i * d, d) * rt.ql.lambda.asDiagonal());
    rt.mu_lin.push_back(mu_linear(a, g_blocks[static_cast<size_t>(i)], matrices));
    rt.nu_lin.push_back(nu_linear(a, g_blocks[static_cast<size_t>(i)], matrices));
    rt.dp.push_back(make_dp_instance(a, taps, selectors.m));
  }

  if (constraint.kind == Constraint::Kind::custom) {
    rt.brute_force = true;
    if (selectors.m > 8)
      throw std::invalid_argument("estimator: custom constraints use selector enumeration, m <= 8");
    rt.s_dense = selectors.dense_s();
    const long count = rt.s_dense.cols();
    const int inner_lo = matrices.ell;  // window index of offset -m
    const int inner_len = 2 * selectors.m + 1;
    std::vector<std::int8_t> word(static_cast<size_t>(inner_len));
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd a = windows.window(i);
      const Eigen::MatrixXd gs = g_blocks[static_cast<size_t>(i)] * rt.s_dense;
      const Eigen::VectorXd norms = gs.colwise().squaredNorm().transpose();
      rt.mu_full.push_back(rt.s_dense.transpose() * rt.mu_lin[static_cast<size_t>(i)] - norms);
      rt.nu_full.push_back(rt.s_dense.transpose() * rt.nu_lin[static_cast<size_t>(i)] - norms);
      std::vector<std::uint32_t> keep_y, keep_x;
      for (long k = 0; k < count; ++k) {
        for (int flip = 0; flip < 2; ++flip) {
          const Eigen::VectorXd cand = selector_to_candidate(a, rt.s_dense.col(k), flip != 0, selectors);
          for (int pp = 0; pp < inner_len; ++pp)
            word[static_cast<size_t>(pp)] =
                static_cast<std::int8_t>(cand[inner_lo + pp] > 0 ? 1 : -1);
          if (constraint.word_admissible(word)) {
            if (flip)
              keep_x.push_back(static_cast<std::uint32_t>(k));
            else
              keep_y.push_back(static_cast<std::uint32_t>(k));
          }
        }
      }
      if (keep_y.empty() || keep_x.empty())
        throw std::runtime_error("estimator: constraint admits no candidate at an instant");
      rt.adm_y.push_back(std::move(keep_y));
      rt.adm_x.push_back(std::move(keep_x));
    }
  }
  return rt;
}

void TrialWorkspace::prepare(const RealizationTerms& rt) {
  dp = rt.dp;
  delta.resize(rt.n);
  eta.resize(rt.n);
  base.resize(2 * rt.m);
  if (rt.brute_force) st_c.resize(rt.s_dense.cols());
}

void compute_trial_terms(const RealizationTerms& rt, const Eigen::VectorXd& u, TrialWorkspace& ws) {
  const int n = rt.n;
  for (int i = 0; i < n; ++i) {
    const size_t si = static_cast<size_t>(i);
    ws.base.noalias() = rt.q_lambda[si] * u;
    double max_y, max_x;
    if (rt.brute_force) {
      ws.st_c.noalias() = rt.s_dense.transpose() * ws.base;
      max_y = -std::numeric_limits<double>::infinity();
      for (std::uint32_t k : rt.adm_y[si]) max_y = std::max(max_y, ws.st_c[k] + rt.mu_full[si][k]);
      max_x = -std::numeric_limits<double>::infinity();
      for (std::uint32_t k : rt.adm_x[si]) max_x = std::max(max_x, ws.st_c[k] + rt.nu_full[si][k]);
    } else if (rt.constraint.kind == Constraint::Kind::none) {
      ws.dp[si].c = ws.base + rt.mu_lin[si];
      max_y = dp_max(ws.dp[si]);
      ws.dp[si].c = ws.base + rt.nu_lin[si];
      max_x = dp_max(ws.dp[si]);
    } else {
      ws.dp[si].c = ws.base + rt.mu_lin[si];
      max_y = dp_max_constrained(ws.dp[si], rt.constraint, false);
      ws.dp[si].c = ws.base + rt.nu_lin[si];
      max_x = dp_max_constrained(ws.dp[si], rt.constraint, true);
      if (max_y == kDpNegInf || max_x == kDpNegInf)
        throw std::runtime_error("compute_trial_terms: constraint admits no selector");
    }
    ws.delta[i] = max_y - max_x;
  }
  ws.eta.noalias() = rt.f * u;
  ws.eta += rt.theta;
}

TrialTerms compute_trial_terms(const QLambda& ql, const SymbolWindows& windows,
                               const Eigen::MatrixXd& k_w, const SelectorMatrices& selectors,
                               const WindowMatrices& matrices, const Eigen::VectorXd& u,
                               const Constraint& constraint) {
  RealizationTerms rt =
      compute_realization_terms(windows, k_w, selectors, matrices, constraint, &ql);
  TrialWorkspace ws;
  ws.prepare(rt);
  compute_trial_terms(rt, u, ws);
  TrialTerms out;
  out.delta = ws.delta;
  out.eta = ws.eta;
  out.k_v = rt.k_v;
  return out;
}

}  // namespace mlm
