#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "mlm/detector.hpp"
#include "mlm/rng.hpp"
#include "mlm/selectors.hpp"

using namespace mlm;

namespace {

Eigen::VectorXd random_pm1(RngStream& rng, int len) {
  Eigen::VectorXd v(len);
  for (int i = 0; i < len; ++i) v[i] = rng.sign();
  return v;
}

// Independent summation oracle for one banded row applied to a selector:
// sum_{j=0..ell} h_j a_{tau-j} s_{tau-j} with s_0 = 0 and s out of range 0.
double banded_row_oracle(const Eigen::VectorXd& taps, const Eigen::VectorXd& a,
                         const Eigen::VectorXd& s, int m, int tau) {
  const int ell = static_cast<int>(taps.size()) - 1;
  double acc = 0.0;
  for (int j = 0; j <= ell; ++j) {
    const int kappa = tau - j;
    if (kappa == 0 || std::abs(kappa) > m) continue;
    const int coord = kappa < 0 ? kappa + m : kappa + m - 1;
    acc += taps[j] * a[kappa + m + ell] * s[coord];
  }
  return acc;
}

}  // namespace

TEST_CASE("selector matrices: E layout and analytic SS^T") {
  SelectorMatrices sel = build_selectors(1, 1);
  CHECK(sel.e.rows() == 5);
  CHECK(sel.e.cols() == 2);
  // e_{-1} has its one at window index 1, e_{+1} at index 3 (center 2).
  CHECK(sel.e(1, 0) == 1.0);
  CHECK(sel.e(3, 1) == 1.0);
  CHECK(sel.e.sum() == 2.0);

  Eigen::MatrixXd want(2, 2);
  want << 2, 1, 1, 2;
  CHECK((sel.sst - want).norm() == 0.0);

  // m=3: the analytic form equals the explicit sum over all 64 columns.
  SelectorMatrices sel3 = build_selectors(3, 2);
  const Eigen::MatrixXd s = sel3.dense_s();
  CHECK(s.cols() == 64);
  CHECK((s * s.transpose() - sel3.sst).norm() == 0.0);
  const Eigen::MatrixXd expect =
      16.0 * (Eigen::MatrixXd::Identity(6, 6) + Eigen::MatrixXd::Ones(6, 6));
  CHECK((sel3.sst - expect).norm() == 0.0);

  // Whitener: alpha0^T SS^T alpha0 = I, and the m=1 closed form.
  for (int m = 1; m <= 4; ++m) {
    SelectorMatrices sm = build_selectors(m, 1);
    const Eigen::MatrixXd gram = sm.alpha0.transpose() * sm.sst * sm.alpha0;
    CHECK((gram - Eigen::MatrixXd::Identity(2 * m, 2 * m)).norm() < 1e-12);
  }
  Eigen::VectorXd c0 = sel.alpha0.col(0), c1 = sel.alpha0.col(1);
  const double r2 = 1.0 / std::sqrt(2.0), r6 = 1.0 / std::sqrt(6.0);
  CHECK(std::abs(std::abs(c0[0]) - r2) < 1e-12);
  CHECK(c0[0] == doctest::Approx(-c0[1]).epsilon(1e-12));
  CHECK(std::abs(std::abs(c1[0]) - r6) < 1e-12);
  CHECK(c1[0] == doctest::Approx(c1[1]).epsilon(1e-12));
}

TEST_CASE("G matrix: columns, band structure, row identity") {
  ChannelModel dicode({1.0, -1.0});
  WindowMatrices wm = build_window_matrices(dicode, 1);
  SelectorMatrices sel = build_selectors(1, 1);

  const Eigen::MatrixXd g = build_g(Eigen::VectorXd::Ones(5), wm, sel);
  CHECK((g.col(0) - wm.tap_column(-1)).norm() == 0.0);
  CHECK((g.col(1) - wm.tap_column(1)).norm() == 0.0);

  RngStream rng(3, 1);
  for (const auto& taps : {std::vector<double>{1.0, 1.0}, std::vector<double>{1.0, 2.0, 1.0}}) {
    ChannelModel ch(taps);
    for (int m : {1, 2, 3}) {
      WindowMatrices w = build_window_matrices(ch, m);
      SelectorMatrices s = build_selectors(m, ch.memory());
      for (int trial = 0; trial < 50; ++trial) {
        const Eigen::VectorXd a = random_pm1(rng, w.win_len());
        const Eigen::MatrixXd gm = build_g(a, w, s);
        // (ell+1)-banded: row tau only touches offsets tau-ell..tau.
        for (int r = 0; r < gm.rows(); ++r) {
          const int tau = r - m;
          for (int p = 0; p < gm.cols(); ++p) {
            const int off = s.offset_of(p);
            if (off > tau || off < tau - ch.memory()) CHECK(gm(r, p) == 0.0);
          }
        }
        // Row sums against the independent summation oracle.
        Eigen::VectorXd sv(2 * m);
        for (int p = 0; p < 2 * m; ++p) sv[p] = static_cast<double>(rng.next_u64() & 1u);
        const Eigen::VectorXd gs = gm * sv;
        for (int r = 0; r < gm.rows(); ++r) {
          const double want = banded_row_oracle(ch.taps, a, sv, m, r - m);
          CHECK(gs[r] == doctest::Approx(want).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("mu/nu vectors: zero selector, all-ones window, dicode value") {
  ChannelModel dicode({1.0, -1.0});
  WindowMatrices wm = build_window_matrices(dicode, 1);
  SelectorMatrices sel = build_selectors(1, 1);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(5);
  MuNu mn = compute_mu_nu(ones, wm, sel);

  CHECK(mn.mu[0] == 0.0);  // s_0 = 0
  CHECK(mn.nu[0] == 0.0);

  // All-ones window: T(1-a) = 0, so mu_k = -|G s_k|^2.
  const Eigen::MatrixXd g = build_g(ones, wm, sel);
  const Eigen::MatrixXd s = sel.dense_s();
  for (long k = 0; k < s.cols(); ++k)
    CHECK(mn.mu[k] == doctest::Approx(-(g * s.col(k)).squaredNorm()).epsilon(1e-12));

  // s = [1,0] (k=1): mu = -|h_{-1}|^2 = -2; nu = mu - 2 a0 h0.h_{-1}.
  // Recomputed from the hand-written padded vectors: h0 = [0,1,-1,0],
  // h_{-1} = [1,-1,0,0] so h0.h_{-1} = -1 and nu = -2 + 2 = 0.
  Eigen::VectorXd h0(4), hm1(4);
  h0 << 0, 1, -1, 0;
  hm1 << 1, -1, 0, 0;
  CHECK(mn.mu[1] == doctest::Approx(-hm1.squaredNorm()).epsilon(1e-12));      // -2
  CHECK(mn.nu[1] == doctest::Approx(-2.0 - 2.0 * h0.dot(hm1)).epsilon(1e-12));  // 0
  CHECK(mn.nu[1] == doctest::Approx(0.0));
}

TEST_CASE("selector_to_candidate: identities and bijection onto M") {
  ChannelModel pr1({1.0, 1.0});
  for (int m : {1, 2, 3}) {
    WindowMatrices wm = build_window_matrices(pr1, m);
    SelectorMatrices sel = build_selectors(m, 1);
    const Eigen::VectorXd a = Eigen::VectorXd::Ones(wm.win_len());
    const Eigen::VectorXd zero_s = Eigen::VectorXd::Zero(2 * m);
    CHECK((selector_to_candidate(a, zero_s, false, sel) - a).norm() == 0.0);
    Eigen::VectorXd center_flipped = a;
    center_flipped[wm.center()] = -1.0;
    CHECK((selector_to_candidate(a, zero_s, true, sel) - center_flipped).norm() == 0.0);

    // Enumerating (s, flip) hits each element of M exactly once.
    const Eigen::MatrixXd s = sel.dense_s();
    std::vector<std::vector<double>> images;
    for (long k = 0; k < s.cols(); ++k)
      for (bool flip : {false, true}) {
        const Eigen::VectorXd c = selector_to_candidate(a, s.col(k), flip, sel);
        images.emplace_back(c.data(), c.data() + c.size());
      }
    std::sort(images.begin(), images.end());
    CHECK(std::adjacent_find(images.begin(), images.end()) == images.end());

    std::vector<std::vector<double>> m_set;
    for (const auto& c : CandidateSet(m, 1).enumerate())
      m_set.emplace_back(c.data(), c.data() + c.size());
    std::sort(m_set.begin(), m_set.end());
    CHECK(images == m_set);
  }
}

TEST_CASE("bridge identity: selector maxima reproduce the detector's X and Y") {
  RngStream rng(17, 0);
  for (const auto& taps : {std::vector<double>{1.0, 1.0}, std::vector<double>{1.0, -1.0},
                           std::vector<double>{1.0, 2.0, 1.0}}) {
    ChannelModel ch(taps);
    const int ell = ch.memory();
    for (int m : {1, 2, 3}) {
      WindowMatrices wm = build_window_matrices(ch, m);
      SelectorMatrices sel = build_selectors(m, ell);
      CandidateSet cand(m, ell);
      const Eigen::MatrixXd s = sel.dense_s();
      const Eigen::VectorXd h0 = wm.tap_column(0);
      for (int trial = 0; trial < 40; ++trial) {
        // Both boundary-respecting (in M) and fully random windows.
        Eigen::VectorXd a = random_pm1(rng, wm.win_len());
        if (trial % 2 == 0)
          for (int j = 0; j < ell; ++j) a[j] = a[wm.win_len() - 1 - j] = 1.0;
        Eigen::VectorXd w(wm.out_len());
        for (int i = 0; i < w.size(); ++i) w[i] = 1.3 * rng.normal();

        const Eigen::MatrixXd g = build_g(a, wm, sel);
        MuNu mn = compute_mu_nu(a, wm, sel);
        const Eigen::VectorXd gs_w = (g * s).transpose() * w;

        const double y_sel = (gs_w + mn.mu).maxCoeff();
        const double a0 = a[wm.center()];
        const Eigen::VectorXd t_gap = wm.t_ones - wm.t * a;
        const double v_t = a0 * h0.dot(w);
        const double theta = a0 * t_gap.dot(h0) - h0.squaredNorm();
        const double x_sel = (gs_w + mn.nu).maxCoeff() + v_t + theta;

        XY xy = compute_xy(a, w, cand, wm);
        CHECK(std::abs(y_sel - xy.y) <= 1e-9 * (1.0 + std::abs(xy.y)));
        CHECK(std::abs(x_sel - xy.x) <= 1e-9 * (1.0 + std::abs(xy.x)));
      }
    }
  }
}
