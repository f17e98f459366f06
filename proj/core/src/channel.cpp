#include "mlm/channel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "mlm/mvncdf.hpp"

namespace mlm {

ChannelModel::ChannelModel(std::vector<double> coeffs) {
  if (coeffs.empty()) throw std::invalid_argument("channel: empty tap list");
  taps = Eigen::Map<Eigen::VectorXd>(coeffs.data(), static_cast<long>(coeffs.size()));
  if (!taps.allFinite()) throw std::invalid_argument("channel: non-finite tap");
  if (taps.cwiseAbs().maxCoeff() == 0.0) throw std::invalid_argument("channel: all taps zero");
}

Eigen::VectorXd WindowMatrices::tap_column(int i) const {
  if (std::abs(i) > m) throw std::out_of_range("tap_column: |i| > m");
  return h.col(i + m + ell);
}

WindowMatrices build_window_matrices(const ChannelModel& channel, int m) {
  if (m < 1) throw std::invalid_argument("build_window_matrices: m must be >= 1");
  WindowMatrices wm;
  wm.m = m;
  wm.ell = channel.memory();
  const int rows = wm.out_len();
  const int cols = wm.win_len();
  wm.h = Eigen::MatrixXd::Zero(rows, cols);
  wm.t = Eigen::MatrixXd::Zero(rows, cols);

  // Row r is output time tau = r - m; the coefficient of symbol offset
  // kappa = tau - j is h_j. Offsets |kappa| <= m live in H, the rest in T.
  const int ell = wm.ell;
  for (int r = 0; r < rows; ++r) {
    const int tau = r - m;
    for (int j = 0; j <= ell; ++j) {
      const int kappa = tau - j;
      const int c = kappa + m + ell;
      if (std::abs(kappa) <= m)
        wm.h(r, c) = channel.taps[j];
      else
        wm.t(r, c) = channel.taps[j];
    }
  }
  wm.t_ones = wm.t.rowwise().sum();
  return wm;
}

NoiseModel::NoiseModel(Kind kind, std::vector<double> autocov)
    : kind_(kind), autocov_(std::move(autocov)) {
  if (autocov_.empty() || !(autocov_[0] > 0.0) || !std::isfinite(autocov_[0]))
    throw std::invalid_argument("noise: variance must be positive and finite");
  for (double c : autocov_)
    if (!std::isfinite(c)) throw std::invalid_argument("noise: non-finite autocovariance");
  // PSD probe on a small window; window_covariance re-checks its own matrix.
  const int probe = static_cast<int>(autocov_.size()) + 2;
  Eigen::MatrixXd k(probe, probe);
  for (int i = 0; i < probe; ++i)
    for (int j = 0; j < probe; ++j) k(i, j) = this->autocov(i - j);
  SymEig eig = sym_eig(k);
  if (eig.values.minCoeff() < -1e-10 * k.trace())
    throw std::invalid_argument("noise: autocovariance is not positive semidefinite");
}

NoiseModel NoiseModel::iid(double sigma2) { return NoiseModel(Kind::iid, {sigma2}); }

NoiseModel NoiseModel::lag1(double sigma2, double rho) {
  if (std::abs(rho) > 0.5)
    throw std::invalid_argument("noise: single-lag correlation must satisfy |rho| <= 0.5");
  return NoiseModel(Kind::lag1, {sigma2, rho * sigma2});
}

NoiseModel NoiseModel::custom(std::vector<double> autocov) {
  return NoiseModel(Kind::custom, std::move(autocov));
}

double NoiseModel::autocov(std::int64_t lag) const {
  const std::uint64_t a = static_cast<std::uint64_t>(lag < 0 ? -lag : lag);
  return a < autocov_.size() ? autocov_[a] : 0.0;
}

Eigen::MatrixXd NoiseModel::covariance(const std::vector<std::int64_t>& indices) const {
  const long n = static_cast<long>(indices.size());
  Eigen::MatrixXd k(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) k(i, j) = autocov(indices[i] - indices[j]);
  return k;
}

Eigen::MatrixXd window_covariance(const NoiseModel& noise, const std::vector<std::int64_t>& instants,
                                  int m, int ell) {
  if (instants.empty()) throw std::invalid_argument("window_covariance: no instants");
  for (size_t i = 1; i < instants.size(); ++i)
    if (instants[i] <= instants[i - 1])
      throw std::invalid_argument("window_covariance: instants must be strictly increasing");
  if (m < 1) throw std::invalid_argument("window_covariance: m must be >= 1");

  const int w = 2 * m + ell + 1;
  std::vector<std::int64_t> idx;
  idx.reserve(instants.size() * w);
  for (std::int64_t t : instants)
    for (int r = 0; r < w; ++r) idx.push_back(t - m + r);
  Eigen::MatrixXd k = noise.covariance(idx);

  if (noise.kind() == NoiseModel::Kind::custom) {
    SymEig eig = sym_eig(k);
    if (eig.values.minCoeff() < -1e-10 * k.trace())
      throw std::invalid_argument("window_covariance: implied covariance is indefinite");
  }
  return k;
}

std::span<const std::int8_t> SymbolWindows::window_span(int i) const {
  const int w = 2 * (m + ell) + 1;
  const size_t start = static_cast<size_t>(instants[static_cast<size_t>(i)] - m - ell - lo);
  return {segment.data() + start, static_cast<size_t>(w)};
}

Eigen::VectorXd SymbolWindows::window(int i) const {
  auto span = window_span(i);
  Eigen::VectorXd a(static_cast<long>(span.size()));
  for (size_t j = 0; j < span.size(); ++j) a[static_cast<long>(j)] = span[j];
  return a;
}

namespace {

void sample_rll_d1_segment(RngStream& rng, std::vector<std::int8_t>& seg) {
  const size_t len = seg.size();
  if (len == 1) {
    seg[0] = static_cast<std::int8_t>(rng.sign());
    return;
  }
  // State after placing symbol i: the pair (w_{i-1}, w_i) encoded as
  // 2*bit(w_{i-1}) + bit(w_i). A transition pair followed by another
  // transition is forbidden. Counts grow like 1.76^len; doubles hold
  // comfortably for any segment this library builds.
  auto allowed = [](int a, int b, int c) { return !(a != b && b != c); };
  std::vector<std::array<double, 4>> counts(len);
  for (int s = 0; s < 4; ++s) counts[len - 1][static_cast<size_t>(s)] = 1.0;
  for (size_t i = len - 1; i-- > 1;) {
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        double total = 0.0;
        for (int c = 0; c < 2; ++c)
          if (allowed(a, b, c)) total += counts[i + 1][static_cast<size_t>(2 * b + c)];
        counts[i][static_cast<size_t>(2 * a + b)] = total;
      }
  }
  // First pair uniform over admissible weights, then forward sampling.
  double total = 0.0;
  for (int s = 0; s < 4; ++s) total += counts[1][static_cast<size_t>(s)];
  double pick = rng.uniform() * total;
  int state = 3;
  for (int s = 0; s < 4; ++s) {
    pick -= counts[1][static_cast<size_t>(s)];
    if (pick <= 0.0) {
      state = s;
      break;
    }
  }
  auto sym = [](int bit) { return static_cast<std::int8_t>(bit ? 1 : -1); };
  seg[0] = sym(state >> 1);
  seg[1] = sym(state & 1);
  for (size_t i = 2; i < len; ++i) {
    const int a = state >> 1, b = state & 1;
    double w0 = allowed(a, b, 0) ? counts[i][static_cast<size_t>(2 * b + 0)] : 0.0;
    double w1 = allowed(a, b, 1) ? counts[i][static_cast<size_t>(2 * b + 1)] : 0.0;
    int c = (rng.uniform() * (w0 + w1) < w0) ? 0 : 1;
    seg[i] = sym(c);
    state = 2 * b + c;
  }
}

}  // namespace

SymbolWindows sample_symbol_windows(RngStream& rng, const std::vector<std::int64_t>& instants,
                                    int m, int ell, const Constraint& constraint) {
  if (instants.empty()) throw std::invalid_argument("sample_symbol_windows: no instants");
  for (size_t i = 1; i < instants.size(); ++i)
    if (instants[i] <= instants[i - 1])
      throw std::invalid_argument("sample_symbol_windows: instants must be strictly increasing");

  SymbolWindows sw;
  sw.m = m;
  sw.ell = ell;
  sw.instants = instants;
  sw.lo = instants.front() - m - ell;
  const std::int64_t hi = instants.back() + m + ell;
  sw.segment.resize(static_cast<size_t>(hi - sw.lo + 1));

  switch (constraint.kind) {
    case Constraint::Kind::none:
      for (auto& s : sw.segment) s = static_cast<std::int8_t>(rng.sign());
      break;
    case Constraint::Kind::rll_d1:
      sample_rll_d1_segment(rng, sw.segment);
      break;
    case Constraint::Kind::custom: {
      constexpr int kMaxAttempts = 100000;
      for (int attempt = 0;; ++attempt) {
        if (attempt == kMaxAttempts)
          throw std::runtime_error("sample_symbol_windows: constraint admits no sequence (rejection cap hit)");
        for (auto& s : sw.segment) s = static_cast<std::int8_t>(rng.sign());
        if (constraint.word_admissible(sw.segment)) break;
      }
      break;
    }
  }
  return sw;
}

Eigen::VectorXd transmit(const Eigen::VectorXd& a_window, const Eigen::VectorXd& noise_window,
                         const WindowMatrices& matrices) {
  if (a_window.size() != matrices.win_len())
    throw std::invalid_argument("transmit: symbol window dimension mismatch");
  if (noise_window.size() != matrices.out_len())
    throw std::invalid_argument("transmit: noise window dimension mismatch");
  return (matrices.h + matrices.t) * a_window - noise_window;
}

}  // namespace mlm
