#include "sl2lab/renorm.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

#include "sl2lab/parallel.hpp"

namespace sl2lab {

CFData continued_fraction(double alpha, int depth) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::InvalidArgument, "continued_fraction needs alpha in (0, 1)");
  if (depth < 1) throw Error(Errc::InvalidArgument, "continued_fraction needs depth >= 1");
  CFData cf;
  cf.alpha = alpha;
  long p2 = 0, q2 = 1, p1 = 1, q1 = 0;  // levels n - 2 and n - 1
  double beta2 = 0.0, beta1 = 1.0;
  for (int n = 0; n < depth; ++n) {
    long an = 0;
    if (n > 0) {
      an = static_cast<long>(std::floor(beta2 / beta1));
      if (an < 1) an = 1;
    }
    // beta_n = beta_{n-2} - a_n beta_{n-1} must land in [0, beta_{n-1}); the
    // floor above can be off by one near integers.
    auto beta_of = [&](long a) {
      const double p = static_cast<double>(a * p1 + p2), q = static_cast<double>(a * q1 + q2);
      const double s = (n % 2 == 0) ? 1.0 : -1.0;
      return s * std::fma(q, alpha, -p);
    };
    double b = beta_of(an);
    if (n > 0) {
      while (b < 0.0 && an > 1) b = beta_of(--an);
      while (b >= beta1) b = beta_of(++an);
    }
    if (b < kRationalBetaMin)
      throw Error(Errc::RationalAlpha, "alpha is rational to working precision at level " + std::to_string(n),
                  {static_cast<long>(n)});
    const long p = an * p1 + p2, q = an * q1 + q2;
    if (q > (1L << 52)) throw Error(Errc::Overflow, "continued fraction denominators exceed 2^52");
    cf.a.push_back(an);
    cf.p.push_back(p);
    cf.q.push_back(q);
    cf.beta.push_back(b);
    cf.alphas.push_back(b / beta1);
    p2 = p1;
    q2 = q1;
    p1 = p;
    q1 = q;
    beta2 = beta1;
    beta1 = b;
  }
  return cf;
}

namespace {

Eigen::VectorXd point(double x) { return reduce_mod1(Eigen::VectorXd::Constant(1, x)); }

double operator_distance_to_identity(const Mat2R& m) { return spectral_norm(Mat2R(m - Mat2R::Identity())); }

}  // namespace

Mat2R RenormPair::a0(double x) const { return iterate(base, point(x_star + beta_prev * x), k0).value(); }
Mat2R RenormPair::a1(double x) const { return iterate(base, point(x_star + beta_prev * x), k1).value(); }

RenormPair commuting_pair(const Cocycle& c, const CFData& cf, int n, double x_star) {
  if (c.dim() != 1) throw Error(Errc::InvalidArgument, "renormalization needs a one-frequency cocycle");
  if (n < 1 || n >= cf.depth()) throw Error(Errc::InvalidArgument, "level outside the continued fraction depth");
  if (std::abs(c.alpha[0] - cf.alpha) > 1e-15)
    throw Error(Errc::InvalidArgument, "continued fraction computed for a different frequency");
  RenormPair p{c};
  p.level = n;
  p.x_star = x_star;
  p.alpha_n = cf.alphas[static_cast<std::size_t>(n)];
  p.beta_prev = cf.beta_at(n - 1);
  const long sign_n = (n % 2 == 0) ? 1 : -1;
  p.k0 = -sign_n * cf.q_at(n - 1);
  p.k1 = sign_n * cf.q_at(n);
  const auto res = parallel_map<double>(kCommutationPoints, [&](std::size_t j) {
    const double x = static_cast<double>(j) / kCommutationPoints;
    const Mat2R lhs = p.a1(x + 1.0) * p.a0(x);
    const Mat2R rhs = p.a0(x + p.alpha_n) * p.a1(x);
    return spectral_norm(Mat2R(lhs - rhs)) / std::max(1.0, spectral_norm(lhs));
  });
  for (double r : res) p.commutation_residual = std::max(p.commutation_residual, r);
  if (!(p.commutation_residual <= kCommutationTol))
    throw Error(Errc::CommutationResidual,
                "commutation residual " + std::to_string(p.commutation_residual) + " at level " + std::to_string(n));
  return p;
}

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / x), b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

Mat2R NormalizingMap::quadratic_part(double x) const {
  return rotation(-(phase_slope * (x * x - x) / 2.0 + phase_offset * x));
}

Mat2R NormalizingMap::reduced_a0(double x) const {
  return quadratic_part(x + 1.0) * frame * pair.a0(x) * inverse_unimodular(Mat2R(quadratic_part(x) * frame));
}

Mat2R NormalizingMap::operator()(double x) const {
  if (!std::isfinite(x)) throw Error(Errc::InvalidArgument, "normalizing map at a non-finite point");
  if (x >= 1.0) return (*this)(x - 1.0) * inverse_unimodular(pair.a0(x - 1.0));
  if (x < 0.0) return (*this)(x + 1.0) * pair.a0(x);
  const double s = smooth_step(x);
  const Mat2R path = rotation(s * seed_angle) * symmetric_exp(s * seed_log);
  const Mat2R c = path * reduced_a0(0.0) * inverse_unimodular(reduced_a0(s * (x - 1.0)));
  return c * quadratic_part(x) * frame;
}

namespace {

/// M = Q^{1/2} for the positive form Q (det 1) best preserved by the pair.
Mat2R invariant_frame(const RenormPair& p) {
  // Rows of E^T Q E - Q = 0 in the unknowns (q11, q12, q22) of Q = M^T M.
  constexpr int kSamples = 16;
  Eigen::MatrixXd sys(6 * kSamples, 3);
  int row = 0;
  for (int j = 0; j < kSamples; ++j) {
    const double x = static_cast<double>(j) / kSamples;
    for (const Mat2R& e0 : {p.a0(x), p.a1(x)}) {
      const double sigma = spectral_norm(e0);
      const Mat2R e = e0 / sigma;
      for (int k = 0; k < 3; ++k) {
        Mat2R q = Mat2R::Zero();
        if (k == 0) q(0, 0) = 1.0;
        if (k == 1) q(0, 1) = q(1, 0) = 1.0;
        if (k == 2) q(1, 1) = 1.0;
        const Mat2R r = e.transpose() * q * e - q / (sigma * sigma);
        sys(row + 0, k) = r(0, 0);
        sys(row + 1, k) = r(0, 1);
        sys(row + 2, k) = r(1, 1);
      }
      row += 3;
    }
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys, Eigen::ComputeFullV);
  const Eigen::Vector3d sv = svd.singularValues();
  // A one-dimensional null space is needed; otherwise (e.g. all samples equal
  // to the identity) any frame works.
  if (!(sv[0] > 0.0) || sv[1] < 1e-8 * sv[0]) return Mat2R::Identity();
  Eigen::Vector3d v = svd.matrixV().col(2);
  if (v[0] < 0.0) v = -v;
  Mat2R q;
  q << v[0], v[1], v[1], v[2];
  const double det = q.determinant();
  if (!(det > 0.0) || !(q(0, 0) > 0.0)) return Mat2R::Identity();
  q /= std::sqrt(det);
  return symmetric_exp(0.5 * symmetric_log(q));
}

}  // namespace

NormalizingMap normalizing_map(const RenormPair& p, int check_points) {
  NormalizingMap b{p};
  b.frame = invariant_frame(p);
  // Lift the polar angle of A^{(n,0)} over [0, 1].
  constexpr int kLiftSamples = 1024;
  std::vector<Complex> phases(kLiftSamples + 1);
  for (int j = 0; j <= kLiftSamples; ++j) {
    const double x = static_cast<double>(j) / kLiftSamples;
    const double angle = polar_decompose(Mat2R(b.frame * p.a0(x) * inverse_unimodular(b.frame))).angle;
    phases[static_cast<std::size_t>(j)] = std::polar(1.0, kTwoPi * angle);
  }
  const PhaseLift lift = phase_unwrap(phases);
  b.phase_offset = polar_decompose(Mat2R(b.frame * p.a0(0.0) * inverse_unimodular(b.frame))).angle;
  b.phase_slope = lift.total();
  const Polar seed = polar_decompose(inverse_unimodular(b.reduced_a0(0.0)));
  b.seed_angle = seed.angle;
  b.seed_log = symmetric_log(seed.positive);
  const auto res = parallel_map<double>(static_cast<std::size_t>(check_points), [&](std::size_t j) {
    const double x = static_cast<double>(j) / check_points;
    return operator_distance_to_identity(b(x + 1.0) * p.a0(x) * inverse_unimodular(b(x)));
  });
  for (double r : res) b.residual = std::max(b.residual, r);
  if (!(b.residual <= kNormalizingTol))
    throw Error(Errc::ChartMiss, "normalizing map residual " + std::to_string(b.residual));
  return b;
}

int Representative::degree() const {
  std::vector<Mat2R> loop = values;
  loop.push_back(values.front());
  const double w = winding_of_samples(loop);
  const double r = std::round(w);
  if (std::abs(w - r) > 0.1) throw Error(Errc::NonIntegerWinding, "representative winding " + std::to_string(w));
  return static_cast<int>(r);
}

double Representative::rotation_defect() const {
  double d = 0.0;
  // Eigenvalues of A^T A - Id avoid the cancellation of singular-value
  // formulas near a double singular value.
  for (const auto& m : values) {
    const Eigen::SelfAdjointEigenSolver<Mat2R> es(Mat2R(m.transpose() * m - Mat2R::Identity()));
    d = std::max(d, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  return d;
}

Representative renorm_representative(const NormalizingMap& b, int nodes) {
  if (nodes < 4) throw Error(Errc::InvalidArgument, "representative needs at least 4 nodes");
  Representative r;
  r.level = b.pair.level;
  r.alpha = b.pair.alpha_n;
  r.nodes.resize(static_cast<std::size_t>(nodes));
  for (int j = 0; j < nodes; ++j) r.nodes[static_cast<std::size_t>(j)] = static_cast<double>(j) / nodes;
  auto rep = [&](double x) { return Mat2R(b(x + r.alpha) * b.pair.a1(x) * inverse_unimodular(b(x))); };
  struct Sample {
    Mat2R value;
    double periodicity;
  };
  const auto samples = parallel_map<Sample>(static_cast<std::size_t>(nodes), [&](std::size_t j) {
    const Mat2R v = rep(r.nodes[j]);
    const Mat2R w = rep(r.nodes[j] + 1.0);
    return Sample{v, spectral_norm(Mat2R(v - w)) / std::max(1.0, spectral_norm(v))};
  });
  for (const auto& s : samples) {
    r.values.push_back(s.value);
    r.periodicity_residual = std::max(r.periodicity_residual, s.periodicity);
  }
  if (!(r.periodicity_residual <= kPeriodicityTol))
    throw Error(Errc::PeriodicityResidual, "representative periodicity residual " + std::to_string(r.periodicity_residual));
  return r;
}

RotationFit rotation_distance(const Representative& a, int deg, int n) {
  const double s = ((n % 2 == 0) ? 1.0 : -1.0) * deg;
  auto objective = [&](double theta) {
    double worst = 0.0;
    for (std::size_t j = 0; j < a.values.size(); ++j)
      worst = std::max(worst, operator_distance_to_identity(rotation(-theta - s * a.nodes[j]) * a.values[j]));
    return worst;
  };
  // Coarse scan, then golden-section search on the bracketing cell.
  constexpr int kScan = 256;
  double best = 0.0, fbest = objective(0.0);
  for (int i = 1; i < kScan; ++i) {
    const double th = static_cast<double>(i) / kScan, f = objective(th);
    if (f < fbest) {
      fbest = f;
      best = th;
    }
  }
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = best - 1.0 / kScan, hi = best + 1.0 / kScan;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = objective(x1), f2 = objective(x2);
  while (hi - lo > 1e-13) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = objective(x2);
    }
  }
  RotationFit fit;
  fit.theta = 0.5 * (lo + hi);
  fit.distance = objective(fit.theta);
  if (fbest < fit.distance) {
    fit.theta = best;
    fit.distance = fbest;
  }
  fit.theta -= std::floor(fit.theta);
  return fit;
}

std::vector<RenormLevel> renorm_cascade(const Cocycle& c, int depth, double x_star, int nodes) {
  if (depth < 1) throw Error(Errc::InvalidArgument, "renorm cascade needs depth >= 1");
  const CFData cf = continued_fraction(c.alpha[0], depth + 1);
  const int deg = homotopy_class(c).at(0);
  std::vector<RenormLevel> out;
  for (int n = 1; n <= depth; ++n) {
    const RenormPair p = commuting_pair(c, cf, n, x_star);
    const NormalizingMap b = normalizing_map(p);
    const Representative r = renorm_representative(b, nodes);
    const RotationFit fit = rotation_distance(r, deg, n);
    RenormLevel lv;
    lv.n = n;
    lv.alpha_n = p.alpha_n;
    lv.commutation_residual = p.commutation_residual;
    lv.normalizing_residual = b.residual;
    lv.periodicity_residual = r.periodicity_residual;
    lv.theta_hat = fit.theta;
    lv.distance = fit.distance;
    lv.degree = r.degree();
    lv.rotation_defect = r.rotation_defect();
    out.push_back(lv);
  }
  return out;
}

}  // namespace sl2lab
