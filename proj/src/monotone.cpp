#include "sl2lab/monotone.hpp"

#include <algorithm>
#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <cmath>
#include <limits>

#include "sl2lab/parallel.hpp"

namespace sl2lab {

namespace {

Mat2R cross_form(const Mat2R& a, const Mat2R& da) {
  Mat2R j;
  j << 0.0, 1.0, -1.0, 0.0;
  const Mat2R m = a.transpose() * j * da;
  return 0.5 * (m + m.transpose());
}

}  // namespace

const char* monotone_status_name(MonotoneStatus s) {
  switch (s) {
    case MonotoneStatus::Certified: return "Certified";
    case MonotoneStatus::Uncertified: return "Uncertified";
    case MonotoneStatus::NotMonotonic: return "NotMonotonic";
  }
  return "?";
}

double angular_speed(const Mat2R& a, const Mat2R& da, const Eigen::Vector2d& y) {
  const Eigen::Vector2d w = a * y, dw = da * y;
  return (w[0] * dw[1] - w[1] * dw[0]) / w.squaredNorm();
}

SpeedRange angular_speed_range(const Mat2R& a, const Mat2R& da) {
  // With P = L L^T the pencil becomes the symmetric C = L^{-1} S L^{-T}, whose
  // eigenvalues avoid the cancellation of the quadratic discriminant.
  const Mat2R p = a.transpose() * a;
  const Eigen::LLT<Mat2R> llt(p);
  if (llt.info() != Eigen::Success) throw Error(Errc::InvalidArgument, "singular matrix in angular speed");
  const Mat2R l = llt.matrixL();
  const Mat2R linv = l.inverse();
  const Mat2R cm = linv * cross_form(a, da) * linv.transpose();
  const double mean = 0.5 * (cm(0, 0) + cm(1, 1));
  const double half = 0.5 * (cm(0, 0) - cm(1, 1));
  const double radius = std::hypot(half, cm(0, 1));
  SpeedRange r;
  r.min = mean - radius;
  r.max = mean + radius;
  // Eigenvector of C for the smaller eigenvalue, mapped back by L^{-T}.
  const double phi = 0.5 * std::atan2(cm(0, 1), half) + 0.5 * M_PI;
  const Eigen::Vector2d y = linv.transpose() * Eigen::Vector2d(std::cos(phi), std::sin(phi));
  r.argmin_angle = std::atan2(y[1], y[0]);
  return r;
}

MonotonicityReport monotonicity_constant(const Family& f, const TorusGrid& xgrid, const std::vector<double>& thetas) {
  if (xgrid.size() == 0 || thetas.empty()) throw Error(Errc::InvalidArgument, "monotonicity scan needs nonempty grids");
  if (xgrid.dim != f.dim()) throw Error(Errc::InvalidArgument, "grid dimension does not match the family");
  const std::size_t nx = xgrid.size(), nt = thetas.size();
  const auto values = parallel_map<std::vector<SpeedRange>>(nx, [&](std::size_t i) {
    std::vector<SpeedRange> row(nt);
    for (std::size_t j = 0; j < nt; ++j) {
      const auto [a, da] = f.theta_jet(xgrid.points[i], thetas[j]);
      row[j] = angular_speed_range(a, da);
    }
    return row;
  });

  MonotonicityReport rep;
  rep.x_nodes = nx;
  rep.theta_nodes = nt;
  rep.min_speed = std::numeric_limits<double>::infinity();
  rep.max_speed = -std::numeric_limits<double>::infinity();
  std::size_t imin = 0, jmin = 0, imax = 0, jmax = 0;
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < nt; ++j) {
      if (values[i][j].min < rep.min_speed) {
        rep.min_speed = values[i][j].min;
        imin = i;
        jmin = j;
      }
      if (values[i][j].max > rep.max_speed) {
        rep.max_speed = values[i][j].max;
        imax = i;
        jmax = j;
      }
    }

  // Neighbour variation of both envelopes; x neighbours are periodic on tensor
  // grids and consecutive points otherwise.
  auto vary = [&](std::size_t i, std::size_t j, std::size_t i2, std::size_t j2) {
    rep.lipschitz_margin = std::max({rep.lipschitz_margin, std::abs(values[i][j].min - values[i2][j2].min),
                                     std::abs(values[i][j].max - values[i2][j2].max)});
  };
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j + 1 < nt; ++j) vary(i, j, i, j + 1);
    if (xgrid.is_tensor()) {
      std::size_t stride = 1;
      for (int axis = xgrid.dim - 1; axis >= 0; --axis) {
        const auto n_axis = static_cast<std::size_t>(xgrid.shape[static_cast<std::size_t>(axis)]);
        const std::size_t pos = (i / stride) % n_axis;
        const std::size_t next = i - pos * stride + ((pos + 1) % n_axis) * stride;
        for (std::size_t j = 0; j < nt; ++j) vary(i, j, next, j);
        stride *= n_axis;
      }
    } else if (i + 1 < nx) {
      for (std::size_t j = 0; j < nt; ++j) vary(i, j, i + 1, j);
    }
  }

  auto witness = [&](std::size_t i, std::size_t j, bool low) {
    const auto [a, da] = f.theta_jet(xgrid.points[i], thetas[j]);
    const SpeedRange r = angular_speed_range(a, da);
    MonotoneWitness w;
    w.x = xgrid.points[i];
    w.theta = thetas[j];
    if (low) {
      w.y_angle = r.argmin_angle;
      w.speed = r.min;
    } else {
      // argmax direction is the argmin of the reversed family.
      w.y_angle = angular_speed_range(a, Mat2R(-da)).argmin_angle;
      w.speed = r.max;
    }
    return w;
  };

  const bool positive = rep.min_speed > kSpeedZeroTol;
  const bool negative = rep.max_speed < -kSpeedZeroTol;
  if (rep.min_speed < -kSpeedZeroTol && rep.max_speed > kSpeedZeroTol) {
    rep.status = MonotoneStatus::NotMonotonic;
    rep.epsilon = rep.min_speed;
    rep.argmin = witness(imin, jmin, true);
    rep.opposite = witness(imax, jmax, false);
    return rep;
  }
  if (negative || (!positive && rep.min_speed < -kSpeedZeroTol)) {
    rep.epsilon = rep.max_speed;
    rep.argmin = witness(imax, jmax, false);
  } else {
    rep.epsilon = rep.min_speed;
    rep.argmin = witness(imin, jmin, true);
  }
  rep.status = (positive || negative) && std::abs(rep.epsilon) > rep.lipschitz_margin ? MonotoneStatus::Certified
                                                                                      : MonotoneStatus::Uncertified;
  return rep;
}

ConeReport w_cone_sample(const Cocycle& c, const std::vector<Eigen::VectorXd>& directions, const TorusGrid& xgrid) {
  if (c.dim() < 1) throw Error(Errc::InvalidArgument, "cone sampling needs d >= 1");
  ConeReport out;
  const std::vector<double> zero{0.0};
  for (const auto& w : directions)
    out.samples.push_back({w, monotonicity_constant(Family::phase_shift(c, w), xgrid, zero)});
  for (std::size_t i = 0; i < out.samples.size(); ++i)
    for (std::size_t j = i + 1; j < out.samples.size(); ++j) {
      const auto& a = out.samples[i].report;
      const auto& b = out.samples[j].report;
      if (!a.certified() || !b.certified() || (a.epsilon > 0) != (b.epsilon > 0)) continue;
      const Eigen::VectorXd mid = 0.5 * (out.samples[i].w + out.samples[j].w);
      if (monotonicity_constant(Family::phase_shift(c, mid), xgrid, zero).status == MonotoneStatus::NotMonotonic)
        out.convexity_ok = false;
    }
  return out;
}

}  // namespace sl2lab
