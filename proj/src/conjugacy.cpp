#include "sl2lab/conjugacy.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "sl2lab/parallel.hpp"
#include "sl2lab/spectral.hpp"

namespace sl2lab {

namespace {

double singular_defect(const Mat2R& m) {
  const Eigen::SelfAdjointEigenSolver<Mat2R> es(Mat2R(m.transpose() * m - Mat2R::Identity()));
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Distance of a real number to Z.
double dist_z(double x) { return std::abs(x - std::round(x)); }

}  // namespace

Mat2R section_conjugacy(Complex m) {
  const double r2 = std::norm(m);
  if (!(r2 < 1.0)) throw Error(Errc::BoundaryPoint, "section value outside the disk");
  Mat2C b;
  b << 1.0, -m, -std::conj(m), 1.0;
  b /= std::sqrt(1.0 - r2);
  return from_disk_coords(b).real();
}

L2Conjugacy l2_conjugacy_from_section(const Cocycle& c, const TorusGrid& grid, const std::vector<Complex>& m) {
  if (!grid.is_tensor()) throw Error(Errc::InvalidArgument, "section conjugacy needs a uniform tensor grid");
  if (m.size() != grid.size()) throw Error(Errc::InvalidArgument, "section values do not match the grid");
  for (Complex z : m)
    if (!(std::abs(z) < 1.0 - 1e-9)) throw Error(Errc::BoundaryPoint, "sup |m| reaches the unit circle");
  const std::vector<Complex> shifted = periodic_shift(m, grid.shape, c.alpha);
  struct Node {
    Mat2R b;
    double quality, residual;
  };
  const auto nodes = parallel_map<Node>(grid.size(), [&](std::size_t j) {
    const Mat2R a = c.eval_real(grid.points[j]);
    const Mat2R b = section_conjugacy(m[j]);
    const Mat2R b1 = section_conjugacy(shifted[j]);
    const Mat2R conj = b1 * a * inverse_unimodular(b);
    const Complex image = mobius(disk_coords(a), m[j]);
    return Node{b, singular_defect(conj), hyperbolic_distance(image, shifted[j])};
  });
  L2Conjugacy out;
  out.field.grid = grid;
  for (const auto& n : nodes) {
    out.field.values.push_back(n.b);
    out.field.quality = std::max(out.field.quality, n.quality);
    out.section_residual = std::max(out.section_residual, n.residual);
  }
  out.verified = out.field.quality <= 10.0 * out.section_residual + 1e-12;
  return out;
}

L2Conjugacy l2_conjugacy_from_section(const Cocycle& c, const DiskSection& m) {
  return l2_conjugacy_from_section(c, m.grid, m.values);
}

CohomologicalSolution solve_cohomological(const TrigPoly& phi, const Eigen::VectorXd& alpha, double divisor_cut) {
  if (phi.dim() != alpha.size()) throw Error(Errc::InvalidArgument, "phase and frequency dimensions differ");
  if (phi.has_linear_part()) throw Error(Errc::InvalidArgument, "cohomological equation needs a periodic phase");
  if (!phi.is_real(1e-14)) throw Error(Errc::InvalidArgument, "cohomological equation needs a real phase");
  CohomologicalSolution sol;
  sol.c = phi.mean().real();
  sol.psi = TrigPoly(phi.dim());
  std::vector<long> offending;
  for (const auto& [k, coef] : phi.modes()) {
    double kalpha = 0.0;
    bool zero = true;
    for (std::size_t j = 0; j < k.size(); ++j) {
      kalpha += k[j] * alpha[static_cast<Eigen::Index>(j)];
      zero = zero && k[j] == 0;
    }
    if (zero) continue;
    const Complex divisor = 1.0 - std::polar(1.0, kTwoPi * kalpha);
    if (std::abs(divisor) < divisor_cut) {
      offending.insert(offending.end(), k.begin(), k.end());
      continue;
    }
    sol.psi.add(k, coef / divisor);
  }
  if (!offending.empty()) {
    std::string modes;
    for (std::size_t i = 0; i < offending.size(); ++i)
      modes += (i % static_cast<std::size_t>(phi.dim()) == 0 ? (i ? ") (" : "(") : ", ") + std::to_string(offending[i]);
    throw Error(Errc::SmallDivisor, "small divisors at modes " + modes + ")", offending);
  }
  const TorusGrid g = TorusGrid::standard(alpha, 1024);
  const auto res = parallel_map<double>(g.size(), [&](std::size_t j) {
    const Eigen::VectorXd& x = g.points[j];
    const Eigen::VectorXd xa = x + alpha;
    return std::abs((phi(x) + sol.psi(xa) - sol.psi(x)).real() - sol.c);
  });
  for (double r : res) sol.residual = std::max(sol.residual, r);
  return sol;
}

LatticeHit lattice_search(const Eigen::VectorXd& alpha, double c, double tol, int box) {
  const int d = static_cast<int>(alpha.size());
  if (d < 1 || box < 0) throw Error(Errc::InvalidArgument, "lattice search needs d >= 1 and box >= 0");
  long cap = box;
  while (cap > 0 && std::pow(2.0 * cap + 1.0, d) > static_cast<double>(kLatticeBudget)) cap /= 2;
  // Shells of growing sup norm; lexicographic order inside a shell.
  for (long r = 0; r <= cap; ++r) {
    std::vector<long> l(static_cast<std::size_t>(d), -r);
    while (true) {
      long sup = 0;
      for (long v : l) sup = std::max(sup, std::abs(v));
      if (sup == r) {
        double s = -c;
        for (int j = 0; j < d; ++j) s += static_cast<double>(l[static_cast<std::size_t>(j)]) * alpha[j];
        const double e = dist_z(s);
        if (e <= tol) return LatticeHit{std::vector<int>(l.begin(), l.end()), e};
      }
      int j = d - 1;
      while (j >= 0 && l[static_cast<std::size_t>(j)] == r) l[static_cast<std::size_t>(j--)] = -r;
      if (j < 0) break;
      ++l[static_cast<std::size_t>(j)];
    }
  }
  throw Error(Errc::LatticeSearchFail,
              "no l with |l| <= " + std::to_string(cap) + " brings <l, alpha> within " + std::to_string(tol) + " of c");
}

TrigPoly rotation_phase(const CocycleExpr& e) {
  using K = CocycleExpr::Kind;
  switch (e.kind()) {
    case K::Rot:
      return e.polys().at(0);
    case K::Product: {
      TrigPoly sum(e.dim());
      for (const auto& child : e.children()) sum += rotation_phase(child);
      return sum;
    }
    case K::Shift:
      return rotation_phase(e.children().at(0)).translated(e.offset());
    case K::Const: {
      const Mat2R& m = e.matrix();
      if ((m.transpose() * m - Mat2R::Identity()).cwiseAbs().maxCoeff() > 1e-14 || m.determinant() < 0.0)
        break;
      return TrigPoly::constant(e.dim(), std::atan2(m(1, 0), m(0, 0)) / kTwoPi);
    }
    default:
      break;
  }
  throw Error(Errc::InvalidArgument, "push_to_model needs a rotation-valued cocycle expression");
}

std::vector<PushStage> push_to_model(const Cocycle& c, const PushOptions& opt) {
  if (opt.stages < 0) throw Error(Errc::InvalidArgument, "push_to_model needs stages >= 0");
  const int d = c.dim();
  const TrigPoly phase = rotation_phase(c.expr);
  if (!phase.is_real(1e-14)) throw Error(Errc::InvalidArgument, "rotation phase must be real");
  const Eigen::VectorXd slope = phase.has_linear_part() ? phase.slope() : Eigen::VectorXd::Zero(d);
  for (Eigen::Index j = 0; j < slope.size(); ++j)
    if (slope[j] != std::round(slope[j])) throw Error(Errc::InvalidArgument, "rotation phase slope must be integral");
  TrigPoly phi = phase;
  phi.set_slope(Eigen::VectorXd::Zero(d));
  const double mean = phi.mean().real();
  const TorusGrid g = TorusGrid::standard(c.alpha, opt.verification_nodes);

  // distance of x -> R_{-<l, x + alpha>} R_{psi(x + alpha)} A(x) R_{-psi(x)} R_{<l, x>} to R_{<slope, x>}
  auto stage_of = [&](int s, const TrigPoly& psi, const std::vector<int>& l) {
    PushStage st;
    st.stage = s;
    st.l = l;
    st.psi = psi;
    st.field.grid = g;
    Eigen::VectorXd lv(d);
    for (int j = 0; j < d; ++j) lv[j] = l[static_cast<std::size_t>(j)];
    struct Node {
      Mat2R b;
      double dist;
    };
    const auto nodes = parallel_map<Node>(g.size(), [&](std::size_t j) {
      const Eigen::VectorXd& x = g.points[j];
      const Eigen::VectorXd xa = x + c.alpha;
      const Mat2R b = rotation(-lv.dot(x) + psi(x).real());
      const Mat2R b1 = rotation(-lv.dot(xa) + psi(xa).real());
      const Mat2R conj = b1 * c.eval_real(x) * inverse_unimodular(b);
      return Node{b, spectral_norm(Mat2R(conj - rotation(slope.dot(x))))};
    });
    for (const auto& n : nodes) {
      st.field.values.push_back(n.b);
      st.distance = std::max(st.distance, n.dist);
    }
    st.field.quality = st.distance;
    return st;
  };

  std::vector<PushStage> out;
  out.push_back(stage_of(0, TrigPoly(d), std::vector<int>(static_cast<std::size_t>(d), 0)));
  for (int s = 1; s <= opt.stages; ++s) {
    const std::size_t i = static_cast<std::size_t>(s - 1);
    const int kmax = i < opt.max_modes.size() ? opt.max_modes[i] : s;
    const double tol = i < opt.tolerances.size() ? opt.tolerances[i] : std::pow(10.0, -s);
    const CohomologicalSolution sol = solve_cohomological(phi.truncated(kmax), c.alpha, opt.divisor_cut);
    const LatticeHit hit = lattice_search(c.alpha, mean, tol);
    PushStage st = stage_of(s, sol.psi, hit.l);
    st.max_mode = kmax;
    st.lattice_error = hit.error;
    st.cohomological_residual = sol.residual;
    out.push_back(std::move(st));
  }
  return out;
}

}  // namespace sl2lab
