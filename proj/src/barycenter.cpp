#include "sl2lab/barycenter.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "sl2lab/parallel.hpp"

namespace sl2lab {

namespace {

/// Nearest-neighbour ties: within relative kTieTol plus absolute kTieAbs, both
/// above the frame snap, so symmetric copies of an atom stay tied.
constexpr double kTieTol = 1e-6;
constexpr double kTieAbs = 1e-10;

/// a / b without the Annex G special-value handling of std::complex division;
/// inputs here are finite points of the disk.
inline Complex cdiv(Complex a, Complex b) { return a * std::conj(b) / std::norm(b); }

void check_open(Complex z) {
  if (!(std::norm(z) < (1.0 - 1e-12) * (1.0 - 1e-12)) || !std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw Error(Errc::BoundaryPoint, "atom outside the open disk");
}

/// Moebius map z -> (z + a) / (1 + conj(a) z), inverse of the map sending a to 0.
Complex from_origin(Complex u, Complex a) { return cdiv(u + a, 1.0 + std::conj(a) * u); }
Complex to_origin(Complex z, Complex a) { return cdiv(z - a, 1.0 - std::conj(a) * z); }

bool canonical_less(const DiskAtom& a, const DiskAtom& b) {
  if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
  if (a.z.imag() != b.z.imag()) return a.z.imag() < b.z.imag();
  return a.weight < b.weight;
}

/// Merges atoms into geodesic weighted points. Atoms are visited heaviest first
/// (ties: closest to `anchor`), and each unvisited atom absorbs every later atom
/// within pseudo-distance r. Spatial hashing only prunes candidate pairs.
std::vector<DiskAtom> merge_within(std::vector<DiskAtom> atoms, double r, Complex anchor) {
  if (atoms.size() < 2 || r <= 0.0) return atoms;
  std::vector<double> key(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) key[i] = pseudo_distance(atoms[i].z, anchor);
  std::vector<std::size_t> order(atoms.size()), rank(atoms.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (atoms[a].weight != atoms[b].weight) return atoms[a].weight > atoms[b].weight;
    if (key[a] != key[b]) return key[a] < key[b];
    return canonical_less(atoms[a], atoms[b]);
  });
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;
  // |z - w| <= r |1 - conj(w) z| <= 2 r.
  const double cell = std::max(2.0 * r, 1e-300);
  auto cell_of = [&](Complex z) {
    return std::make_pair(static_cast<long long>(std::floor(z.real() / cell)),
                          static_cast<long long>(std::floor(z.imag() / cell)));
  };
  std::map<std::pair<long long, long long>, std::vector<std::size_t>> grid;
  for (std::size_t i : order) grid[cell_of(atoms[i].z)].push_back(i);
  std::vector<char> taken(atoms.size(), 0);
  std::vector<DiskAtom> out;
  for (std::size_t i : order) {
    if (taken[i]) continue;
    taken[i] = 1;
    DiskAtom acc = atoms[i];
    const auto [cx, cy] = cell_of(atoms[i].z);
    std::vector<std::size_t> near;
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy) {
        const auto it = grid.find({cx + dx, cy + dy});
        if (it == grid.end()) continue;
        for (std::size_t j : it->second)
          if (!taken[j] && pseudo_distance(atoms[i].z, atoms[j].z) <= r) near.push_back(j);
      }
    // Absorb in visiting order so the result does not depend on the hash layout.
    std::sort(near.begin(), near.end(), [&](std::size_t a, std::size_t b) { return rank[a] < rank[b]; });
    for (std::size_t j : near) {
      taken[j] = 1;
      const double w = acc.weight + atoms[j].weight;
      if (w > 0.0) acc.z = geodesic_point(acc.z, atoms[j].z, atoms[j].weight / w);
      acc.weight = w;
    }
    out.push_back(acc);
  }
  return out;
}

/// Folds atoms lighter than kAtomPruneWeight into their nearest heavy atom.
std::vector<DiskAtom> prune(std::vector<DiskAtom> atoms) {
  std::vector<DiskAtom> heavy, light;
  for (const auto& a : atoms) (a.weight < kAtomPruneWeight ? light : heavy).push_back(a);
  if (heavy.empty() || light.empty()) return atoms;
  for (const auto& a : light) {
    std::size_t best = 0;
    double bd = 2.0;
    for (std::size_t j = 0; j < heavy.size(); ++j) {
      const double d = pseudo_distance(a.z, heavy[j].z);
      if (d < bd) {
        bd = d;
        best = j;
      }
    }
    heavy[best].weight += a.weight;
  }
  return heavy;
}

std::vector<DiskAtom> canonical(std::vector<DiskAtom> atoms) {
  std::sort(atoms.begin(), atoms.end(), canonical_less);
  return atoms;
}

}  // namespace

DiskMeasure DiskMeasure::normalized(std::vector<DiskAtom> atoms) {
  std::vector<double> w;
  for (const auto& a : atoms) {
    check_open(a.z);
    if (!(a.weight >= 0.0) || !std::isfinite(a.weight)) throw Error(Errc::InvalidArgument, "atom weights must be >= 0");
    w.push_back(a.weight);
  }
  // Sum in sorted order so the result does not depend on the atom order.
  std::sort(w.begin(), w.end());
  double total = 0.0;
  for (double x : w) total += x;
  if (!(total > 0.0)) throw Error(Errc::InvalidArgument, "measure has zero total weight");
  for (auto& a : atoms) a.weight /= total;
  return DiskMeasure{canonical(std::move(atoms))};
}

double DiskMeasure::total_weight() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.weight;
  return s;
}

DiskMeasure DiskMeasure::pushed(const Mat2C& m) const {
  DiskMeasure out;
  for (const auto& a : atoms) out.atoms.push_back({mobius(m, a.z), a.weight});
  out.atoms = canonical(std::move(out.atoms));
  return out;
}

double pseudo_distance(Complex z, Complex w) { return std::sqrt(std::norm(z - w) / std::norm(1.0 - std::conj(w) * z)); }

Complex geodesic_point(Complex z, Complex w, double s) {
  check_open(z);
  check_open(w);
  const Complex u = to_origin(w, z);
  const double r = std::abs(u);
  if (r == 0.0 || s <= 0.0) return z;
  if (s >= 1.0) return w;
  const double scaled = std::tanh(s * std::atanh(r));
  return from_origin(u * (scaled / r), z);
}

Complex hyperbolic_midpoint(Complex z, Complex w) {
  check_open(z);
  check_open(w);
  const Complex u = to_origin(w, z);
  // tanh(atanh(r) / 2) = r / (1 + sqrt(1 - r^2)).
  return from_origin(u / (1.0 + std::sqrt(1.0 - std::norm(u))), z);
}

double phi(const DiskMeasure& mu) {
  double s = 0.0;
  for (const auto& a : mu.atoms) {
    check_open(a.z);
    s += a.weight / (1.0 - std::norm(a.z));
  }
  return s;
}

double hyperbolic_diameter(const DiskMeasure& mu) {
  double d = 0.0;
  for (std::size_t i = 0; i < mu.atoms.size(); ++i)
    for (std::size_t j = i + 1; j < mu.atoms.size(); ++j) d = std::max(d, pseudo_distance(mu.atoms[i].z, mu.atoms[j].z));
  return std::atanh(std::min(d, 1.0 - 1e-16));
}

DiskMeasure pair_measures(const DiskMeasure& mu, const DiskMeasure& nu) {
  const std::size_t n = mu.atoms.size(), m = nu.atoms.size();
  const auto rows = parallel_map<std::vector<DiskAtom>>(n, [&](std::size_t i) {
    std::vector<DiskAtom> row(m);
    for (std::size_t j = 0; j < m; ++j)
      row[j] = {hyperbolic_midpoint(mu.atoms[i].z, nu.atoms[j].z), mu.atoms[i].weight * nu.atoms[j].weight};
    return row;
  });
  std::vector<DiskAtom> all;
  all.reserve(n * m);
  for (const auto& r : rows) all.insert(all.end(), r.begin(), r.end());
  all = canonical(std::move(all));
  return DiskMeasure{canonical(prune(merge_within(std::move(all), kAtomMergeRadius, Complex(0.0))))};
}

double hyperbolic_variance(const DiskMeasure& mu, Complex center) {
  double v = 0.0;
  for (const auto& a : mu.atoms) {
    const double d = std::atanh(std::min(pseudo_distance(a.z, center), 1.0 - 1e-16));
    v += a.weight * d * d;
  }
  return v;
}

namespace {

/// Self-pairing using z * w = w * z: n (n + 1) / 2 products.
std::vector<DiskAtom> self_pair(const std::vector<DiskAtom>& a) {
  const std::size_t n = a.size();
  const auto rows = parallel_map<std::vector<DiskAtom>>(n, [&](std::size_t i) {
    std::vector<DiskAtom> row;
    row.reserve(n - i);
    row.push_back({a[i].z, a[i].weight * a[i].weight});
    for (std::size_t j = i + 1; j < n; ++j)
      row.push_back({hyperbolic_midpoint(a[i].z, a[j].z), 2.0 * a[i].weight * a[j].weight});
    return row;
  });
  std::vector<DiskAtom> all;
  for (const auto& r : rows) all.insert(all.end(), r.begin(), r.end());
  return all;
}

Eigen::Vector3d hyperboloid(Complex z) {
  const double s = 1.0 / (1.0 - std::norm(z));
  return Eigen::Vector3d((1.0 + std::norm(z)) * s, 2.0 * z.real() * s, 2.0 * z.imag() * s);
}

/// Weighted Minkowski mean projected back to the hyperboloid. Moebius maps act
/// linearly there, so the merged point is equivariant, and its time coordinate
/// (which is 2 / (1 - |z|^2) - 1) never exceeds the weighted mean of the inputs.
Complex hyperboloid_centroid(const DiskAtom* first, std::size_t count) {
  Eigen::Vector3d y = Eigen::Vector3d::Zero();
  double w = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    y += first[i].weight * hyperboloid(first[i].z);
    w += first[i].weight;
  }
  if (!(w > 0.0)) return first[0].z;
  y /= w;
  const double n = std::sqrt(std::max(y[0] * y[0] - y[1] * y[1] - y[2] * y[2], 1.0));
  y /= n;
  return Complex(y[1], y[2]) / (y[0] + 1.0);
}

/// One round of nearest-neighbour merging: every atom is linked to its nearest
/// neighbour in pseudo-distance (to all of them on a tie)
/// and each connected component becomes one atom at its hyperboloid centroid.
/// The links depend on the point set alone, so the round commutes with Moebius
/// maps and keeps the symmetries of the measure; each component has at least
/// two atoms, so the count at least halves.
std::vector<DiskAtom> merge_nearest_components(const std::vector<DiskAtom>& atoms) {
  const std::size_t n = atoms.size();
  double rmax = 0.0;
  for (const auto& a : atoms) rmax = std::max(rmax, std::abs(a.z));
  // Static 2-d tree: order[lo, hi) splits at its median along the wider axis.
  struct Node {
    std::size_t lo, hi;
    double xmin, xmax, ymin, ymax;
    int left = -1, right = -1;
  };
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::vector<Node> nodes;
  nodes.reserve(n / 4 + 2);
  auto build = [&](auto&& self, std::size_t lo, std::size_t hi) -> int {
    Node nd{lo, hi, 1.0, -1.0, 1.0, -1.0};
    for (std::size_t s = lo; s < hi; ++s) {
      const Complex z = atoms[order[s]].z;
      nd.xmin = std::min(nd.xmin, z.real());
      nd.xmax = std::max(nd.xmax, z.real());
      nd.ymin = std::min(nd.ymin, z.imag());
      nd.ymax = std::max(nd.ymax, z.imag());
    }
    const int id = static_cast<int>(nodes.size());
    nodes.push_back(nd);
    if (hi - lo > 8) {
      const bool by_x = nd.xmax - nd.xmin >= nd.ymax - nd.ymin;
      const std::size_t mid = lo + (hi - lo) / 2;
      std::nth_element(order.begin() + static_cast<long>(lo), order.begin() + static_cast<long>(mid),
                       order.begin() + static_cast<long>(hi), [&](std::size_t u, std::size_t v) {
                         const double a = by_x ? atoms[u].z.real() : atoms[u].z.imag();
                         const double b = by_x ? atoms[v].z.real() : atoms[v].z.imag();
                         return a < b || (a == b && u < v);
                       });
      const int l = self(self, lo, mid);
      const int r = self(self, mid, hi);
      nodes[static_cast<std::size_t>(id)].left = l;
      nodes[static_cast<std::size_t>(id)].right = r;
    }
    return id;
  };
  build(build, 0, n);
  const auto links = parallel_map<std::vector<std::size_t>>(n, [&](std::size_t i) {
    const Complex z = atoms[i].z;
    // rho(z, w) >= |z - w| / (1 + |z| rmax)
    const double shrink = 1.0 / (1.0 + std::abs(z) * rmax);
    double d1 = 2.0;
    std::vector<std::pair<double, std::size_t>> near;
    auto box_bound = [&](const Node& nd) {
      const double dx = std::max({nd.xmin - z.real(), 0.0, z.real() - nd.xmax});
      const double dy = std::max({nd.ymin - z.imag(), 0.0, z.imag() - nd.ymax});
      return std::hypot(dx, dy) * shrink;
    };
    auto visit = [&](auto&& self, int id) -> void {
      const Node& nd = nodes[static_cast<std::size_t>(id)];
      if (box_bound(nd) > d1 * (1.0 + kTieTol) + kTieAbs) return;
      if (nd.left < 0) {
        for (std::size_t s = nd.lo; s < nd.hi; ++s) {
          const std::size_t j = order[s];
          if (j == i) continue;
          const double d = pseudo_distance(z, atoms[j].z);
          if (d <= d1 * (1.0 + kTieTol) + kTieAbs) {
            near.emplace_back(d, j);
            d1 = std::min(d1, d);
          }
        }
        return;
      }
      const Node& l = nodes[static_cast<std::size_t>(nd.left)];
      const Node& r = nodes[static_cast<std::size_t>(nd.right)];
      const bool left_first = box_bound(l) <= box_bound(r);
      self(self, left_first ? nd.left : nd.right);
      self(self, left_first ? nd.right : nd.left);
    };
    visit(visit, 0);
    std::vector<std::size_t> out;
    for (const auto& [d, j] : near)
      if (d <= d1 * (1.0 + kTieTol) + kTieAbs) out.push_back(j);
    return out;
  });
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : links[i]) {
      const std::size_t a = find(i), b = find(j);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  // Components in order of their smallest index; members in index order.
  std::vector<std::vector<DiskAtom>> groups;
  std::vector<std::size_t> group_of(n, static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (group_of[r] == static_cast<std::size_t>(-1)) {
      group_of[r] = groups.size();
      groups.emplace_back();
    }
    groups[group_of[r]].push_back(atoms[i]);
  }
  std::vector<DiskAtom> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    double w = 0.0;
    for (const auto& a : g) w += a.weight;
    out.push_back({g.size() == 1 ? g[0].z : hyperboloid_centroid(g.data(), g.size()), w});
  }
  return out;
}

/// Reduces to at most cap atoms by rounds of nearest-neighbour merging.
std::vector<DiskAtom> compact(std::vector<DiskAtom> atoms, std::size_t cap) {
  while (atoms.size() > cap) atoms = merge_nearest_components(atoms);
  return atoms;
}

}  // namespace

Complex douady_earle_center(const DiskMeasure& mu) {
  if (mu.atoms.empty()) throw Error(Errc::InvalidArgument, "empty measure");
  // Newton on F(c) = sum w T_c(z): moving the center by delta in the chart at
  // c changes F by -delta + conj(delta) sum w u^2 to first order.
  Complex c(0.0);
  for (int it = 0; it < 200; ++it) {
    Complex v(0.0), sq(0.0);
    for (const auto& a : mu.atoms) {
      const Complex u = to_origin(a.z, c);
      v += a.weight * u;
      sq += a.weight * u * u;
    }
    if (std::abs(v) < 1e-15) return c;
    const double det = 1.0 - std::norm(sq);
    if (!(det > 1e-14)) throw Error(Errc::NoConvergence, "Douady-Earle center is degenerate");
    Complex delta(((1.0 + sq.real()) * v.real() + sq.imag() * v.imag()) / det,
                  (sq.imag() * v.real() + (1.0 - sq.real()) * v.imag()) / det);
    if (std::abs(delta) > 0.5) delta *= 0.5 / std::abs(delta);
    const Complex next = from_origin(delta, c);
    if (std::abs(next - c) < 1e-16) return next;
    c = next;
  }
  throw Error(Errc::NoConvergence, "Douady-Earle center did not converge");
}

namespace {

/// Moebius map sending the Douady-Earle center to 0 and the heaviest atom
/// (ties: farthest from the center, then canonical order) to the positive axis.
Mat2C canonical_frame(const DiskMeasure& mu) {
  const Mat2C t = disk_automorphism_to_origin(douady_earle_center(mu));
  const DiskAtom* best = nullptr;
  Complex ub(0.0);
  for (const auto& a : mu.atoms) {
    const Complex u = mobius(t, a.z);
    if (!best || a.weight > best->weight * (1 + 1e-12) ||
        (a.weight >= best->weight * (1 - 1e-12) && std::abs(u) > std::abs(ub) * (1 + 1e-12))) {
      best = &a;
      ub = u;
    }
  }
  Mat2C r = Mat2C::Identity();
  if (std::abs(ub) > 1e-12) {
    const Complex h = std::polar(1.0, -0.5 * std::arg(ub));
    r(0, 0) = h;
    r(1, 1) = std::conj(h);
  }
  return r * t;
}

}  // namespace

BarycenterResult conformal_barycenter(const DiskMeasure& mu0, const BarycenterOptions& opt) {
  if (mu0.atoms.empty()) throw Error(Errc::InvalidArgument, "empty measure");
  if (!(opt.tol > 0.0) || opt.max_iterations < 0 || opt.cap < 1)
    throw Error(Errc::InvalidArgument, "barycenter needs tol > 0 and cap >= 1");
  const DiskMeasure input = DiskMeasure::normalized(mu0.atoms);
  auto heaviest = [](const DiskMeasure& m) {
    const DiskAtom* best = &m.atoms.front();
    for (const auto& a : m.atoms)
      if (a.weight > best->weight) best = &a;
    return best->z;
  };
  BarycenterResult res;
  res.phi_trace.push_back(phi(input));
  res.atom_counts.push_back(input.atoms.size());
  res.diameter = hyperbolic_diameter(input);
  res.variance = hyperbolic_variance(input, heaviest(input));
  if (res.diameter < opt.tol || res.variance < opt.tol * opt.tol) {
    res.point = heaviest(input);
    return res;
  }
  // The iteration runs in a canonical frame, so compaction choices commute
  // with Moebius maps; Phi is reported in the input frame.
  const Mat2C frame = canonical_frame(input);
  const Mat2C back = inverse_unimodular(frame);
  // Snap framed coordinates to a dyadic grid: compaction is discontinuous in
  // the atom positions, and mu, M.mu must present it with identical data.
  DiskMeasure mu = input.pushed(frame);
  for (auto& a : mu.atoms)
    a.z = Complex(std::ldexp(std::round(std::ldexp(a.z.real(), kFrameSnapBits)), -kFrameSnapBits),
                  std::ldexp(std::round(std::ldexp(a.z.imag(), kFrameSnapBits)), -kFrameSnapBits));
  mu.atoms = canonical(std::move(mu.atoms));
  const Complex anchor(0.0);
  auto phi_input = [&](const DiskMeasure& m) { return phi(m.pushed(back)); };
  if (opt.lossy && mu.atoms.size() > opt.cap) mu.atoms = canonical(compact(mu.atoms, opt.cap));
  for (int it = 1;; ++it) {
    if (it > opt.max_iterations)
      throw Error(Errc::NoConvergence, "barycenter diameter " + std::to_string(res.diameter) + " after " +
                                           std::to_string(it - 1) + " pairings");
    // Lossy mode leaves near-duplicates to the component merging, which absorbs them first.
    std::vector<DiskAtom> next = self_pair(mu.atoms);
    if (!opt.lossy) next = merge_within(canonical(std::move(next)), kAtomMergeRadius, anchor);
    if (next.size() > kAtomHardCap && !opt.lossy)
      throw Error(Errc::AtomBlowup, std::to_string(next.size()) + " atoms after pairing",
                  {static_cast<long>(next.size())});
    if (opt.lossy && next.size() > opt.cap) next = compact(std::move(next), opt.cap);
    next = prune(std::move(next));
    // Rounding in the total weight doubles under self-pairing; renormalize.
    double total = 0.0;
    for (const auto& a : next) total += a.weight;
    for (auto& a : next) a.weight /= total;
    mu.atoms = canonical(std::move(next));
    res.diameter = hyperbolic_diameter(mu);
    const Complex top = hyperboloid_centroid(mu.atoms.data(), mu.atoms.size());
    res.variance = hyperbolic_variance(mu, top);
    const double p = phi_input(mu);
    if (p > res.phi_trace.back() * (1.0 + 1e-12)) res.phi_monotone = false;
    res.phi_trace.push_back(p);
    res.atom_counts.push_back(mu.atoms.size());
    if (res.diameter < opt.tol || res.variance < opt.tol * opt.tol) {
      res.point = mobius(back, top);
      res.iterations = it;
      return res;
    }
  }
}

}  // namespace sl2lab
