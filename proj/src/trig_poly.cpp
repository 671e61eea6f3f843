#include "sl2lab/trig_poly.hpp"

#include <cmath>

namespace sl2lab {

namespace {

Complex phase_factor(const Mode& k, const Eigen::VectorXcd& x) {
  Complex s(0.0);
  for (std::size_t j = 0; j < k.size(); ++j)
    if (k[j] != 0) s += static_cast<double>(k[j]) * x[static_cast<Eigen::Index>(j)];
  return std::exp(Complex(0.0, kTwoPi) * s);
}

void check_mode(const Mode& k, int dim) {
  if (static_cast<int>(k.size()) != dim)
    throw Error(Errc::InvalidArgument, "mode dimension does not match the polynomial dimension");
}

}  // namespace

TrigPoly::TrigPoly(int dim) : dim_(dim), slope_(Eigen::VectorXd::Zero(dim)) {
  if (dim < 1) throw Error(Errc::InvalidArgument, "TrigPoly needs dimension >= 1");
}

TrigPoly TrigPoly::constant(int dim, Complex c) {
  TrigPoly p(dim);
  p.add(Mode(dim, 0), c);
  return p;
}

TrigPoly TrigPoly::linear(const Eigen::VectorXd& slope) {
  TrigPoly p(static_cast<int>(slope.size()));
  p.slope_ = slope;
  return p;
}

TrigPoly TrigPoly::cosine(const Mode& k, double amplitude, double phase) {
  TrigPoly p(static_cast<int>(k.size()));
  Mode neg(k);
  for (auto& v : neg) v = -v;
  const Complex e = std::exp(Complex(0.0, kTwoPi * phase));
  p.add(k, 0.5 * amplitude * e);
  p.add(neg, 0.5 * amplitude * std::conj(e));
  return p;
}

TrigPoly TrigPoly::sine(const Mode& k, double amplitude, double phase) {
  TrigPoly p(static_cast<int>(k.size()));
  Mode neg(k);
  for (auto& v : neg) v = -v;
  const Complex e = std::exp(Complex(0.0, kTwoPi * phase));
  p.add(k, Complex(0.0, -0.5) * amplitude * e);
  p.add(neg, Complex(0.0, 0.5) * amplitude * std::conj(e));
  return p;
}

TrigPoly& TrigPoly::add(const Mode& k, Complex coefficient) {
  check_mode(k, dim_);
  Complex& slot = modes_[k];
  slot += coefficient;
  if (slot == Complex(0.0)) modes_.erase(k);
  return *this;
}

TrigPoly& TrigPoly::set_slope(const Eigen::VectorXd& slope) {
  if (slope.size() != dim_) throw Error(Errc::InvalidArgument, "slope dimension mismatch");
  slope_ = slope;
  return *this;
}

Complex TrigPoly::coefficient(const Mode& k) const {
  auto it = modes_.find(k);
  return it == modes_.end() ? Complex(0.0) : it->second;
}

Complex TrigPoly::operator()(const Eigen::VectorXcd& x) const {
  if (x.size() != dim_) throw Error(Errc::InvalidArgument, "evaluation point dimension mismatch");
  Complex s(0.0);
  for (const auto& [k, c] : modes_) s += c * phase_factor(k, x);
  for (int j = 0; j < dim_; ++j)
    if (slope_[j] != 0.0) s += slope_[j] * x[j];
  return s;
}

Complex TrigPoly::operator()(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw Error(Errc::InvalidArgument, "evaluation point dimension mismatch");
  Complex s(0.0);
  for (const auto& [k, c] : modes_) {
    double kx = 0.0;
    for (int j = 0; j < dim_; ++j) kx += k[static_cast<std::size_t>(j)] * x[j];
    s += c * std::polar(1.0, kTwoPi * kx);
  }
  return s + slope_.dot(x);
}

std::pair<Complex, Complex> TrigPoly::jet(const Eigen::VectorXcd& x, const Eigen::VectorXd& v) const {
  if (x.size() != dim_ || v.size() != dim_) throw Error(Errc::InvalidArgument, "jet dimension mismatch");
  Complex value(0.0), deriv(0.0);
  for (const auto& [k, c] : modes_) {
    const Complex term = c * phase_factor(k, x);
    value += term;
    double kv = 0.0;
    for (int j = 0; j < dim_; ++j) kv += k[static_cast<std::size_t>(j)] * v[j];
    if (kv != 0.0) deriv += Complex(0.0, kTwoPi * kv) * term;
  }
  for (int j = 0; j < dim_; ++j) {
    value += slope_[j] * x[j];
    deriv += slope_[j] * v[j];
  }
  return {value, deriv};
}

bool TrigPoly::is_real(double tol) const {
  for (const auto& [k, c] : modes_) {
    Mode neg(k);
    for (auto& v : neg) v = -v;
    if (std::abs(coefficient(neg) - std::conj(c)) > tol) return false;
  }
  return true;
}

TrigPoly TrigPoly::compose_linear(const std::vector<int>& l) const {
  if (dim_ != 1) throw Error(Errc::InvalidArgument, "compose_linear needs a one-dimensional polynomial");
  const int d = static_cast<int>(l.size());
  TrigPoly out(d);
  for (const auto& [k, c] : modes_) {
    Mode kk(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) kk[static_cast<std::size_t>(j)] = k[0] * l[static_cast<std::size_t>(j)];
    out.add(kk, c);
  }
  Eigen::VectorXd s(d);
  for (int j = 0; j < d; ++j) s[j] = slope_[0] * l[static_cast<std::size_t>(j)];
  out.slope_ = s;
  return out;
}

TrigPoly TrigPoly::translated(const Eigen::VectorXcd& shift) const {
  if (shift.size() != dim_) throw Error(Errc::InvalidArgument, "shift dimension mismatch");
  TrigPoly out(dim_);
  for (const auto& [k, c] : modes_) {
    Complex ks(0.0);
    for (int j = 0; j < dim_; ++j) ks += static_cast<double>(k[static_cast<std::size_t>(j)]) * shift[j];
    out.add(k, c * std::exp(Complex(0.0, kTwoPi) * ks));
  }
  out.slope_ = slope_;
  Complex offset(0.0);
  for (int j = 0; j < dim_; ++j) offset += slope_[j] * shift[j];
  if (offset != Complex(0.0)) out.add(Mode(dim_, 0), offset);
  return out;
}

TrigPoly TrigPoly::truncated(int max_mode) const {
  TrigPoly out(dim_);
  for (const auto& [k, c] : modes_) {
    bool keep = true;
    for (int v : k) keep = keep && std::abs(v) <= max_mode;
    if (keep) out.add(k, c);
  }
  out.slope_ = slope_;
  return out;
}

TrigPoly TrigPoly::oscillating_part() const {
  TrigPoly out(dim_);
  const Mode zero(dim_, 0);
  for (const auto& [k, c] : modes_)
    if (k != zero) out.add(k, c);
  return out;
}

TrigPoly TrigPoly::insert_coordinate(int p) const {
  if (p < 0 || p > dim_) throw Error(Errc::InvalidArgument, "insert_coordinate index out of range");
  TrigPoly out(dim_ + 1);
  for (const auto& [k, c] : modes_) {
    Mode kk(k);
    kk.insert(kk.begin() + p, 0);
    out.add(kk, c);
  }
  Eigen::VectorXd s(dim_ + 1);
  s << slope_.head(p), 0.0, slope_.tail(dim_ - p);
  out.slope_ = s;
  return out;
}

TrigPoly TrigPoly::fix_coordinate(int p, Complex value) const {
  if (dim_ < 2 || p < 0 || p >= dim_) throw Error(Errc::InvalidArgument, "fix_coordinate index out of range");
  TrigPoly out(dim_ - 1);
  for (const auto& [k, c] : modes_) {
    Mode kk(k);
    const int kp = kk[static_cast<std::size_t>(p)];
    kk.erase(kk.begin() + p);
    out.add(kk, c * std::exp(Complex(0.0, kTwoPi * kp) * value));
  }
  Eigen::VectorXd s(dim_ - 1);
  s << slope_.head(p), slope_.tail(dim_ - p - 1);
  out.slope_ = s;
  if (slope_[p] != 0.0) out.add(Mode(static_cast<std::size_t>(dim_ - 1), 0), slope_[p] * value);
  return out;
}

double TrigPoly::coefficient_l1() const {
  double s = 0.0;
  for (const auto& kv : modes_) s += std::abs(kv.second);
  return s;
}

TrigPoly& TrigPoly::operator+=(const TrigPoly& other) {
  if (other.dim_ != dim_) throw Error(Errc::InvalidArgument, "TrigPoly dimension mismatch");
  for (const auto& [k, c] : other.modes_) add(k, c);
  slope_ += other.slope_;
  return *this;
}

TrigPoly& TrigPoly::operator*=(Complex s) {
  for (auto it = modes_.begin(); it != modes_.end();) {
    it->second *= s;
    if (it->second == Complex(0.0))
      it = modes_.erase(it);
    else
      ++it;
  }
  if (s.imag() != 0.0 && has_linear_part())
    throw Error(Errc::InvalidArgument, "complex scaling of a linear part is not supported");
  slope_ *= s.real();
  return *this;
}

}  // namespace sl2lab
