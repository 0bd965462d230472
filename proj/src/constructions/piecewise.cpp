#include "mcint/piecewise.hpp"

#include <algorithm>

namespace mcint {

Rational Poly::operator()(const Rational& t) const {
  Rational v = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * t + *it;
  return v;
}

Poly Poly::derivative() const {
  Poly d;
  for (std::size_t i = 1; i < c.size(); ++i) d.c.push_back(c[i] * Rational(static_cast<long>(i)));
  return d;
}

Poly Poly::scaled(const Rational& k) const {
  Poly p = *this;
  for (auto& v : p.c) v *= k;
  return p;
}

Poly Poly::stretched(const Rational& w) const {
  Poly p = *this;
  Rational f = 1;
  for (auto& v : p.c) {
    v /= f;
    f *= w;
  }
  return p;
}

PiecewiseC1Fn::PiecewiseC1Fn(std::vector<Rational> breakpoints, std::vector<Poly> pieces)
    : breaks_(std::move(breakpoints)), pieces_(std::move(pieces)) {
  if (breaks_.size() < 2 || pieces_.size() + 1 != breaks_.size()) {
    throw DomainError("piecewise function needs n+1 breakpoints for n pieces");
  }
  for (std::size_t i = 1; i < breaks_.size(); ++i) {
    if (!(breaks_[i - 1] < breaks_[i])) throw DomainError("breakpoints must be strictly increasing");
  }
}

std::size_t PiecewiseC1Fn::piece_index(const Rational& x) const {
  // Last breakpoint <= x, clamped to a valid piece.
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
  const auto i = static_cast<std::size_t>(it - breaks_.begin());
  return std::min(i == 0 ? 0 : i - 1, pieces_.size() - 1);
}

Rational PiecewiseC1Fn::operator()(const Rational& x) const {
  if (x < breaks_.front() || x > breaks_.back()) return 0;
  const std::size_t i = piece_index(x);
  return pieces_[i](x - breaks_[i]);
}

Rational PiecewiseC1Fn::derivative(const Rational& x) const {
  if (x < breaks_.front() || x > breaks_.back()) return 0;
  const std::size_t i = piece_index(x);
  return pieces_[i].derivative()(x - breaks_[i]);
}

bool PiecewiseC1Fn::is_c1() const {
  const Rational zero = 0;
  if (pieces_.front()(zero) != 0 || pieces_.front().derivative()(zero) != 0) return false;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const Rational w = breaks_[i + 1] - breaks_[i];
    const Rational v = pieces_[i](w);
    const Rational d = pieces_[i].derivative()(w);
    const bool last = i + 1 == pieces_.size();
    const Rational nv = last ? Rational(0) : pieces_[i + 1](zero);
    const Rational nd = last ? Rational(0) : pieces_[i + 1].derivative()(zero);
    if (v != nv || d != nd) return false;
  }
  return true;
}

PiecewiseC1Fn PiecewiseC1Fn::affine(const Rational& scale, const Rational& center,
                                    const Rational& width) const {
  if (width.sign() <= 0) throw DomainError("affine width must be positive");
  std::vector<Rational> b;
  std::vector<Poly> p;
  for (const auto& x : breaks_) b.push_back(center + width * x);
  for (const auto& piece : pieces_) p.push_back(piece.stretched(width).scaled(scale));
  return {std::move(b), std::move(p)};
}

namespace {

// Sign of the derivative on the open piece (0, w): +1, -1, 0 for constant,
// 2 when it changes sign. Derivatives here have degree <= 2, so the extreme
// values over [0, w] sit at the ends or at the rational vertex.
int derivative_sign(const Poly& p, const Rational& w) {
  const Poly d = p.derivative();
  std::vector<Rational> probes{d(Rational(0)), d(w)};
  if (d.c.size() > 3) throw DomainError("range() supports pieces of degree <= 3");
  if (d.c.size() == 3 && !d.c[2].is_zero()) {
    const Rational vertex = -d.c[1] / (Rational(2) * d.c[2]);
    if (vertex.sign() > 0 && vertex < w) probes.push_back(d(vertex));
  }
  const Rational lo = *std::min_element(probes.begin(), probes.end());
  const Rational hi = *std::max_element(probes.begin(), probes.end());
  if (lo.sign() >= 0 && hi.sign() > 0) return 1;
  if (hi.sign() <= 0 && lo.sign() < 0) return -1;
  if (lo.is_zero() && hi.is_zero()) return 0;
  return 2;
}

}  // namespace

std::pair<Rational, Rational> PiecewiseC1Fn::range(const Rational& lo, const Rational& hi) const {
  if (hi < lo) throw DomainError("range needs lo <= hi");
  // Candidate extremes: the interval ends and every breakpoint inside.
  std::vector<Rational> pts{lo, hi};
  for (const auto& b : breaks_) {
    if (lo < b && b < hi) pts.push_back(b);
  }
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const Rational a = max(lo, breaks_[i]);
    const Rational b = min(hi, breaks_[i + 1]);
    if (!(a < b)) continue;
    if (derivative_sign(pieces_[i], breaks_[i + 1] - breaks_[i]) == 2) {
      throw DomainError("piece is not monotone; exact range unavailable");
    }
  }
  Rational mn = (*this)(pts.front());
  Rational mx = mn;
  for (const auto& x : pts) {
    const Rational v = (*this)(x);
    mn = min(mn, v);
    mx = max(mx, v);
  }
  return {mn, mx};
}

Poly smoothstep() { return Poly{{Rational(0), Rational(0), Rational(3), Rational(-2)}}; }

namespace {

Poly falling_step() { return Poly{{Rational(1), Rational(0), Rational(-3), Rational(2)}}; }

}  // namespace

PiecewiseC1Fn bump_c1() {
  const Rational half(1, 2);
  return {{Rational(-1), -half, half, Rational(1)},
          {smoothstep().stretched(half), Poly{{Rational(1)}}, falling_step().stretched(half)}};
}

PiecewiseC1Fn ramp_c1(const Rational& a, const Rational& b, const Rational& tau) {
  if (tau.sign() <= 0 || tau >= Rational(1, 2)) throw DomainError("ramp needs 0 < tau < 1/2, got " + tau.str());
  if (!(a < b)) throw DomainError("ramp needs a < b");
  const Rational fifth = (b - a) / Rational(5);
  const Rational c1 = a + (Rational(1) + tau) * fifth;
  const Rational c2 = a + (Rational(2) - tau) * fifth;
  const Rational c3 = b - (Rational(2) - tau) * fifth;
  const Rational c4 = b - (Rational(1) + tau) * fifth;
  const Rational w = c2 - c1;
  return {{c1, c2, c3, c4},
          {smoothstep().stretched(w), Poly{{Rational(1)}}, falling_step().stretched(w)}};
}

StepFn::StepFn(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
  std::sort(pieces_.begin(), pieces_.end(), [](const Piece& x, const Piece& y) { return x.lo < y.lo; });
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (!(pieces_[i].lo < pieces_[i].hi)) throw DomainError("step pieces must be nonempty");
    if (i > 0 && pieces_[i].lo < pieces_[i - 1].hi) throw DomainError("step pieces overlap");
  }
}

Rational StepFn::operator()(const Rational& x) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](const Rational& v, const Piece& p) { return v < p.lo; });
  if (it == pieces_.begin()) return 0;
  --it;
  return x < it->hi ? it->value : Rational(0);
}

Rational StepFn::integral() const {
  Rational s = 0;
  for (const auto& p : pieces_) s += p.value * (p.hi - p.lo);
  return s;
}

Rational StepFn::integral(const Rational& lo, const Rational& hi) const {
  Rational s = 0;
  for (const auto& p : pieces_) {
    const Rational a = max(lo, p.lo);
    const Rational b = min(hi, p.hi);
    if (a < b) s += p.value * (b - a);
  }
  return s;
}

StepFn operator+(const StepFn& a, const StepFn& b) {
  std::vector<Rational> cuts;
  for (const auto* f : {&a, &b}) {
    for (const auto& p : f->pieces_) {
      cuts.push_back(p.lo);
      cuts.push_back(p.hi);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<StepFn::Piece> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const Rational v = a(cuts[i]) + b(cuts[i]);
    if (v.is_zero()) continue;
    if (!out.empty() && out.back().hi == cuts[i] && out.back().value == v) {
      out.back().hi = cuts[i + 1];
    } else {
      out.push_back({cuts[i], cuts[i + 1], v});
    }
  }
  return StepFn(std::move(out));
}

LinearSpline::LinearSpline(std::vector<Rational> xs, std::vector<Rational> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.empty() || xs_.size() != ys_.size()) throw DomainError("spline needs matching nonempty knots");
  for (std::size_t i = 1; i < xs_.size(); ++i) {
    if (!(xs_[i - 1] < xs_[i])) throw DomainError("spline knots must be strictly increasing");
  }
}

LinearSpline LinearSpline::integral_of(const StepFn& f, const Rational& start) {
  std::vector<Rational> xs{start};
  for (const auto& p : f.pieces()) {
    for (const auto& c : {p.lo, p.hi}) {
      if (c > start) xs.push_back(c);
    }
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<Rational> ys{Rational(0)};
  for (std::size_t i = 1; i < xs.size(); ++i) ys.push_back(ys.back() + f.integral(xs[i - 1], xs[i]));
  return {std::move(xs), std::move(ys)};
}

Rational LinearSpline::operator()(const Rational& x) const {
  if (x <= xs_.front()) return ys_.front();
  if (x >= xs_.back()) return ys_.back();
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  const auto i = static_cast<std::size_t>(it - xs_.begin()) - 1;
  const Rational slope = (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);
  return ys_[i] + slope * (x - xs_[i]);
}

StepFn LinearSpline::derivative() const {
  std::vector<StepFn::Piece> out;
  for (std::size_t i = 0; i + 1 < xs_.size(); ++i) {
    const Rational slope = (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);
    if (!slope.is_zero()) out.push_back({xs_[i], xs_[i + 1], slope});
  }
  return StepFn(std::move(out));
}

}  // namespace mcint
