#include "bvreduce/oracle.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include <json.hpp>

#include "bvreduce/errors.hpp"

namespace bvreduce {

namespace {

/// Dense coefficients of a one-variable polynomial, evaluated by Horner.
class Poly1 {
 public:
  explicit Poly1(const SuperPoly& p) {
    if (p.nvars() != 1) throw InvalidInput("numeric oracle supports one variable only");
    if (!p.is_xi_free()) throw InvalidInput("numeric oracle expects xi-free polynomials");
    coeffs_.assign(std::max(p.max_x_degree(), 0) + 1, Complex(0));
    for (const auto& [k, c] : p.terms()) coeffs_[k.x[0]] += c.to_complex();
  }

  Complex operator()(Complex z) const {
    Complex r(0);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) r = r * z + *it;
    return r;
  }

 private:
  std::vector<Complex> coeffs_;
};

constexpr std::array<double, 8> kXk = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                       0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                       0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                       0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWk = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                       0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                       0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                       0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  Complex from, to;
};

struct Panel {
  int segment;
  double lo, hi;
  Complex value;
  double err;
  double l1;
  bool operator<(const Panel& o) const { return err < o.err; }
};

class Integrand {
 public:
  Integrand(const SuperPoly& s, const SuperPoly& f) : s_(s), f_(f) {}
  Complex operator()(Complex z) const { return f_(z) * std::exp(s_(z)); }

 private:
  Poly1 s_, f_;
};

Panel gauss_kronrod(const Integrand& g, const std::vector<Segment>& segs, int seg, double lo, double hi) {
  const Segment& sg = segs[seg];
  const Complex dz = sg.to - sg.from;
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  auto at = [&](double t) {
    Complex v = g(sg.from + t * dz) * dz;
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw Error("integrand is not finite on the contour");
    return v;
  };
  Complex centre = at(mid);
  Complex kron = centre * kWk[7];
  Complex gauss = centre * kWg[3];
  double l1 = std::abs(centre) * kWk[7];
  for (int j = 0; j < 7; ++j) {
    Complex a = at(mid - half * kXk[j]);
    Complex b = at(mid + half * kXk[j]);
    kron += (a + b) * kWk[j];
    l1 += (std::abs(a) + std::abs(b)) * kWk[j];
    if (j % 2 == 1) gauss += (a + b) * kWg[j / 2];
  }
  kron *= half;
  gauss *= half;
  return {seg, lo, hi, kron, std::abs(kron - gauss), l1 * half};
}

std::vector<Segment> segments_of(const ContourSpec& c) {
  if (c.waypoints.empty()) throw InvalidInput("contour needs at least one waypoint");
  if (!(c.ray_length > 0)) throw InvalidInput("contour ray length must be positive");
  std::vector<Segment> segs;
  const Complex first = c.waypoints.front();
  const Complex last = c.waypoints.back();
  segs.push_back({first + c.ray_length * c.end_directions[0], first});
  for (std::size_t i = 0; i + 1 < c.waypoints.size(); ++i) segs.push_back({c.waypoints[i], c.waypoints[i + 1]});
  segs.push_back({last, last + c.ray_length * c.end_directions[1]});
  return segs;
}

double re_s(const Poly1& s, Complex z) { return s(z).real(); }

}  // namespace

void check_allowable(const SuperPoly& s, const ContourSpec& c) {
  Poly1 ps(s);
  const Complex ends[2] = {c.waypoints.front(), c.waypoints.back()};
  for (int e = 0; e < 2; ++e) {
    const Complex dir = c.end_directions[e];
    if (std::abs(std::abs(dir) - 1.0) > 1e-9) throw InvalidInput("contour end direction must be a unit vector");
    double prev = re_s(ps, ends[e] + c.ray_length * dir);
    if (prev > kAllowableRe)
      throw NotAllowable("Re(s) = " + std::to_string(prev) + " at the cut-off of end " + std::to_string(e) +
                         " (need <= " + std::to_string(kAllowableRe) + ")");
    for (double f : {1.25, 1.5, 2.0, 4.0}) {
      double r = re_s(ps, ends[e] + f * c.ray_length * dir);
      if (r > prev) throw NotAllowable("Re(s) does not keep decreasing past the cut-off of end " + std::to_string(e));
      prev = r;
    }
  }
}

ComplexEstimate contour_integrate(const SuperPoly& s, const SuperPoly& f, const ContourSpec& c, double tol,
                                  int max_panels) {
  if (!(tol > 0)) throw InvalidInput("tolerance must be positive");
  check_allowable(s, c);
  Integrand g(s, f);
  const auto segs = segments_of(c);
  std::priority_queue<Panel> queue;
  Complex total(0);
  double err = 0, l1 = 0;
  constexpr int kInitialSplit = 8;
  for (int k = 0; k < static_cast<int>(segs.size()); ++k)
    for (int j = 0; j < kInitialSplit; ++j) {
      Panel p = gauss_kronrod(g, segs, k, double(j) / kInitialSplit, double(j + 1) / kInitialSplit);
      total += p.value;
      err += p.err;
      l1 += p.l1;
      queue.push(p);
    }
  const double eps = std::numeric_limits<double>::epsilon();
  while (err > std::max(tol * std::abs(total), 64 * eps * l1)) {
    if (static_cast<int>(queue.size()) >= max_panels)
      throw ToleranceNotReached("quadrature error " + std::to_string(err) + " above tolerance after " +
                                std::to_string(queue.size()) + " panels");
    Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    Panel a = gauss_kronrod(g, segs, worst.segment, worst.lo, mid);
    Panel b = gauss_kronrod(g, segs, worst.segment, mid, worst.hi);
    total += a.value + b.value - worst.value;
    err += a.err + b.err - worst.err;
    l1 += a.l1 + b.l1 - worst.l1;
    queue.push(a);
    queue.push(b);
  }
  // Recompute the sums to shed accumulated cancellation from the updates.
  ComplexEstimate out;
  out.panels = static_cast<int>(queue.size());
  while (!queue.empty()) {
    out.value += queue.top().value;
    out.err += queue.top().err;
    out.l1 += queue.top().l1;
    queue.pop();
  }
  return out;
}

std::vector<ContourSpec> default_contours(int d, Complex leading, double ray_length) {
  if (d < 2) throw InvalidInput("default contours need d >= 2");
  if (leading == Complex(0)) throw InvalidInput("leading coefficient must be nonzero");
  const double pi = std::numbers::pi;
  auto theta = [&](int k) { return (pi * (2 * k + 1) - std::arg(leading)) / d; };
  std::vector<ContourSpec> out;
  for (int k = 0; k + 1 < d; ++k) {
    ContourSpec c;
    c.waypoints = {Complex(0)};
    c.end_directions[0] = std::polar(1.0, theta(k + 1));
    c.end_directions[1] = std::polar(1.0, theta(k));
    c.ray_length = ray_length;
    out.push_back(c);
  }
  return out;
}

double fit_ray_length(const SuperPoly& s, Complex base, Complex dir, double target) {
  Poly1 ps(s);
  auto ok = [&](double t) {
    for (double f : {1.0, 1.25, 1.5, 2.0, 4.0})
      if (re_s(ps, base + f * t * dir) > target) return false;
    return true;
  };
  double hi = 1.0;
  while (!ok(hi)) {
    hi *= 2;
    if (hi > 1e6) throw NotAllowable("no decay along the requested direction");
  }
  double lo = hi / 2;
  for (int i = 0; i < 30 && !ok(lo) && hi - lo > 1e-6 * hi; ++i) {
    double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

std::vector<ContourSpec> default_contours_for(const SuperPoly& s) {
  if (s.nvars() != 1) throw InvalidInput("default contours need one variable");
  const int d = s.max_x_degree();
  if (d < 2) throw InvalidInput("default contours need an action of degree >= 2");
  auto out = default_contours(d, s.coeff(ExponentWord{d}).to_complex());
  for (auto& c : out) {
    const Complex o = c.waypoints.front();
    c.ray_length = std::max(fit_ray_length(s, o, c.end_directions[0]), fit_ray_length(s, o, c.end_directions[1]));
  }
  return out;
}

VerificationReport verify_reduction(const Action& a, const SuperPoly& f, const std::vector<ContourSpec>& contours,
                                    double tol, const ReduceOptions& options) {
  if (a.nvars() != 1) throw InvalidInput("numeric verification supports one variable only");
  ReductionSession session(a, options);
  VerificationReport report{session.reduce(f), {}, true};
  const Retraction& q = session.retraction(ReductionStage::quantum);
  std::vector<SuperPoly> reps;
  for (const auto& m : session.basis().monomials) reps.push_back(q.phi(SuperPoly::monomial(1, m)));

  const double qtol = std::max(tol * 1e-3, 1e-13);
  for (const auto& c : contours) {
    ContourCheck chk;
    chk.integral_f = contour_integrate(a.s(), f, c, qtol);
    chk.scale = std::abs(chk.integral_f.value);
    for (std::size_t j = 0; j < reps.size(); ++j) {
      chk.integral_basis.push_back(contour_integrate(a.s(), reps[j], c, qtol));
      chk.scale = std::max(chk.scale, std::abs(chk.integral_basis.back().value));
      chk.predicted += report.tau.coefficient(session.basis().monomials[j]).to_complex() * chk.integral_basis.back().value;
    }
    chk.residual = std::abs(chk.integral_f.value - chk.predicted);
    chk.pass = chk.residual <= tol * chk.scale;
    report.pass = report.pass && chk.pass;
    report.contours.push_back(std::move(chk));
  }
  return report;
}

ContourSpec parse_contour_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("contour file: ") + e.what());
  }
  auto point = [](const nlohmann::json& p) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      throw InvalidInput("contour file: points must be [re, im]");
    return Complex(p[0].get<double>(), p[1].get<double>());
  };
  if (!j.is_object() || !j.contains("waypoints") || !j["waypoints"].is_array() || j["waypoints"].empty())
    throw InvalidInput("contour file: missing waypoints");
  ContourSpec c;
  for (const auto& p : j["waypoints"]) c.waypoints.push_back(point(p));
  if (!j.contains("end_directions") || !j["end_directions"].is_array() || j["end_directions"].size() != 2)
    throw InvalidInput("contour file: end_directions must hold two points");
  for (int e = 0; e < 2; ++e) {
    Complex dir = point(j["end_directions"][e]);
    if (std::abs(dir) == 0) throw InvalidInput("contour file: zero end direction");
    c.end_directions[e] = dir / std::abs(dir);
  }
  if (!j.contains("ray_length") || !j["ray_length"].is_number() || !(j["ray_length"].get<double>() > 0))
    throw InvalidInput("contour file: ray_length must be a positive number");
  c.ray_length = j["ray_length"].get<double>();
  return c;
}

}  // namespace bvreduce
