#pragma once

#include <complex>
#include <string>
#include <vector>

#include "bvreduce/reduce.hpp"

namespace bvreduce {

using Complex = std::complex<double>;

/// Polyline through the waypoints with a straight ray attached at each end.
/// The contour enters along waypoints.front() + t * end_directions[0]
/// (t from ray_length down to 0) and leaves along
/// waypoints.back() + t * end_directions[1].
struct ContourSpec {
  std::vector<Complex> waypoints;
  Complex end_directions[2] = {Complex(-1, 0), Complex(1, 0)};
  double ray_length = 10.0;
};

struct ComplexEstimate {
  Complex value;
  double err = 0.0;
  /// Integral of |f e^s| along the contour, used for the round-off floor.
  double l1 = 0.0;
  int panels = 0;
};

/// Re(s) at both cut-off points must be at most this.
inline constexpr double kAllowableRe = -30.0;

/// Throws NotAllowable unless Re(s) <= kAllowableRe at both ray ends and
/// Re(s) keeps decreasing just past them.
void check_allowable(const SuperPoly& s, const ContourSpec& c);

/// Adaptive Gauss-Kronrod (7/15) quadrature of f e^s dz along c, with a
/// global error queue.  Stops when err <= max(tol |I|, 64 eps L1); throws
/// ToleranceNotReached past max_panels.
ComplexEstimate contour_integrate(const SuperPoly& s, const SuperPoly& f, const ContourSpec& c, double tol,
                                  int max_panels = 20000);

/// d - 1 contours through 0 for an action with leading term leading * x^d.
/// Contour k comes in along the decay direction theta_{k+1} and leaves along
/// theta_k, theta_k = (pi (2k+1) - arg(leading)) / d.
std::vector<ContourSpec> default_contours(int d, Complex leading = 1.0, double ray_length = 10.0);
/// default_contours with each ray length fitted so that Re(s) <= -40 at the
/// cut-off for the full action.
std::vector<ContourSpec> default_contours_for(const SuperPoly& s);

/// Shortest ray (by doubling, then bisection) along dir from base with
/// Re(s) <= target at the end and beyond.
double fit_ray_length(const SuperPoly& s, Complex base, Complex dir, double target = -40.0);

struct ContourCheck {
  ComplexEstimate integral_f;
  std::vector<ComplexEstimate> integral_basis;
  Complex predicted;
  double residual = 0.0;
  double scale = 0.0;
  bool pass = false;
};

struct VerificationReport {
  JacClass tau;
  std::vector<ContourCheck> contours;
  bool pass = true;
};

/// Checks I(f) = sum_m tau(f)_m I(rep_m) on every contour, where rep_m is the
/// representative the reduction's section assigns to basis monomial m.
VerificationReport verify_reduction(const Action& a, const SuperPoly& f, const std::vector<ContourSpec>& contours,
                                    double tol, const ReduceOptions& options = {});

/// Parses {"waypoints": [[re, im], ...], "end_directions": [[re, im], [re, im]],
/// "ray_length": R}.  Throws InvalidInput on malformed data.
ContourSpec parse_contour_json(const std::string& text);

}  // namespace bvreduce
