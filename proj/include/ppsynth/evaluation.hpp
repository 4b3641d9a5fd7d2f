#pragma once

#include <cstddef>
#include <vector>

#include "ppsynth/geometry.hpp"
#include "ppsynth/network.hpp"

namespace ppsynth {

// Empirical K function evaluated on an increasing grid of radii.
// k is nonnegative, nondecreasing, and k = 0 at r = 0.
struct KCurve {
  std::vector<double> r;
  std::vector<double> k;
};

// Fraction of the circle of radius d centred at x that lies inside the
// rectangle, computed exactly: each window side excludes one angular
// interval and the union of the (at most four) intervals is merged on the
// circle.  Returns a value in [0, 1]; x must lie in the window and d > 0.
double circle_arc_fraction(const RectDomain& dom, const Point2& x, double d);

// Default radius grids: 50 equally spaced values from 0 to a quarter of the
// domain (or network) diameter.
std::vector<double> default_r_grid(const RectDomain& dom, int n = 50);
std::vector<double> default_r_grid(const LinearNetwork& net, int n = 50);

// Inhomogeneous K function with the circular boundary correction:
//   (1/|S|) sum_i sum_{j != i} 1(|x_i - x_j| <= r)
//           / (lambda[i] lambda[j] p(x_i, d_ij)).
// lambda holds the intensity evaluated at the points; every entry must be
// positive (the offending index is reported otherwise).  Pairs whose
// correction fraction vanishes are excluded.
KCurve khat_inhom(const RectDomain& dom, const std::vector<Point2>& pts,
                  const std::vector<double>& lambda, const std::vector<double>& r_grid);

// Number of network points at shortest-path distance exactly r from u.  On
// every segment the distance function is a tent, so each segment contributes
// a crossing from either end while r is below the tent apex, plus the apex
// itself when r hits it exactly; points at a realized pair distance always
// count at least one.
int perimeter_count(const LinearNetwork& net, const NetworkLoc& u, double r);

// Geometrically corrected network K function,
//   (|L|/(n(n-1))) sum_i sum_{j != i} 1(d_L(x_i,x_j) <= r) / m(x_i, d_ij),
// whose expectation under a homogeneous Poisson process is r itself.
KCurve khat_network(const LinearNetwork& net, const std::vector<NetworkLoc>& pts,
                    const std::vector<double>& r_grid);

// Inhomogeneous variant: weights 1/(lambda[i] lambda[j] m) and
// normalization 1 / sum_i 1/lambda[i].
KCurve khat_network_inhom(const LinearNetwork& net, const std::vector<NetworkLoc>& pts,
                          const std::vector<double>& lambda, const std::vector<double>& r_grid);

// Naive pair-counting variant without the perimeter correction; its value
// depends on the network geometry (about 2r on one long segment).
KCurve khat_network_uncorrected(const LinearNetwork& net, const std::vector<NetworkLoc>& pts,
                                const std::vector<double>& r_grid);

// Propensity mean squared error between an observed pattern (the first
// n_ori entries of each vector) and a synthetic one (the rest).  lam_ori and
// lam_syn hold the two raw intensities evaluated at the pooled points; they
// are normalized by their window masses internally, so the result is
// invariant to rescaling either intensity.  Each pooled point contributes
// (p - m/(n+m))^2 with p = f_syn / (f_ori + f_syn), or p = 1/2 where both
// normalized densities vanish.
double pmse(const std::vector<double>& lam_ori, const std::vector<double>& lam_syn,
            double mass_ori, double mass_syn, std::size_t n_ori);

// Mean over synthetic curves of the integrated squared relative K error
// int (K_syn/K_ori - 1)^2 dr, trapezoidal on the subgrid where K_ori > 0.
// All curves must share the original curve's radius grid.
double mise(const KCurve& k_ori, const std::vector<KCurve>& k_syn);

}  // namespace ppsynth
