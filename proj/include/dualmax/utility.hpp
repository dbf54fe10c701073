#pragma once

// Nonsmooth concave utility on the positive half-line, assembled from
// power / log / linear pieces joined continuously at increasing knots.
// Subdifferentials are closed intervals [right derivative, left derivative];
// the Fenchel conjugate and its argmax come from exact inversion of the
// piecewise slope map.

#include <optional>
#include <vector>

namespace dualmax {

enum class PieceKind { Power, Log, Linear };

struct UtilityPiece {
  PieceKind kind = PieceKind::Linear;
  double knot = 0.0;       // left endpoint of the piece's interval
  double coef = 1.0;       // power / log coefficient
  double p = 0.5;          // power exponent, in (0,1)
  double slope = 0.0;      // linear slope (>= 0)
  double intercept = 0.0;  // linear intercept (meaningful on the leading piece)
  double offset = 0.0;     // continuity shift, filled in at construction
};

struct SubdiffInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v, double tol = 0.0) const { return v >= lo - tol && v <= hi + tol; }
};

struct InadaReport {
  double inf_slope = 0.0;
  double sup_slope = 0.0;  // +inf for power/log heads
  bool passes = false;
};

struct ElasticityReport {
  double value = 0.0;             // closed form when recognized, else the grid estimate
  double numeric_estimate = 0.0;  // max of the dyadic-grid ratios (always reported)
  bool closed_form = false;
  bool conjugate_positive_near_zero = true;  // false -> ratio undefined, value pinned to 0
};

class PiecewiseUtility {
 public:
  static PiecewiseUtility power(double coef, double p);
  static PiecewiseUtility log_utility(double coef);
  static PiecewiseUtility linear(double slope, double intercept = 0.0);
  // Validates ordering, concavity and monotonicity, then pins continuity
  // offsets at the knots.
  static PiecewiseUtility from_pieces(std::vector<UtilityPiece> pieces);

  const std::vector<UtilityPiece>& pieces() const { return pieces_; }
  bool piecewise_linear() const;

  // Value; -inf for x < 0, right limit at 0.
  double eval(double x) const;
  // [right derivative, left derivative] at x > 0.
  SubdiffInterval subdiff(double x) const;

  // Fenchel conjugate sup_x { U(x) - xy } for y >= 0; +inf below the tail
  // slope, sup U at y = 0.
  double conjugate(double y) const;
  // The maximizer set, a closed interval (unbounded above only when the tail
  // is linear with slope exactly y, which the precondition y > tail slope
  // excludes).  Requires y in the interior of the conjugate's domain; at the
  // boundary the maximizer escapes to infinity and OutsideDomain is raised.
  SubdiffInterval conjugate_argmax(double y) const;
  // Second derivative of the conjugate where it exists: a positive value on
  // images of strictly concave pieces, 0 across knot fans, nullopt at the
  // finitely many slopes where the conjugate itself has a kink.
  std::optional<double> conjugate_curvature(double y) const;

  InadaReport inada() const;

  double tail_slope() const;   // limit of the slope at +inf = inf of the subdifferentials
  double head_slope() const;   // limit of the slope at 0+  = sup of the subdifferentials
  double sup_value() const;    // lim U at +inf (= conjugate at 0)
  double value_at_zero() const;
  // inf of the maximizers of U; +inf when U is strictly increasing.
  double smallest_maximizer() const;

 private:
  PiecewiseUtility() = default;
  int piece_index(double x) const;           // piece whose interval contains x >= 0
  double piece_value(int j, double x) const;
  double piece_slope(int j, double x) const;  // interior slope
  double right_slope_of_piece(int j) const;   // slope at the piece's left end
  double left_slope_of_piece(int j) const;    // slope approaching the right end
  double invert_slope(int j, double y) const;

  std::vector<UtilityPiece> pieces_;
};

// AE(U~) = limsup_{y->0} sup_{q in dU~(y)} |q| y / U~(y), estimated on the
// dyadic grid y = 2^-k, k = 1..60 (points below y_floor skipped), with exact
// values substituted for single-piece power and log utilities.
ElasticityReport asymptotic_elasticity(const PiecewiseUtility& U, double y_floor = 1e-300);

}  // namespace dualmax
