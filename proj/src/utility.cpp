#include "dualmax/utility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dualmax/errors.hpp"

namespace dualmax {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSlopeTol = 1e-12;
}  // namespace

PiecewiseUtility PiecewiseUtility::power(double coef, double p) {
  UtilityPiece piece;
  piece.kind = PieceKind::Power;
  piece.coef = coef;
  piece.p = p;
  return from_pieces({piece});
}

PiecewiseUtility PiecewiseUtility::log_utility(double coef) {
  UtilityPiece piece;
  piece.kind = PieceKind::Log;
  piece.coef = coef;
  return from_pieces({piece});
}

PiecewiseUtility PiecewiseUtility::linear(double slope, double intercept) {
  UtilityPiece piece;
  piece.kind = PieceKind::Linear;
  piece.slope = slope;
  piece.intercept = intercept;
  return from_pieces({piece});
}

PiecewiseUtility PiecewiseUtility::from_pieces(std::vector<UtilityPiece> pieces) {
  if (pieces.empty()) raise(Errc::ParseError, "utility needs at least one piece");
  if (pieces.front().knot != 0.0) raise(Errc::ParseError, "the first piece must start at 0");
  for (size_t j = 0; j < pieces.size(); ++j) {
    UtilityPiece& pc = pieces[j];
    pc.offset = 0.0;
    if (j > 0 && !(pc.knot > pieces[j - 1].knot))
      raise(Errc::ParseError, "knots must be strictly increasing");
    switch (pc.kind) {
      case PieceKind::Power:
        if (!(pc.coef > 0.0) || !std::isfinite(pc.coef))
          raise(Errc::ParseError, "power coefficient must be positive");
        if (!(pc.p > 0.0) || !(pc.p < 1.0))
          raise(Errc::ParseError, "power exponent must lie in (0,1)");
        break;
      case PieceKind::Log:
        if (!(pc.coef > 0.0) || !std::isfinite(pc.coef))
          raise(Errc::ParseError, "log coefficient must be positive");
        break;
      case PieceKind::Linear:
        if (!(pc.slope >= 0.0) || !std::isfinite(pc.slope))
          raise(Errc::ParseError, "linear slope must be nonnegative");
        if (!std::isfinite(pc.intercept)) raise(Errc::ParseError, "linear intercept must be finite");
        break;
    }
    if (pc.kind == PieceKind::Log && j > 0 && pc.knot <= 0.0)
      raise(Errc::ParseError, "log piece needs a positive knot unless it leads");
  }

  PiecewiseUtility u;
  u.pieces_ = std::move(pieces);

  // Continuity: shift every piece so it matches the previous one at its knot.
  for (size_t j = 1; j < u.pieces_.size(); ++j) {
    const double knot = u.pieces_[j].knot;
    const double left = u.piece_value(static_cast<int>(j) - 1, knot);
    const double right_raw = u.piece_value(static_cast<int>(j), knot);
    if (!std::isfinite(left))
      raise(Errc::ParseError, "piece value must be finite at interior knots");
    u.pieces_[j].offset = left - right_raw;
  }

  // Concavity: one-sided slopes nonincreasing across knots.
  for (size_t j = 1; j < u.pieces_.size(); ++j) {
    const double left = u.left_slope_of_piece(static_cast<int>(j) - 1);
    const double right = u.right_slope_of_piece(static_cast<int>(j));
    if (right > left + kSlopeTol * std::max(1.0, std::abs(left)))
      raise(Errc::ParseError,
            "pieces are not concave at knot " + std::to_string(u.pieces_[j].knot));
  }
  return u;
}

bool PiecewiseUtility::piecewise_linear() const {
  return std::all_of(pieces_.begin(), pieces_.end(),
                     [](const UtilityPiece& p) { return p.kind == PieceKind::Linear; });
}

int PiecewiseUtility::piece_index(double x) const {
  int j = static_cast<int>(pieces_.size()) - 1;
  while (j > 0 && x < pieces_[j].knot) --j;
  return j;
}

double PiecewiseUtility::piece_value(int j, double x) const {
  const UtilityPiece& pc = pieces_[j];
  switch (pc.kind) {
    case PieceKind::Power: return pc.offset + pc.coef * std::pow(x, pc.p);
    case PieceKind::Log: return pc.offset + pc.coef * std::log(x);
    case PieceKind::Linear: return pc.offset + pc.slope * x + pc.intercept;
  }
  return 0.0;
}

double PiecewiseUtility::piece_slope(int j, double x) const {
  const UtilityPiece& pc = pieces_[j];
  switch (pc.kind) {
    case PieceKind::Power: return x > 0.0 ? pc.coef * pc.p * std::pow(x, pc.p - 1.0) : kInf;
    case PieceKind::Log: return x > 0.0 ? pc.coef / x : kInf;
    case PieceKind::Linear: return pc.slope;
  }
  return 0.0;
}

double PiecewiseUtility::right_slope_of_piece(int j) const {
  return piece_slope(j, pieces_[j].knot);
}

double PiecewiseUtility::left_slope_of_piece(int j) const {
  if (j + 1 < static_cast<int>(pieces_.size())) return piece_slope(j, pieces_[j + 1].knot);
  // Last piece: limit at +inf.
  return pieces_[j].kind == PieceKind::Linear ? pieces_[j].slope : 0.0;
}

double PiecewiseUtility::eval(double x) const {
  if (x < 0.0) return -kInf;
  if (x == 0.0) {
    const UtilityPiece& pc = pieces_.front();
    if (pc.kind == PieceKind::Log) return -kInf;
    return piece_value(0, 0.0);
  }
  return piece_value(piece_index(x), x);
}

SubdiffInterval PiecewiseUtility::subdiff(double x) const {
  if (!(x > 0.0)) raise(Errc::NonPositivePoint, "subdifferential needs x > 0");
  const int j = piece_index(x);
  if (j > 0 && x == pieces_[j].knot)
    return {right_slope_of_piece(j), left_slope_of_piece(j - 1)};
  const double s = piece_slope(j, x);
  return {s, s};
}

double PiecewiseUtility::tail_slope() const {
  return left_slope_of_piece(static_cast<int>(pieces_.size()) - 1);
}

double PiecewiseUtility::head_slope() const { return right_slope_of_piece(0); }

double PiecewiseUtility::sup_value() const {
  const UtilityPiece& pc = pieces_.back();
  if (pc.kind != PieceKind::Linear || pc.slope > 0.0) return kInf;
  return piece_value(static_cast<int>(pieces_.size()) - 1, pc.knot);
}

double PiecewiseUtility::value_at_zero() const { return eval(0.0); }

double PiecewiseUtility::smallest_maximizer() const {
  for (size_t j = 0; j < pieces_.size(); ++j)
    if (pieces_[j].kind == PieceKind::Linear && pieces_[j].slope == 0.0) return pieces_[j].knot;
  return kInf;
}

double PiecewiseUtility::invert_slope(int j, double y) const {
  const UtilityPiece& pc = pieces_[j];
  switch (pc.kind) {
    case PieceKind::Power: return std::pow(y / (pc.coef * pc.p), 1.0 / (pc.p - 1.0));
    case PieceKind::Log: return pc.coef / y;
    case PieceKind::Linear: return pc.knot;  // slope matches across the piece
  }
  return pc.knot;
}

double PiecewiseUtility::conjugate(double y) const {
  if (y < 0.0) raise(Errc::NegativeArgument, "conjugate needs y >= 0");
  if (y == 0.0) return sup_value();
  const double s_tail = tail_slope();
  if (y < s_tail) return kInf;
  if (y == s_tail && s_tail > 0.0) {
    // Linear tail with slope exactly y: U(x) - xy is constant on the tail.
    const double a = pieces_.back().knot;
    return eval(a) - y * a;
  }

  const int k = static_cast<int>(pieces_.size());
  for (int j = 0; j < k; ++j) {
    if (y > left_slope_of_piece(j)) {
      double xs;
      if (y >= right_slope_of_piece(j)) {
        xs = pieces_[j].knot;  // kink (or x = 0 for a flat-enough head)
      } else {
        xs = invert_slope(j, y);
        xs = std::max(xs, pieces_[j].knot);
        if (j + 1 < k) xs = std::min(xs, pieces_[j + 1].knot);
      }
      return eval(xs) - xs * y;
    }
  }
  // y equals the tail slope limit of a power/log tail: unreachable since
  // those limits are 0 and y > 0 here.
  raise(Errc::InternalError, "conjugate slope scan fell through");
}

SubdiffInterval PiecewiseUtility::conjugate_argmax(double y) const {
  if (!(y > 0.0) || y <= tail_slope())
    raise(Errc::OutsideDomain, "maximizer set needs y inside the conjugate domain");
  const int k = static_cast<int>(pieces_.size());

  double xlo = 0.0;
  for (int j = 0; j < k; ++j) {
    if (right_slope_of_piece(j) <= y) {
      xlo = pieces_[j].knot;
      break;
    }
    if (left_slope_of_piece(j) <= y) {
      xlo = invert_slope(j, y);
      xlo = std::max(xlo, pieces_[j].knot);
      if (j + 1 < k) xlo = std::min(xlo, pieces_[j + 1].knot);
      break;
    }
  }

  double xhi = 0.0;
  for (int j = k - 1; j >= 0; --j) {
    const double left = left_slope_of_piece(j);
    const double right = right_slope_of_piece(j);
    if (left >= y) {
      // The whole piece keeps slope >= y; the maximizer set reaches the next knot.
      xhi = (j + 1 < k) ? pieces_[j + 1].knot : kInf;
      break;
    }
    if (right >= y) {
      xhi = invert_slope(j, y);
      xhi = std::max(xhi, pieces_[j].knot);
      if (j + 1 < k) xhi = std::min(xhi, pieces_[j + 1].knot);
      break;
    }
  }
  return {xlo, std::max(xhi, xlo)};
}

std::optional<double> PiecewiseUtility::conjugate_curvature(double y) const {
  if (!(y > 0.0) || y <= tail_slope()) return std::nullopt;
  const int k = static_cast<int>(pieces_.size());
  // The conjugate kinks exactly at the slopes of linear pieces.
  for (const auto& pc : pieces_)
    if (pc.kind == PieceKind::Linear && pc.slope == y) return std::nullopt;
  for (int j = 0; j < k; ++j) {
    const UtilityPiece& pc = pieces_[j];
    if (pc.kind == PieceKind::Linear) continue;
    if (y > left_slope_of_piece(j) && y < right_slope_of_piece(j)) {
      const double x = invert_slope(j, y);
      if (pc.kind == PieceKind::Power) return x / ((1.0 - pc.p) * y);
      return pc.coef / (y * y);  // log
    }
  }
  // Knot fans, boundary slopes and the region beyond the head slope are all
  // flat (or one-sided flat) for the conjugate.
  return 0.0;
}

InadaReport PiecewiseUtility::inada() const {
  InadaReport rep;
  rep.inf_slope = tail_slope();
  rep.sup_slope = head_slope();
  rep.passes = (rep.inf_slope == 0.0) && std::isinf(rep.sup_slope);
  return rep;
}

ElasticityReport asymptotic_elasticity(const PiecewiseUtility& U, double y_floor) {
  if (!(y_floor > 0.0)) raise(Errc::NegativeArgument, "y_floor must be positive");
  ElasticityReport rep;

  const auto& pieces = U.pieces();
  if (pieces.size() == 1 && pieces[0].kind == PieceKind::Power) {
    rep.closed_form = true;
    rep.value = pieces[0].p / (1.0 - pieces[0].p);
  } else if (pieces.size() == 1 && pieces[0].kind == PieceKind::Log) {
    rep.closed_form = true;
    rep.value = 0.0;
  }

  const double s_tail = U.tail_slope();
  bool any_positive = false;
  double best = 0.0;
  for (int k = 1; k <= 60; ++k) {
    const double y = std::ldexp(1.0, -k);
    if (y < y_floor) break;
    const double v = U.conjugate(y);
    if (!std::isfinite(v) || v <= 0.0) continue;
    any_positive = true;
    const double q_sup = (y > s_tail) ? U.conjugate_argmax(y).hi
                                      : std::numeric_limits<double>::infinity();
    best = std::max(best, q_sup * y / v);
  }
  rep.numeric_estimate = best;
  rep.conjugate_positive_near_zero = any_positive;
  if (!any_positive) {
    rep.value = 0.0;
    return rep;
  }
  if (!rep.closed_form) rep.value = rep.numeric_estimate;
  return rep;
}

}  // namespace dualmax
