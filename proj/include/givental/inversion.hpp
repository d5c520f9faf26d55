#pragma once

#include "givental/graphs.hpp"

namespace givental {

// The distinguished group element of the inversion symmetry and its
// expansion points: source (0,...,0,1), target (0,...,0,-1); the series
// variable t^{0,n} measures epsilon = that^n + 1 on the target side.
struct InversionData {
	int dimension;
	RMatrix r;

	explicit InversionData(int n) : dimension(n), r(RMatrix::inversion(n)) {}
};

// Rational point (t^1, ..., t^n) in absolute flat coordinates.
using Point = std::vector<Rational>;

// that^1 = (1/2) t_s t^s / t^n, that^a = t^a / t^n, that^n = -1/t^n.
Point invert_coordinates(const Point &t);
// The inverse map; composition is the identity away from t^n = 0.
Point invert_coordinates_inverse(const Point &that);

// |Aut2(alpha, beta)| in {1, 2, 8}: coincidences among alpha, beta and
// their eta-duals, for 2 <= alpha, beta <= n-1.
int aut2_order(int alpha, int beta, int n);

// The three pieces of the inversion-transformed potential, expanded at the
// target point with that^n = -1 + eps (eps is the t^{0,n} variable):
// the eta-cubic, the quartic Q-term (1/(8 that^n))(sum that^a that^abar)^2,
// and (that^n)^2 H(-that^2/that^n, ..., -1/that^n).
TruncatedSeries inversion_q_sector(int dimension, SeriesCaps caps);
TruncatedSeries inversion_h_sector(const FrobeniusPotential &F, SeriesCaps caps);

// Route A of Theorem 3.1: the coordinate-form transform, reassembled as a
// Frobenius potential in the hatted displacement coordinates.
FrobeniusPotential invert_potential(const FrobeniusPotential &F, int cap);

enum class GiventalRoute { Graphs, Operator };

struct CoefficientRow {
	Monomial monomial;
	Rational coordinate_value;
	Rational givental_value;
	bool equal;
};

// One row per monomial of total degree 3..cap (both routes normalize away
// degree <= 2).
struct CoefficientReport {
	int dimension = 0;
	int cap = 0;
	std::vector<CoefficientRow> rows;

	bool all_equal() const;
	std::vector<CoefficientRow> mismatches() const;
};

// Runs both routes of Theorem 3.1 and compares coefficientwise: route A is
// invert_potential, route B the genus-0 descendant-free part of the
// transformed partition function built from F at the source point.
CoefficientReport verify_inversion_theorem(const FrobeniusPotential &F, int cap,
                                           GiventalRoute route = GiventalRoute::Graphs);

// Route B alone (the transformed descendant-free genus-0 potential).
TruncatedSeries givental_transformed_potential(const FrobeniusPotential &F, int cap,
                                               GiventalRoute route = GiventalRoute::Graphs);

} // namespace givental
