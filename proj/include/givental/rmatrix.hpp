#pragma once

#include <map>
#include <vector>

#include "givental/cohft.hpp"

namespace givental {

// Dense n x n rational matrix; storage 0-based, mathematical indices 1-based.
using Matrix = std::vector<std::vector<Rational>>;

Matrix zero_matrix(int n);
Matrix identity_matrix(int n);
Matrix mat_add(const Matrix &a, const Matrix &b);
Matrix mat_scale(const Matrix &a, const Rational &c);
Matrix mat_mul(const Matrix &a, const Matrix &b);
bool mat_is_zero(const Matrix &a);

// Group-element datum of the upper-triangular Givental action: a finitely
// supported sequence r_1, r_2, ... of n x n matrices. The eta-raised
// bivector (r_l)^{mu nu} = (r_l)^mu_rho eta^{rho nu} must be symmetric for
// odd l and skew-symmetric for even l; the constructor rejects anything
// else, naming the offending (l, mu, nu).
class RMatrix {
public:
	RMatrix(int dimension, std::map<int, Matrix> levels);

	int dimension() const { return n_; }
	const std::map<int, Matrix> &levels() const { return levels_; }
	bool is_zero() const { return levels_.empty(); }
	int max_level() const { return levels_.empty() ? 0 : levels_.rbegin()->first; }

	// (r_l)^mu_nu, 1-based; 0 for absent levels.
	Rational entry(int l, int mu, int nu) const;
	// (r_l)^{mu nu} = (r_l)^mu_{n+1-nu}; the single source of sign truth.
	Rational bivector(int l, int mu, int nu) const;

	static RMatrix zero(int dimension) { return RMatrix(dimension, {}); }
	// The Theorem-3.1 element: r_1 with (r_1)^1_n = 1, everything else 0.
	static RMatrix inversion(int dimension);

private:
	int n_;
	std::map<int, Matrix> levels_;
};

// [z^j] exp(sum_l r_l z^l) for j = 0..jmax.
std::vector<Matrix> exp_r_series(const RMatrix &r, int jmax);
// [z^j] exp(-r(-z)) = [z^j] exp(sum_l (-1)^{l+1} r_l z^l).
std::vector<Matrix> exp_r_adjoint_series(const RMatrix &r, int jmax);
// [z^j] log(exp(r(z)) * exp(s(z))) as an RMatrix: the group law upstairs.
RMatrix group_product(const RMatrix &r, const RMatrix &s, int jmax);

// Q with (z+w) Q(z,w) = exp(-r(-z)) exp(r(w)) - I, computed by long
// division on the triangle i + j <= zmax. The numerator vanishes on
// z = -w, so the division is exact; a nonzero remainder aborts.
std::vector<std::vector<Matrix>> edge_quotient(const RMatrix &r, int zmax);

} // namespace givental
