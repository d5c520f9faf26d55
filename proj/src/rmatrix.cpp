#include "givental/rmatrix.hpp"

#include <sstream>

namespace givental {

Matrix zero_matrix(int n)
{
	return Matrix(n, std::vector<Rational>(n, 0));
}

Matrix identity_matrix(int n)
{
	Matrix m = zero_matrix(n);
	for (int i = 0; i < n; ++i)
		m[i][i] = 1;
	return m;
}

Matrix mat_add(const Matrix &a, const Matrix &b)
{
	Matrix r = a;
	for (size_t i = 0; i < a.size(); ++i)
		for (size_t j = 0; j < a.size(); ++j)
			r[i][j] += b[i][j];
	return r;
}

Matrix mat_scale(const Matrix &a, const Rational &c)
{
	Matrix r = a;
	for (auto &row : r)
		for (auto &x : row)
			x *= c;
	return r;
}

Matrix mat_mul(const Matrix &a, const Matrix &b)
{
	const size_t n = a.size();
	Matrix r = zero_matrix((int)n);
	for (size_t i = 0; i < n; ++i)
		for (size_t k = 0; k < n; ++k) {
			if (a[i][k] == 0)
				continue;
			for (size_t j = 0; j < n; ++j)
				r[i][j] += a[i][k] * b[k][j];
		}
	return r;
}

bool mat_is_zero(const Matrix &a)
{
	for (const auto &row : a)
		for (const auto &x : row)
			if (!(x == 0))
				return false;
	return true;
}

RMatrix::RMatrix(int dimension, std::map<int, Matrix> levels)
    : n_(dimension), levels_(std::move(levels))
{
	if (n_ < 1)
		throw std::invalid_argument("RMatrix: dimension must be positive");
	for (auto it = levels_.begin(); it != levels_.end();) {
		auto &[l, m] = *it;
		if (l < 1)
			throw std::invalid_argument("RMatrix: levels start at 1");
		if ((int)m.size() != n_)
			throw std::invalid_argument("RMatrix: matrix size mismatch");
		for (const auto &row : m)
			if ((int)row.size() != n_)
				throw std::invalid_argument("RMatrix: matrix size mismatch");
		if (mat_is_zero(m)) {
			it = levels_.erase(it);
			continue;
		}
		// bivector symmetry: (r_l)^{mu nu} = +/- (r_l)^{nu mu}
		int sign = (l % 2 == 1) ? 1 : -1;
		for (int mu = 1; mu <= n_; ++mu)
			for (int nu = 1; nu <= n_; ++nu) {
				Rational lhs = m[mu - 1][eta_dual(nu, n_) - 1];
				Rational rhs = Rational(sign) * m[nu - 1][eta_dual(mu, n_) - 1];
				if (!(lhs == rhs)) {
					std::ostringstream os;
					os << "RMatrix: level " << l << " violates the "
					   << (sign == 1 ? "symmetry" : "skew-symmetry")
					   << " constraint at (mu,nu) = (" << mu << "," << nu << ")";
					throw std::invalid_argument(os.str());
				}
			}
		++it;
	}
}

Rational RMatrix::entry(int l, int mu, int nu) const
{
	auto it = levels_.find(l);
	return it == levels_.end() ? Rational(0) : it->second[mu - 1][nu - 1];
}

Rational RMatrix::bivector(int l, int mu, int nu) const
{
	return entry(l, mu, eta_dual(nu, n_));
}

RMatrix RMatrix::inversion(int dimension)
{
	Matrix r1 = zero_matrix(dimension);
	r1[0][dimension - 1] = 1;
	return RMatrix(dimension, {{1, r1}});
}

namespace {

std::vector<Matrix> exp_of_poly(const std::map<int, Matrix> &p, int n, int jmax)
{
	std::vector<Matrix> out(jmax + 1, zero_matrix(n));
	out[0] = identity_matrix(n);
	std::vector<Matrix> power = out; // p^k / k!
	int min_level = p.empty() ? 1 : p.begin()->first;
	for (int k = 1; k * min_level <= jmax && !p.empty(); ++k) {
		std::vector<Matrix> next(jmax + 1, zero_matrix(n));
		for (int j = 0; j <= jmax; ++j) {
			if (mat_is_zero(power[j]))
				continue;
			for (const auto &[l, m] : p) {
				if (j + l > jmax)
					break;
				next[j + l] = mat_add(next[j + l], mat_scale(mat_mul(power[j], m), Rational(1, k)));
			}
		}
		power = std::move(next);
		bool all_zero = true;
		for (int j = 0; j <= jmax; ++j) {
			if (!mat_is_zero(power[j])) {
				out[j] = mat_add(out[j], power[j]);
				all_zero = false;
			}
		}
		if (all_zero)
			break;
	}
	return out;
}

} // namespace

std::vector<Matrix> exp_r_series(const RMatrix &r, int jmax)
{
	return exp_of_poly(r.levels(), r.dimension(), jmax);
}

std::vector<Matrix> exp_r_adjoint_series(const RMatrix &r, int jmax)
{
	std::map<int, Matrix> flipped;
	for (const auto &[l, m] : r.levels())
		flipped[l] = (l % 2 == 0) ? mat_scale(m, -1) : m;
	return exp_of_poly(flipped, r.dimension(), jmax);
}

std::vector<std::vector<Matrix>> edge_quotient(const RMatrix &r, int zmax)
{
	const int n = r.dimension();
	auto mpos = exp_r_series(r, zmax + 1);
	auto mneg = exp_r_adjoint_series(r, zmax + 1);

	// P(z,w) = exp(-r(-z)) exp(r(w)) - I on the triangle a + b <= zmax + 1.
	std::vector<std::vector<Matrix>> P(zmax + 2), Q(zmax + 1);
	for (int a = 0; a <= zmax + 1; ++a)
		for (int b = 0; a + b <= zmax + 1; ++b)
			P[a].push_back(mat_mul(mneg[a], mpos[b]));
	P[0][0] = mat_add(P[0][0], mat_scale(identity_matrix(n), -1));

	// P_{c,d} = Q_{c-1,d} + Q_{c,d-1}
	for (int a = 0; a <= zmax; ++a)
		Q[a].resize(zmax + 1 - a, zero_matrix(n));
	for (int d = 0; d <= zmax; ++d)
		for (int c = 1; c + d <= zmax + 1; ++c) {
			Matrix q = P[c][d];
			if (d > 0)
				q = mat_add(q, mat_scale(Q[c][d - 1], -1));
			Q[c - 1][d] = q;
		}
	// Zero remainder: the P_{0,d} row must be reproduced.
	if (!mat_is_zero(P[0][0]))
		throw std::runtime_error("edge_quotient: nonzero constant term in the numerator");
	for (int d = 1; d <= zmax + 1; ++d) {
		Matrix rem = mat_add(P[0][d], mat_scale(Q[0][d - 1], -1));
		if (!mat_is_zero(rem))
			throw std::runtime_error("edge_quotient: (z+w) division left a nonzero remainder");
	}
	return Q;
}

RMatrix group_product(const RMatrix &r, const RMatrix &s, int jmax)
{
	const int n = r.dimension();
	if (s.dimension() != n)
		throw std::invalid_argument("group_product: dimension mismatch");
	auto a = exp_r_series(r, jmax);
	auto b = exp_r_series(s, jmax);
	// c = a*b - I, then log(I + c) = sum (-1)^{k+1} c^k / k
	std::vector<Matrix> c(jmax + 1, zero_matrix(n));
	for (int i = 0; i <= jmax; ++i)
		for (int j = 0; i + j <= jmax; ++j)
			c[i + j] = mat_add(c[i + j], mat_mul(a[i], b[j]));
	c[0] = mat_add(c[0], mat_scale(identity_matrix(n), -1));
	if (!mat_is_zero(c[0]))
		throw std::invalid_argument("group_product: internal expansion error");
	std::vector<Matrix> lg(jmax + 1, zero_matrix(n));
	std::vector<Matrix> power(jmax + 1, zero_matrix(n));
	power[0] = identity_matrix(n);
	for (int k = 1; k <= jmax; ++k) {
		std::vector<Matrix> next(jmax + 1, zero_matrix(n));
		for (int i = 0; i <= jmax; ++i)
			for (int j = 1; i + j <= jmax; ++j)
				next[i + j] = mat_add(next[i + j], mat_mul(power[i], c[j]));
		power = std::move(next);
		for (int j = 0; j <= jmax; ++j)
			lg[j] = mat_add(lg[j], mat_scale(power[j], Rational(k % 2 ? 1 : -1, k)));
	}
	std::map<int, Matrix> levels;
	for (int j = 1; j <= jmax; ++j)
		if (!mat_is_zero(lg[j]))
			levels[j] = lg[j];
	return RMatrix(n, std::move(levels));
}

} // namespace givental
