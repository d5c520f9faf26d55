#pragma once

// Frobenius-manifold fixtures and independent oracles used across suites.

#include "givental/cohft.hpp"
#include "givental/rmatrix.hpp"
#include "support/generators.hpp"

namespace givental::testgen {

// Valid group element: random bivectors with the right (skew-)symmetry per
// level, pushed back through the eta-raising.
inline RMatrix random_rmatrix(Rng &rng, int n, int max_level, int den_range = 5)
{
	std::map<int, Matrix> levels;
	for (int l = 1; l <= max_level; ++l) {
		Matrix s = zero_matrix(n);
		for (int i = 0; i < n; ++i)
			for (int j = (l % 2 ? i : i + 1); j < n; ++j) {
				Rational c = random_rational(rng, 4, den_range);
				s[i][j] = c;
				s[j][i] = (l % 2 ? c : -c);
			}
		Matrix m = zero_matrix(n);
		for (int mu = 1; mu <= n; ++mu)
			for (int nu = 1; nu <= n; ++nu)
				m[mu - 1][nu - 1] = s[mu - 1][eta_dual(nu, n) - 1];
		levels[l] = m;
	}
	return RMatrix(n, std::move(levels));
}

// F = (1/2)(t^1)^2 t^2 + sum_{k=3..order} sigma_k (t^2)^k / k!
inline FrobeniusPotential potential_2d(const std::map<int, Rational> &sigma, int order)
{
	SeriesCaps caps{2, order, 1};
	TruncatedSeries h(caps);
	for (const auto &[k, s] : sigma) {
		if (k < 3 || k > order)
			throw std::invalid_argument("potential_2d: sigma index out of range");
		h = add(h, TruncatedSeries::monomial(caps, Monomial(VariableId{0, 2}, k),
		                                     s / Rational(factorial(k))));
	}
	return FrobeniusPotential::from_h_jet(2, h);
}

inline std::map<int, Rational> random_sigma(Rng &rng, int order)
{
	std::map<int, Rational> sigma;
	for (int k = 3; k <= order; ++k)
		sigma[k] = random_nonzero_rational(rng);
	return sigma;
}

// Random H-jet in t^2..t^n of order 3..order (no WDVV constraint).
inline FrobeniusPotential random_potential(Rng &rng, int n, int order, int sparsity = 100)
{
	SeriesCaps caps{n, order, 1};
	TruncatedSeries h(caps);
	std::uniform_int_distribution<int> keep(1, 100);
	// all monomials in t^2..t^n with degree 3..order
	std::function<void(int, int, Monomial)> rec = [&](int mu, int deg, Monomial m) {
		if (deg >= 3 && keep(rng) <= sparsity)
			h = add(h, TruncatedSeries::monomial(caps, m, random_rational(rng)));
		if (mu > n || deg == order)
			return;
		for (int nu = mu; nu <= n; ++nu)
			rec(nu, deg + 1, m.times_var(VariableId{0, nu}, 1));
	};
	rec(2, 0, Monomial::one());
	return FrobeniusPotential::from_h_jet(n, h);
}

// n = 3 solution of WDVV to jet order M, built as a Cauchy problem: the
// coefficients of H with at most two powers of t^3 are free, and
//     H_{333} = (H_{223})^2 - H_{222} H_{233}
// determines every higher t^3-derivative (strictly lower t^3-order on the
// right), so the jet fills in order by order.
inline FrobeniusPotential wdvv_potential_3d(Rng &rng, int order)
{
	SeriesCaps caps{3, order, 1};
	const VariableId x{0, 2}, y{0, 3};
	TruncatedSeries h(caps);
	for (int b = 0; b <= 2; ++b)
		for (int a = std::max(0, 3 - b); a + b <= order; ++a)
			h = add(h, TruncatedSeries::monomial(
			               caps, Monomial(x, a).times_var(y, b), random_rational(rng)));
	for (int b = 3; b <= order; ++b) {
		auto hxxy = partial(partial(partial(h, x), x), y);
		auto hxxx = partial(partial(partial(h, x), x), x);
		auto hxyy = partial(partial(partial(h, x), y), y);
		auto p = sub(mul(hxxy, hxxy), mul(hxxx, hxyy));
		for (int a = 0; a + b <= order; ++a) {
			Rational c = p.coefficient(Monomial(x, a).times_var(y, b - 3));
			c /= Rational(b) * (b - 1) * (b - 2);
			h = add(h, TruncatedSeries::monomial(caps, Monomial(x, a).times_var(y, b), c));
		}
	}
	return FrobeniusPotential::from_h_jet(3, h);
}

inline FrobeniusPotential wdvv_potential(Rng &rng, int n, int order)
{
	if (n == 2)
		return random_potential(rng, 2, order);
	if (n == 3)
		return wdvv_potential_3d(rng, order);
	throw std::invalid_argument("wdvv_potential: only n = 2, 3 fixtures");
}

// Sparse random genus-0 table with tame entries (sum d <= k - 3).
inline CorrelatorTable random_g0_table(Rng &rng, int n, TableCaps caps, int entries)
{
	CorrelatorTable t(n, caps);
	std::uniform_int_distribution<int> k_dist(3, caps.max_insertions);
	std::uniform_int_distribution<int> mu(1, n);
	for (int i = 0; i < entries; ++i) {
		int k = k_dist(rng);
		int dmax = std::min(caps.max_total_level, k - 3);
		std::uniform_int_distribution<int> d_total(0, dmax);
		int budget = d_total(rng);
		InsertionList ins;
		for (int j = 0; j < k; ++j) {
			std::uniform_int_distribution<int> d(0, budget);
			int dj = (j + 1 < k) ? d(rng) : budget;
			budget -= dj;
			ins.push_back(Insertion{dj, mu(rng)});
		}
		t.set(0, ins, random_nonzero_rational(rng));
	}
	return t;
}

// Right-hand side of the genus-0 TRR for a chosen pivot and companion
// pair, with factor values read back from the table: the oracle for
// choice-independence.
inline Rational trr_rhs(const CorrelatorTable &table, const InsertionList &ins, size_t pivot,
                        size_t comp1, size_t comp2)
{
	const int n = table.dimension();
	InsertionList pool;
	for (size_t i = 0; i < ins.size(); ++i)
		if (i != pivot && i != comp1 && i != comp2)
			pool.push_back(ins[i]);
	Rational total = 0;
	// iterate over subsets of the pool by index mask (pool is small here)
	for (unsigned mask = 0; mask < (1u << pool.size()); ++mask) {
		InsertionList left{Insertion{ins[pivot].d - 1, ins[pivot].mu}};
		InsertionList right{ins[comp1], ins[comp2]};
		for (size_t i = 0; i < pool.size(); ++i)
			(mask & (1u << i) ? left : right).push_back(pool[i]);
		for (int lam = 1; lam <= n; ++lam) {
			InsertionList l = left, r = right;
			l.push_back(Insertion{0, lam});
			r.push_back(Insertion{0, eta_dual(lam, n)});
			Rational lv = table.lookup(0, l);
			if (lv == 0)
				continue;
			total += lv * table.lookup(0, r);
		}
	}
	return total;
}

} // namespace givental::testgen
