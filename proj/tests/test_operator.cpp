#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "givental/operator_action.hpp"
#include "support/fixtures.hpp"

using namespace givental;
using testgen::Rng;

namespace {

// hat R applied through the full exact pipeline, genus-0 slice.
TruncatedSeries transformed(const CorrelatorTable &table, const RMatrix &r, SeriesCaps target,
                            TransformRoute route = TransformRoute::Operator)
{
	return transformed_free_energy(table, r, target, route);
}

} // namespace

TEST_CASE("RMatrix symmetry constraint")
{
	for (int n = 2; n <= 5; ++n)
		CHECK(RMatrix::inversion(n).entry(1, 1, n) == 1);

	// r_1 with (r_1)^{mu nu} not symmetric must be rejected
	Matrix bad = zero_matrix(2);
	bad[1][0] = 1; // (r_1)^2_1 -> bivector (r_1)^{22} fine, but pair (r_1)^{12}...
	bad[0][0] = 1; // (r_1)^{1,2}=1 vs (r_1)^{2,1}=0
	CHECK_THROWS_WITH_AS(RMatrix(2, {{1, bad}}) /* */,
	                     doctest::Contains("symmetry constraint at (mu,nu)"),
	                     std::invalid_argument);

	// skew constraint at even level: diagonal of the bivector must vanish
	Matrix bad2 = zero_matrix(2);
	bad2[0][1] = 1; // (r_2)^{11} = 1, not skew
	CHECK_THROWS_AS(RMatrix(2, {{2, bad2}}), std::invalid_argument);

	Rng rng(17);
	for (int trial = 0; trial < 10; ++trial)
		CHECK_NOTHROW(testgen::random_rmatrix(rng, 2 + trial % 3, 1 + trial % 3));
}

TEST_CASE("group_product matches the matrix exponential group law")
{
	Rng rng(23);
	auto r = testgen::random_rmatrix(rng, 2, 2);
	auto s = testgen::random_rmatrix(rng, 2, 3);
	auto p = group_product(r, s, 6);
	auto a = exp_r_series(r, 6), b = exp_r_series(s, 6), c = exp_r_series(p, 6);
	for (int j = 0; j <= 6; ++j) {
		Matrix ab = zero_matrix(2);
		for (int i = 0; i <= j; ++i)
			ab = mat_add(ab, mat_mul(a[i], b[j - i]));
		CHECK(ab == c[j]);
	}
}

TEST_CASE("apply_infinitesimal: zero element and linearity")
{
	SeriesCaps caps{2, 4, 1};
	Rng rng(5);
	auto Z = testgen::random_series(rng, caps);
	CHECK(apply_infinitesimal(RMatrix::zero(2), Z).is_zero());

	auto r = testgen::random_rmatrix(rng, 2, 2);
	auto Z2 = testgen::random_series(rng, caps);
	CHECK(apply_infinitesimal(r, add(Z, Z2)) ==
	      add(apply_infinitesimal(r, Z), apply_infinitesimal(r, Z2)));
}

TEST_CASE("apply_infinitesimal: the inversion element term by term")
{
	// (r_1 z)^ = sum_d t^{d,n} d/dt^{d+1,1} - (hbar/2) d^2/(dt^{0,1})^2
	const int n = 3;
	auto r = RMatrix::inversion(n);
	SeriesCaps caps{n, 4, 1};

	auto t11 = TruncatedSeries::variable(caps, VariableId{1, 1});
	CHECK(apply_infinitesimal(r, 1, t11) == TruncatedSeries::variable(caps, VariableId{0, n}));

	auto sq = TruncatedSeries::monomial(caps, Monomial(VariableId{0, 1}, 2), 1);
	CHECK(apply_infinitesimal(r, sq) ==
	      TruncatedSeries::monomial(caps, Monomial(1), -1));

	// no dilaton part: (r_1)^mu_1 = 0
	auto t21 = TruncatedSeries::variable(caps, VariableId{2, 1});
	CHECK(apply_infinitesimal(r, t21) ==
	      mul_monomial(TruncatedSeries::constant(caps, 1), Monomial(VariableId{1, n}, 1), 1));
}

TEST_CASE("exponentiate_action: zero element reproduces the input")
{
	Rng rng(6);
	auto table = testgen::random_g0_table(rng, 2, TableCaps{0, 5, 2}, 6);
	SeriesCaps caps{2, 5, 1};
	auto Z = table_to_partition_function(table, caps);
	CHECK(exponentiate_action(RMatrix::zero(2), Z) == Z);
	auto f0 = table_to_free_energy(table, caps);
	CHECK(transformed(table, RMatrix::zero(2), caps) == f0);
}

TEST_CASE("exponentiate_action rejects non-tame input")
{
	SeriesCaps caps{2, 4, 1};
	auto bad = TruncatedSeries::monomial(
	    caps, Monomial(-1).times_var(VariableId{2, 1}, 1).times_var(VariableId{0, 1}, 2), 1);
	CHECK_FALSE(is_tame(bad));
	CHECK_THROWS_AS(exponentiate_action(RMatrix::inversion(2), bad), std::invalid_argument);
}

TEST_CASE("2D inversion fixture: sigma~_5 = sigma_5 + 10 sigma_4 + 20 sigma_3")
{
	Rng rng(20120501);
	auto sigma = testgen::random_sigma(rng, 6);
	auto F = testgen::potential_2d(sigma, 6);
	auto table = reconstruct_descendants(F, TableCaps{0, 6, 4});
	auto r = RMatrix::inversion(2);

	SeriesCaps target{2, 5, 0};
	Monomial want = Monomial(-1).times_var(VariableId{0, 2}, 5);
	Rational expect = (sigma[5] + 10 * sigma[4] + 20 * sigma[3]) / Rational(120);

	auto ft_op = transformed(table, r, target, TransformRoute::Operator);
	CHECK(ft_op.coefficient(want) == expect);

	auto ft_fac = transformed(table, r, target, TransformRoute::Factorized);
	CHECK(ft_fac.coefficient(want) == expect);
}

TEST_CASE("tameness is preserved by the action")
{
	Rng rng(1009);
	for (int trial = 0; trial < 5; ++trial) {
		auto r = testgen::random_rmatrix(rng, 2, 1 + trial % 3);
		auto table = testgen::random_g0_table(rng, 2, TableCaps{0, 8, 3}, 5);
		SeriesCaps target{2, 4, 1};
		auto ft = transformed(table, r, target);
		CHECK(is_tame(ft));
	}
}

TEST_CASE("factorize: zero element and first-order kernels")
{
	auto f0 = factorize(RMatrix::zero(2), 4);
	for (const auto &row : f0.v)
		for (const auto &m : row)
			CHECK(mat_is_zero(m));
	for (const auto &m : f0.w)
		CHECK(mat_is_zero(m));

	// single r_1: (z+w) V(z,w) = -(hbar/2)(r_1 z + r_1 w + ...) so
	// V_{0,0} = -(1/2) r_1 as a bivector
	Rng rng(31);
	auto r = testgen::random_rmatrix(rng, 2, 1);
	auto f = factorize(r, 4);
	for (int mu = 1; mu <= 2; ++mu)
		for (int nu = 1; nu <= 2; ++nu)
			CHECK(f.v[0][0][mu - 1][nu - 1] == Rational(-1, 2) * r.bivector(1, mu, nu));

	// inversion: no dilaton kernel since r_1 e_1 = 0
	auto fi = factorize(RMatrix::inversion(3), 5);
	for (const auto &m : fi.w)
		for (int mu = 0; mu < 3; ++mu)
			CHECK(m[mu][0] == 0);
}

TEST_CASE("divisibility: (z+w) divides the edge numerator exactly")
{
	Rng rng(77);
	for (int trial = 0; trial < 10; ++trial) {
		auto r = testgen::random_rmatrix(rng, 2 + trial % 2, 1 + trial % 3);
		CHECK_NOTHROW(factorize(r, 6));
	}
}

TEST_CASE("factorized action equals the direct exponential")
{
	Rng rng(4096);
	for (int trial = 0; trial < 4; ++trial) {
		auto r = testgen::random_rmatrix(rng, 2, 1 + trial % 3);
		auto table = testgen::random_g0_table(rng, 2, TableCaps{0, 8, 3}, 5);
		SeriesCaps target{2, 5, 1};
		CHECK(transformed(table, r, target, TransformRoute::Operator) ==
		      transformed(table, r, target, TransformRoute::Factorized));
	}
}

TEST_CASE("successive actions compose by the group law (disjoint odd levels)")
{
	Rng rng(515);
	const int n = 2;
	std::map<int, Matrix> l1, l3;
	auto ra = testgen::random_rmatrix(rng, n, 1);
	l1[1] = ra.levels().at(1);
	auto rbfull = testgen::random_rmatrix(rng, n, 3);
	l3[3] = rbfull.levels().at(3);
	RMatrix r1(n, l1), r3(n, l3);

	auto table = testgen::random_g0_table(rng, n, TableCaps{0, 8, 3}, 4);
	SeriesCaps target{n, 4, 1};
	TransformCaps tc = derive_transform_caps(target);

	auto f = table_to_free_energy_pruned(table, tc.working, tc.slack_max);
	auto Z = prune_slack(exp_series(f), tc.slack_max);
	auto seq = exponentiate_action(r3, exponentiate_action(r1, Z, tc.slack_max), tc.slack_max);
	auto combined = group_product(r3, r1, 8);
	auto once = exponentiate_action(combined, Z, tc.slack_max);
	CHECK(log_series(seq).restricted(target) == log_series(once).restricted(target));

	// and in the other order, against the other group product
	auto seq2 = exponentiate_action(r1, exponentiate_action(r3, Z, tc.slack_max), tc.slack_max);
	auto once2 = exponentiate_action(group_product(r1, r3, 8), Z, tc.slack_max);
	CHECK(log_series(seq2).restricted(target) == log_series(once2).restricted(target));
}
