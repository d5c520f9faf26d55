#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "givental/hierarchy.hpp"
#include "support/fixtures.hpp"

using namespace givental;
using testgen::Rng;

namespace {

TruncatedSeries var(SeriesCaps caps, int mu) { return TruncatedSeries::variable(caps, VariableId{0, mu}); }

// independent oracle: theta as a second derivative of the genus-0 free
// energy, restricted to the small phase space
TruncatedSeries theta_oracle(const FrobeniusPotential &F, int alpha, int p, int cap)
{
	const int n = F.dimension();
	SeriesCaps caps{n, cap + 2, 1};
	auto table = reconstruct_descendants(F, TableCaps{0, cap + 2, p});
	TruncatedSeries f = table_to_free_energy(table, caps);
	TruncatedSeries f0(caps);
	for (const auto &[m, c] : f.terms())
		if (m.hbar_power() == -1)
			f0 = add(f0, TruncatedSeries::monomial(caps, m.times_hbar(1), c));
	f0 = f0.with_watermark(cap + 2);
	auto d2 = partial(partial(f0, VariableId{p, alpha}), VariableId{0, 1});
	TruncatedSeries out(SeriesCaps{n, cap, 1});
	for (const auto &[m, c] : d2.terms())
		if (m.weighted_degree() == 0 && m.degree() <= cap)
			out = add(out, TruncatedSeries::monomial(out.caps(), m, c));
	return out;
}

} // namespace

TEST_CASE("theta base case: theta_{alpha,0} = v_alpha")
{
	Rng rng(1);
	for (int n = 2; n <= 3; ++n) {
		auto F = testgen::wdvv_potential(rng, n, 6);
		for (int alpha = 1; alpha <= n; ++alpha) {
			auto th = theta(F, alpha, 0, 4);
			CHECK(th.value == var(th.value.caps(), eta_dual(alpha, n)));
		}
	}
}

TEST_CASE("theta_{1,1} is the eta pairing")
{
	Rng rng(2);
	auto F = testgen::wdvv_potential(rng, 2, 6);
	auto th = theta(F, 1, 1, 4);
	SeriesCaps caps = th.value.caps();
	CHECK(th.value == mul(var(caps, 1), var(caps, 2)));
}

TEST_CASE("theta agrees with the double-derivative oracle")
{
	Rng rng(3);
	for (int n = 2; n <= 3; ++n) {
		auto F = testgen::wdvv_potential(rng, n, 7);
		for (int p = 0; p <= 2; ++p)
			for (int alpha = 1; alpha <= n; ++alpha)
				CHECK(theta(F, alpha, p, 4).value == theta_oracle(F, alpha, p, 4));
	}
}

TEST_CASE("u_operator on constants and coordinates")
{
	for (int n = 2; n <= 4; ++n) {
		SeriesCaps caps{n, 4, 1};
		auto one = TruncatedSeries::constant(caps, 1);
		CHECK(u_operator(one) == neg(var(caps, n)));

		// U v^1 = -(1/2) sum_g v^g v^{n+1-g}
		TruncatedSeries pairing(caps);
		for (int g = 1; g <= n; ++g)
			pairing = add(pairing, mul(var(caps, g), var(caps, eta_dual(g, n))));
		CHECK(u_operator(var(caps, 1)) == scale(pairing, Rational(-1, 2)));

		// U v^n = 0 exactly
		CHECK(u_operator(var(caps, n)).is_zero());
	}
}

TEST_CASE("infinitesimal deformation matches U theta + delta theta_{1,p+1}")
{
	Rng rng(4);
	for (int n = 2; n <= 3; ++n) {
		auto F = testgen::wdvv_potential(rng, n, 8);
		const int cap = 4;
		for (int p = 0; p <= 1; ++p)
			for (int alpha = 1; alpha <= n; ++alpha) {
				auto lhs = theta_deformation(F, alpha, p, cap);
				auto rhs = u_operator(theta(F, alpha, p, cap).value);
				if (alpha == n)
					rhs = add(rhs, theta(F, 1, p + 1, cap).value);
				CHECK(lhs == rhs.restricted(lhs.caps()));
			}
	}
}

TEST_CASE("middle range: transformed density equals the LXZ density exactly")
{
	Rng rng(5);
	auto F = testgen::wdvv_potential(rng, 3, 8);
	for (int p = 0; p <= 2; ++p) {
		auto ours = transform_hamiltonians(F, 2, p, 5);
		auto lxz = lxz_hamiltonians(F, 2, p, 5);
		CHECK(ours.value == lxz.value);
	}
}

TEST_CASE("boundary densities are cross-level LXZ combinations")
{
	Rng rng(6);
	for (int n = 2; n <= 3; ++n) {
		auto F = testgen::wdvv_potential(rng, n, 8);
		const int cap = 5;
		for (int p = 1; p <= 2; ++p)
			CHECK(transform_hamiltonians(F, 1, p, cap).value ==
			      lxz_hamiltonians(F, n, p - 1, cap).value);
		// theta-hat_{n,p} = lxz_{n,p} - lxz_{1,p+1}
		for (int p = 0; p <= 1; ++p)
			CHECK(transform_hamiltonians(F, n, p, cap).value ==
			      sub(lxz_hamiltonians(F, n, p, cap).value,
			          lxz_hamiltonians(F, 1, p + 1, cap).value));
		// theta-hat_{1,0} = lxz_{1,0} + 1: equality modulo constants
		auto diff = sub(transform_hamiltonians(F, 1, 0, cap).value,
		                lxz_hamiltonians(F, 1, 0, cap).value);
		CHECK(diff == TruncatedSeries::constant(diff.caps(), 1));
	}
}

TEST_CASE("span comparison: the transformed family lies in the LXZ span")
{
	Rng rng(7);
	for (int n = 2; n <= 3; ++n) {
		auto F = testgen::wdvv_potential(rng, n, 8);
		const int cap = 5, pmax = 2;
		std::vector<HamiltonianDensity> ours, lxz;
		for (int p = 0; p <= pmax; ++p)
			for (int alpha = 1; alpha <= n; ++alpha) {
				ours.push_back(transform_hamiltonians(F, alpha, p, cap));
				lxz.push_back(lxz_hamiltonians(F, alpha, p, cap));
			}
		// the n-boundary at the top level reaches one level further
		lxz.push_back(lxz_hamiltonians(F, 1, pmax + 1, cap));

		auto cmp = compare_spans(ours, lxz, cap);
		CHECK(cmp.a_in_span_b);
		REQUIRE(cmp.change_of_basis.size() == ours.size());
		// the change of basis reconstructs each density modulo constants
		for (size_t i = 0; i < ours.size(); ++i) {
			TruncatedSeries rebuilt(ours[i].value.caps());
			for (size_t j = 0; j < lxz.size(); ++j)
				rebuilt = add(rebuilt, scale(lxz[j].value, cmp.change_of_basis[i][j]));
			auto diff = sub(ours[i].value, rebuilt);
			for (const auto &[m, c] : diff.terms())
				CHECK(m.degree() == 0);
		}
	}
}

TEST_CASE("span comparison: a perturbed family yields a certificate")
{
	Rng rng(8);
	auto F = testgen::wdvv_potential(rng, 2, 7);
	const int cap = 4;
	std::vector<HamiltonianDensity> ours, lxz;
	for (int p = 0; p <= 1; ++p)
		for (int alpha = 1; alpha <= 2; ++alpha) {
			ours.push_back(transform_hamiltonians(F, alpha, p, cap));
			lxz.push_back(lxz_hamiltonians(F, alpha, p, cap));
		}
	lxz.push_back(lxz_hamiltonians(F, 1, 2, cap));
	// corrupt one coefficient
	auto &bad = ours[1].value;
	bad = add(bad, TruncatedSeries::monomial(bad.caps(), Monomial(VariableId{0, 1}, 3), 1));
	auto cmp = compare_spans(ours, lxz, cap);
	CHECK_FALSE(cmp.a_in_span_b);
	CHECK(cmp.failing_index == 1);
	CHECK_FALSE(cmp.residual.is_zero());
}
