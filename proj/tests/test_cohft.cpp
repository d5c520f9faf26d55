#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "givental/cohft.hpp"
#include "support/fixtures.hpp"

using namespace givental;
using testgen::Rng;

namespace {

InsertionList ins(std::initializer_list<Insertion> l) { return sorted(InsertionList(l)); }

} // namespace

TEST_CASE("aut_order counts multiset automorphisms")
{
	CHECK(aut_order(ins({{0, 1}, {0, 1}, {0, 2}})) == 2);
	CHECK(aut_order(ins({{0, 2}, {0, 2}, {0, 2}, {0, 2}, {0, 2}})) == 120);
	CHECK(aut_order(ins({{0, 1}, {1, 1}, {0, 2}})) == 1);
}

TEST_CASE("potential validation enforces the eta-cubic normal form")
{
	SeriesCaps caps{2, 5, 1};
	// missing cubic part
	CHECK_THROWS_AS(FrobeniusPotential(2, TruncatedSeries::monomial(
	                                          caps, Monomial(VariableId{0, 2}, 3), 1)),
	                std::invalid_argument);
	// quadratic term present
	auto bad = add(FrobeniusPotential::eta_cubic(2, caps),
	               TruncatedSeries::monomial(caps, Monomial(VariableId{0, 2}, 2), 1));
	CHECK_THROWS_AS(FrobeniusPotential(2, bad), std::invalid_argument);
	// t^1 outside the cubic
	auto bad2 = add(FrobeniusPotential::eta_cubic(2, caps),
	                TruncatedSeries::monomial(
	                    caps, Monomial(VariableId{0, 1}, 1).times_var(VariableId{0, 2}, 3), 1));
	CHECK_THROWS_AS(FrobeniusPotential(2, bad2), std::invalid_argument);
	// the genuine thing passes
	auto F = testgen::potential_2d({{3, Rational(1, 3)}, {4, Rational(-2, 5)}}, 5);
	CHECK(F.dimension() == 2);
	CHECK(F.primary_correlator(ins({{0, 1}, {0, 1}, {0, 2}})) == 1);
	CHECK(F.primary_correlator(ins({{0, 2}, {0, 2}, {0, 2}})) == Rational(1, 3));
	CHECK(F.primary_correlator(ins({{0, 2}, {0, 2}, {0, 2}, {0, 2}})) == Rational(-2, 5));
}

TEST_CASE("vertex_tensor: unit axis gives eta, sparse default is 0")
{
	Rng rng(1);
	auto F = testgen::random_potential(rng, 3, 5);
	auto table = reconstruct_descendants(F, TableCaps{0, 5, 2});
	for (int a = 1; a <= 3; ++a)
		for (int b = 1; b <= 3; ++b) {
			auto v = vertex_tensor(table, ins({{0, 1}, {0, a}, {0, b}}));
			Rational expect = eta(a, b, 3);
			CHECK((expect == 0 ? v.count(0) == 0 : v.at(0) == expect));
		}
	// a missing entry reads as zero, a request beyond caps throws
	CHECK(table.lookup(0, ins({{2, 1}, {0, 1}, {0, 1}, {0, 1}})) == 0);
	CHECK_THROWS_AS(table.lookup(0, ins({{3, 1}, {0, 1}, {0, 1}})), cap_error);
	CHECK_THROWS_AS(table.lookup(1, ins({{0, 1}, {0, 1}, {0, 1}})), cap_error);
}

TEST_CASE("vertex_tensor on the 2D example: five e_2 legs give sigma_5")
{
	auto F = testgen::potential_2d({{5, Rational(7, 2)}}, 5);
	auto table = reconstruct_descendants(F, TableCaps{0, 5, 1});
	auto v = vertex_tensor(table, ins({{0, 2}, {0, 2}, {0, 2}, {0, 2}, {0, 2}}));
	CHECK(v.at(0) == Rational(7, 2));
	// sigma_3, sigma_4 absent in this fixture
	CHECK(table.lookup(0, ins({{0, 2}, {0, 2}, {0, 2}})) == 0);
}

TEST_CASE("dilaton_reduce")
{
	auto [f1, r1] = dilaton_reduce(0, ins({{1, 1}, {0, 1}, {0, 2}, {0, 2}}));
	CHECK(f1 == 1);
	CHECK(r1 == ins({{0, 1}, {0, 2}, {0, 2}}));

	auto [f2, r2] = dilaton_reduce(1, ins({{1, 1}, {2, 2}}));
	CHECK(f2 == 1);

	auto [f3, r3] = dilaton_reduce(0, ins({{1, 1}, {0, 1}, {0, 1}, {0, 2}, {0, 2}, {0, 2}}));
	CHECK(f3 == 3);

	CHECK_THROWS_AS(dilaton_reduce(0, ins({{0, 1}, {0, 2}, {0, 2}})), std::invalid_argument);
}

TEST_CASE("reconstruction: all-primary entries are Taylor coefficients")
{
	Rng rng(7);
	auto F = testgen::random_potential(rng, 2, 6);
	auto table = reconstruct_descendants(F, TableCaps{0, 6, 3});
	CHECK(table.lookup(0, ins({{0, 2}, {0, 2}, {0, 2}})) == F.primary_correlator(ins({{0, 2}, {0, 2}, {0, 2}})));
	CHECK(table.lookup(0, ins({{0, 1}, {0, 1}, {0, 2}})) == 1);
}

TEST_CASE("reconstruction: dilaton equation against the TRR route (2D fixture)")
{
	auto F = testgen::potential_2d(
	    {{3, Rational(2, 3)}, {4, Rational(-1, 2)}, {5, Rational(5, 7)}, {6, Rational(1, 6)}}, 6);
	auto table = reconstruct_descendants(F, TableCaps{0, 6, 3});

	// with only two insertions left the dilaton factor multiplies a
	// discarded unstable correlator: the value is 0
	for (int a = 1; a <= 2; ++a)
		for (int b = 1; b <= 2; ++b)
			CHECK(table.lookup(0, ins({{1, 1}, {0, a}, {0, b}})) == 0);
	// <tau_1(1) tau_0(a) tau_0(b) tau_0(c)>_0 = 1 * F_abc
	for (int a = 1; a <= 2; ++a)
		for (int b = a; b <= 2; ++b)
			for (int c = b; c <= 2; ++c)
				CHECK(table.lookup(0, ins({{1, 1}, {0, a}, {0, b}, {0, c}})) ==
				      table.lookup(0, ins({{0, a}, {0, b}, {0, c}})));

	// <tau_1(1) X>_0 = (k - 2) <X>_0 for primary X up to 5 insertions
	InsertionList cur;
	std::function<void(Insertion)> sweep = [&](Insertion from) {
		if (cur.size() >= 3 && cur.size() <= 5) {
			InsertionList with = cur;
			with.push_back(Insertion{1, 1});
			CHECK(table.lookup(0, sorted(with)) ==
			      Rational((int)cur.size() - 2) * table.lookup(0, cur));
		}
		if (cur.size() == 5)
			return;
		for (int mu = from.mu; mu <= 2; ++mu) {
			cur.push_back(Insertion{0, mu});
			sweep(Insertion{0, mu});
			cur.pop_back();
		}
	};
	sweep(Insertion{0, 1});
}

TEST_CASE("reconstruction: TRR holds for every pivot and companion choice (WDVV fixtures)")
{
	Rng rng(99);
	for (int n = 2; n <= 3; ++n) {
		auto F = testgen::wdvv_potential(rng, n, 7);
		CHECK(wdvv_holds(F));
		auto table = reconstruct_descendants(F, TableCaps{0, 7, 3});
		// sample of small keys with descendants: every admissible choice
		std::vector<InsertionList> keys = {
		    ins({{1, n}, {0, 1}, {0, 2}, {0, 2}}),
		    ins({{1, 2}, {0, 2}, {0, n}, {0, 1}, {0, 2}}),
		    ins({{2, 2}, {0, 2}, {0, n}, {0, 2}}),
		    ins({{1, 2}, {1, n}, {0, 1}, {0, 2}, {0, n}}),
		    ins({{1, 1}, {1, 1}, {0, 2}, {0, 2}, {0, n}}),
		};
		for (const auto &key : keys) {
			Rational expect = table.lookup(0, key);
			for (size_t p = 0; p < key.size(); ++p) {
				if (key[p].d == 0)
					continue;
				for (size_t i = 0; i < key.size(); ++i)
					for (size_t j = i + 1; j < key.size(); ++j) {
						if (i == p || j == p)
							continue;
						CHECK(testgen::trr_rhs(table, key, p, i, j) == expect);
					}
			}
		}
	}
}

TEST_CASE("choice-independence fails for a non-WDVV jet (negative control)")
{
	Rng rng(1234);
	// random n = 3 jets are generically non-associative
	auto F = testgen::random_potential(rng, 3, 5);
	CHECK_FALSE(wdvv_holds(F));
	auto table = reconstruct_descendants(F, TableCaps{0, 5, 2});
	auto key = ins({{1, 2}, {0, 2}, {0, 3}, {0, 3}});
	bool all_equal = true;
	Rational expect = table.lookup(0, key);
	for (size_t p = 0; p < key.size(); ++p) {
		if (key[p].d == 0)
			continue;
		for (size_t i = 0; i < key.size(); ++i)
			for (size_t j = i + 1; j < key.size(); ++j) {
				if (i == p || j == p)
					continue;
				if (!(testgen::trr_rhs(table, key, p, i, j) == expect))
					all_equal = false;
			}
	}
	CHECK_FALSE(all_equal);
}

TEST_CASE("table_to_partition_function: empty table and |Aut| factors")
{
	CorrelatorTable empty(2, TableCaps{0, 4, 1});
	SeriesCaps caps{2, 4, 1};
	CHECK(table_to_partition_function(empty, caps) == TruncatedSeries::constant(caps, 1));

	CorrelatorTable t(2, TableCaps{0, 4, 1});
	t.set(0, ins({{0, 1}, {0, 1}, {0, 2}}), 1);
	auto f = table_to_free_energy(t, caps);
	Monomial m = Monomial(-1).times_var(VariableId{0, 1}, 2).times_var(VariableId{0, 2}, 1);
	CHECK(f.coefficient(m) == Rational(1, 2));
}

TEST_CASE("table -> Z -> table round trip on random tables")
{
	Rng rng(4242);
	for (int trial = 0; trial < 8; ++trial) {
		int n = 2 + trial % 2;
		TableCaps tcaps{0, 5, 2};
		auto t = testgen::random_g0_table(rng, n, tcaps, 6);
		SeriesCaps caps{n, 5, 1};
		auto Z = table_to_partition_function(t, caps);
		auto back = partition_function_to_table(Z, tcaps);
		CHECK(back.entries() == t.entries());
	}
}

TEST_CASE("free energy of a reconstructed table is tame")
{
	Rng rng(31);
	auto F = testgen::random_potential(rng, 2, 5);
	auto table = reconstruct_descendants(F, TableCaps{0, 5, 2});
	auto f = table_to_free_energy(table, SeriesCaps{2, 5, 1});
	CHECK(is_tame(f));
}

TEST_CASE("symmetry: lookups are permutation invariant")
{
	Rng rng(55);
	auto F = testgen::random_potential(rng, 3, 5);
	auto table = reconstruct_descendants(F, TableCaps{0, 5, 2});
	InsertionList a{{1, 2}, {0, 3}, {0, 1}, {0, 2}};
	InsertionList b{{0, 1}, {0, 2}, {1, 2}, {0, 3}};
	CHECK(table.lookup(0, a) == table.lookup(0, b));
}

TEST_CASE("reconstruction cap errors are reported")
{
	Rng rng(8);
	auto F = testgen::random_potential(rng, 2, 4);
	// the caps promise 6-insertion lookups, but the jet stops at order 4
	auto t = reconstruct_descendants(F, TableCaps{0, 6, 2});
	CHECK_THROWS_AS(t.materialize(), cap_error);
	CHECK_THROWS_AS(reconstruct_descendants(F, TableCaps{1, 4, 2}), std::invalid_argument);
}

TEST_CASE("materialize fills the capped range deterministically")
{
	auto F = testgen::potential_2d({{3, Rational(1, 2)}, {4, 1}, {5, Rational(-1, 3)}}, 5);
	auto t1 = reconstruct_descendants(F, TableCaps{0, 4, 2});
	auto t2 = reconstruct_descendants(F, TableCaps{0, 4, 2});
	t1.materialize();
	// lazy lookups agree with the materialized sweep
	CHECK(t1.entries().size() > 0);
	for (const auto &[key, v] : t1.entries())
		CHECK(t2.lookup(key.first, key.second) == v);
}
