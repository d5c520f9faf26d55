#include "givental/hierarchy.hpp"

#include <algorithm>
#include <functional>

namespace givental {

namespace {

TruncatedSeries geometric_eps(SeriesCaps caps)
{
	TruncatedSeries u(caps);
	Monomial eps(VariableId{0, caps.dimension}, 1);
	Monomial power = Monomial::one();
	for (int k = 0; k <= caps.degree_cap; ++k) {
		u = add(u, TruncatedSeries::monomial(caps, power, 1));
		power = power.times(eps);
	}
	return u;
}

// drops every term carrying a descendant variable
TruncatedSeries small_phase(const TruncatedSeries &a)
{
	TruncatedSeries out(a.caps());
	out = out.with_watermark(a.watermark());
	for (const auto &[m, c] : a.terms())
		if (m.weighted_degree() == 0)
			out = add(out, TruncatedSeries::monomial(a.caps(), m, c));
	return out;
}

} // namespace

HamiltonianDensity theta(const FrobeniusPotential &F, int alpha, int p, int cap)
{
	const int n = F.dimension();
	if (alpha < 1 || alpha > n || p < 0)
		throw std::invalid_argument("theta: bad index");
	TableCaps tcaps{0, cap + 2, p};
	auto table = reconstruct_descendants(F, tcaps);
	SeriesCaps caps{n, cap, 1};
	TruncatedSeries value(caps);

	InsertionList mu;
	std::function<void(int)> sweep = [&](int from) {
		InsertionList full = mu;
		full.push_back(Insertion{p, alpha});
		full.push_back(Insertion{0, 1});
		Rational v = table.lookup(0, sorted(std::move(full)));
		if (!(v == 0)) {
			Monomial m;
			for (const auto &i : mu)
				m = m.times_var(VariableId{0, i.mu}, 1);
			value = add(value,
			            TruncatedSeries::monomial(caps, m, v / Rational(aut_order(mu))));
		}
		if ((int)mu.size() == cap)
			return;
		for (int g = from; g <= n; ++g) {
			mu.push_back(Insertion{0, g});
			sweep(g);
			mu.pop_back();
		}
	};
	sweep(1);
	return HamiltonianDensity{alpha, p, value};
}

TruncatedSeries u_operator(const TruncatedSeries &f)
{
	const int n = f.caps().dimension;
	SeriesCaps caps = f.caps();
	TruncatedSeries vn = TruncatedSeries::variable(caps, VariableId{0, n});
	TruncatedSeries out = neg(mul(vn, f));
	TruncatedSeries pairing(caps);
	for (int g = 1; g <= n; ++g)
		pairing = add(pairing, TruncatedSeries::monomial(
		                           caps,
		                           Monomial(VariableId{0, g}, 1)
		                               .times_var(VariableId{0, eta_dual(g, n)}, 1),
		                           1));
	out = sub(out, scale(mul(pairing, partial(f, VariableId{0, 1})), Rational(1, 2)));
	for (int g = 1; g <= n; ++g)
		out = add(out, mul(mul(vn, TruncatedSeries::variable(caps, VariableId{0, g})),
		                   partial(f, VariableId{0, g})));
	return out;
}

TruncatedSeries exp_u(const TruncatedSeries &f)
{
	TruncatedSeries acc = f;
	TruncatedSeries term = f;
	const int bound = f.caps().degree_cap + 3;
	for (int k = 1; !term.is_zero(); ++k) {
		if (k > bound)
			throw cap_error("exp_u: operator exponential did not stabilize within the cap");
		term = scale(u_operator(term), Rational(1, k));
		acc = add(acc, term);
	}
	return acc;
}

HamiltonianDensity transform_hamiltonians(const FrobeniusPotential &F, int alpha, int p, int cap)
{
	const int n = F.dimension();
	TruncatedSeries value = exp_u(theta(F, alpha, p, cap).value);
	if (alpha == n)
		value = add(value, exp_u(theta(F, 1, p + 1, cap).value));
	return HamiltonianDensity{alpha, p, value};
}

HamiltonianDensity lxz_hamiltonians(const FrobeniusPotential &F, int alpha, int p, int cap)
{
	const int n = F.dimension();
	SeriesCaps caps{n, cap, 1};
	TruncatedSeries one_minus_eps =
	    sub(TruncatedSeries::constant(caps, 1), TruncatedSeries::variable(caps, VariableId{0, n}));

	if (alpha == 1 && p == 0) {
		// -1/v^n with v^n = 1/(1-eps)
		return HamiltonianDensity{1, 0, neg(one_minus_eps)};
	}

	// source coordinates through the inverse inversion map, as series in
	// the target displacement variables (eps is the n-th slot)
	TruncatedSeries u = geometric_eps(caps);
	std::map<VariableId, TruncatedSeries> args;
	TruncatedSeries mid(caps);
	for (int g = 2; g <= n - 1; ++g)
		mid = add(mid, TruncatedSeries::monomial(
		                   caps,
		                   Monomial(VariableId{0, g}, 1)
		                       .times_var(VariableId{0, eta_dual(g, n)}, 1),
		                   1));
	args.emplace(VariableId{0, 1},
	             sub(TruncatedSeries::variable(caps, VariableId{0, 1}),
	                 scale(mul(mid, u), Rational(1, 2))));
	for (int a = 2; a <= n - 1; ++a)
		args.emplace(VariableId{0, a},
		             mul(TruncatedSeries::variable(caps, VariableId{0, a}), u));
	args.emplace(VariableId{0, n},
	             mul(TruncatedSeries::variable(caps, VariableId{0, n}), u));

	int src_alpha, src_p;
	Rational sign = 1;
	if (alpha == 1) {
		src_alpha = n;
		src_p = p - 1;
		sign = -1;
	} else if (alpha == n) {
		src_alpha = 1;
		src_p = p + 1;
	} else {
		src_alpha = alpha;
		src_p = p;
	}
	TruncatedSeries composed = substitute(theta(F, src_alpha, src_p, cap).value, args, caps);
	return HamiltonianDensity{alpha, p, scale(mul(composed, one_minus_eps), sign)};
}

TruncatedSeries theta_deformation(const FrobeniusPotential &F, int alpha, int p, int cap)
{
	const int n = F.dimension();
	// Z at enough degree headroom for the two derivatives and the
	// watermark loss of the quadratic operator term.
	SeriesCaps zcaps{n, cap + 4, 1};
	TableCaps tcaps{0, cap + 4, p + 2};
	auto table = reconstruct_descendants(F, tcaps);
	TruncatedSeries Z = table_to_partition_function(table, zcaps);
	TruncatedSeries az = apply_infinitesimal(RMatrix::inversion(n), Z);
	TruncatedSeries delta_log = mul(az, inverse_series(Z));
	// hbar^{-1} slice = the genus-0 deformation
	TruncatedSeries delta_f0(zcaps);
	for (const auto &[m, c] : delta_log.terms())
		if (m.hbar_power() == -1)
			delta_f0 = add(delta_f0, TruncatedSeries::monomial(zcaps, m.times_hbar(1), c));
	delta_f0 = delta_f0.with_watermark(cap + 2);
	TruncatedSeries d2 =
	    partial(partial(delta_f0, VariableId{p, alpha}), VariableId{0, 1});
	return small_phase(d2).restricted(SeriesCaps{n, cap, 1});
}

SpanComparison compare_spans(std::vector<HamiltonianDensity> family_a,
                             std::vector<HamiltonianDensity> family_b, int cap)
{
	SpanComparison out;
	out.family_a = std::move(family_a);
	out.family_b = std::move(family_b);
	if (out.family_a.empty())
		throw std::invalid_argument("compare_spans: empty family");
	SeriesCaps caps = out.family_a.front().value.caps();
	caps.degree_cap = std::min(caps.degree_cap, cap);
	out.residual = TruncatedSeries(caps);

	// densities compare modulo constants
	auto normalize = [&](const TruncatedSeries &s) {
		TruncatedSeries r(caps);
		for (const auto &[m, c] : s.terms())
			if (m.degree() >= 1 && m.degree() <= cap)
				r = add(r, TruncatedSeries::monomial(caps, m, c));
		return r;
	};

	// echelonized basis of family_b with bookkeeping of the combinations
	struct Row {
		TruncatedSeries vec;
		std::vector<Rational> combo;
	};
	std::vector<Row> echelon;
	const size_t nb = out.family_b.size();
	auto reduce = [&](TruncatedSeries v, std::vector<Rational> combo) {
		for (const auto &row : echelon) {
			if (v.is_zero())
				break;
			Monomial lead = row.vec.terms().begin()->first;
			Rational c = v.coefficient_or_zero(lead);
			if (c == 0)
				continue;
			Rational factor = c / row.vec.terms().begin()->second;
			v = sub(v, scale(row.vec, factor));
			for (size_t j = 0; j < nb; ++j)
				combo[j] -= factor * row.combo[j];
		}
		return std::pair{v, combo};
	};
	// keep the echelon sorted by leading monomial so a single ascending
	// pass in reduce() is a complete forward substitution
	auto insert_row = [&](Row row) {
		auto pos = std::lower_bound(echelon.begin(), echelon.end(), row,
		                            [](const Row &a, const Row &b) {
			                            return a.vec.terms().begin()->first <
			                                   b.vec.terms().begin()->first;
		                            });
		echelon.insert(pos, std::move(row));
	};
	for (size_t i = 0; i < nb; ++i) {
		std::vector<Rational> unit(nb, 0);
		unit[i] = 1;
		auto [v, combo] = reduce(normalize(out.family_b[i].value), unit);
		if (!v.is_zero())
			insert_row(Row{std::move(v), std::move(combo)});
	}

	out.a_in_span_b = true;
	for (size_t i = 0; i < out.family_a.size(); ++i) {
		auto [v, combo] = reduce(normalize(out.family_a[i].value), std::vector<Rational>(nb, 0));
		if (v.is_zero()) {
			for (auto &c : combo)
				c = -c;
			out.change_of_basis.push_back(std::move(combo));
		} else {
			out.a_in_span_b = false;
			out.failing_index = (int)i;
			out.residual = v;
			break;
		}
	}
	return out;
}

} // namespace givental
