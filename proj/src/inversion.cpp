#include "givental/inversion.hpp"

#include <algorithm>

namespace givental {

Point invert_coordinates(const Point &t)
{
	const int n = (int)t.size();
	if (n < 2)
		throw std::invalid_argument("invert_coordinates: dimension must be >= 2");
	if (t[n - 1] == 0)
		throw std::invalid_argument("invert_coordinates: singular at t^n = 0");
	Point out(n);
	Rational pairing = 0; // t_s t^s
	for (int a = 1; a <= n; ++a)
		pairing += t[a - 1] * t[eta_dual(a, n) - 1];
	out[0] = pairing / (2 * t[n - 1]);
	for (int a = 2; a <= n - 1; ++a)
		out[a - 1] = t[a - 1] / t[n - 1];
	out[n - 1] = -1 / t[n - 1];
	return out;
}

Point invert_coordinates_inverse(const Point &that)
{
	const int n = (int)that.size();
	if (n < 2)
		throw std::invalid_argument("invert_coordinates_inverse: dimension must be >= 2");
	if (that[n - 1] == 0)
		throw std::invalid_argument("invert_coordinates_inverse: singular at that^n = 0");
	Point out(n);
	Rational pairing = 0;
	for (int a = 1; a <= n; ++a)
		pairing += that[a - 1] * that[eta_dual(a, n) - 1];
	out[0] = pairing / (2 * that[n - 1]);
	for (int a = 2; a <= n - 1; ++a)
		out[a - 1] = -that[a - 1] / that[n - 1];
	out[n - 1] = -1 / that[n - 1];
	return out;
}

int aut2_order(int alpha, int beta, int n)
{
	if (alpha < 2 || alpha > n - 1 || beta < 2 || beta > n - 1)
		throw std::invalid_argument("aut2_order: indices must lie in 2..n-1");
	int abar = eta_dual(alpha, n), bbar = eta_dual(beta, n);
	std::vector<int> v{alpha, beta, abar, bbar};
	std::sort(v.begin(), v.end());
	if (v[0] == v[3])
		return 8;
	if (v[0] == v[1] && v[2] == v[3])
		return v[1] == v[2] ? 8 : 2;
	if (v[0] == v[1] || v[1] == v[2] || v[2] == v[3])
		return 2;
	return 1;
}

namespace {

// 1/(1 - eps) = sum eps^k within the caps; eps is the t^{0,n} variable.
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

} // namespace

TruncatedSeries inversion_q_sector(int n, SeriesCaps caps)
{
	// (1/(8 that^n)) (that^2 that^{n-1} + ... + that^{n-1} that^2)^2 with
	// that^n = -1 + eps: the prefactor expands to -(1/8) sum_k eps^k.
	TruncatedSeries s(caps);
	for (int a = 2; a <= n - 1; ++a) {
		Monomial m = Monomial(VariableId{0, a}, 1).times_var(VariableId{0, eta_dual(a, n)}, 1);
		s = add(s, TruncatedSeries::monomial(caps, m, 1));
	}
	return scale(mul(mul(s, s), geometric_eps(caps)), Rational(-1, 8));
}

TruncatedSeries inversion_h_sector(const FrobeniusPotential &F, SeriesCaps caps)
{
	const int n = F.dimension();
	// H as stored: the jet beyond the eta-cubic, in source displacement
	// coordinates s^2..s^n.
	TruncatedSeries h_jet =
	    sub(F.potential(), FrobeniusPotential::eta_cubic(n, F.potential().caps()));
	// (that^n)^2 H(-that^2/that^n, ..., -1/that^n) at that^n = -1 + eps:
	// s^a -> that^a/(1-eps), s^n -> eps/(1-eps), prefactor (1-eps)^2.
	TruncatedSeries u = geometric_eps(caps);
	std::map<VariableId, TruncatedSeries> args;
	for (int a = 2; a <= n - 1; ++a)
		args.emplace(VariableId{0, a},
		             mul(TruncatedSeries::variable(caps, VariableId{0, a}), u));
	args.emplace(VariableId{0, n},
	             mul(TruncatedSeries::variable(caps, VariableId{0, n}), u));
	TruncatedSeries composed = substitute(h_jet, args, caps);
	TruncatedSeries one_minus_eps =
	    sub(TruncatedSeries::constant(caps, 1), TruncatedSeries::variable(caps, VariableId{0, n}));
	return mul(composed, mul(one_minus_eps, one_minus_eps));
}

FrobeniusPotential invert_potential(const FrobeniusPotential &F, int cap)
{
	const int n = F.dimension();
	if (cap > F.jet_order())
		throw cap_error("invert_potential: H is not provided to the requested order");
	SeriesCaps caps{n, cap, 1};
	TruncatedSeries fhat = FrobeniusPotential::eta_cubic(n, caps);
	fhat = add(fhat, inversion_q_sector(n, caps));
	fhat = add(fhat, inversion_h_sector(F, caps));
	return FrobeniusPotential(n, fhat);
}

TruncatedSeries givental_transformed_potential(const FrobeniusPotential &F, int cap,
                                               GiventalRoute route)
{
	const int n = F.dimension();
	InversionData data(n);
	GraphCaps gc = derive_graph_caps(SeriesCaps{n, cap, 0});
	// vertex valences stay within leaves + 2 * edges; the budget bounds both
	TableCaps tcaps{0, gc.max_leaves + 2 * gc.max_edges, gc.budget};
	auto table = reconstruct_descendants(F, tcaps);
	SeriesCaps target{n, cap, 0};

	TruncatedSeries log_part(target);
	if (route == GiventalRoute::Graphs) {
		GraphSumOptions opt;
		opt.max_var_level = 0; // descendant-free part only
		log_part = graph_sum(table, data.r, target, opt);
	} else {
		log_part = transformed_free_energy(table, data.r, target);
	}
	// genus-0 slice: hbar^{-1} terms, with the prefactor stripped (the
	// wider genus cap keeps the stripped monomials admissible)
	SeriesCaps flat{n, cap, 1};
	TruncatedSeries out(flat);
	for (const auto &[m, c] : log_part.terms()) {
		if (m.hbar_power() != -1)
			continue;
		if (m.weighted_degree() != 0)
			continue; // descendant variables (operator route keeps them)
		out = add(out, TruncatedSeries::monomial(flat, m.times_hbar(1), c));
	}
	return out;
}

bool CoefficientReport::all_equal() const
{
	return std::all_of(rows.begin(), rows.end(), [](const CoefficientRow &r) { return r.equal; });
}

std::vector<CoefficientRow> CoefficientReport::mismatches() const
{
	std::vector<CoefficientRow> out;
	for (const auto &r : rows)
		if (!r.equal)
			out.push_back(r);
	return out;
}

CoefficientReport verify_inversion_theorem(const FrobeniusPotential &F, int cap,
                                           GiventalRoute route)
{
	const int n = F.dimension();
	CoefficientReport report;
	report.dimension = n;
	report.cap = cap;

	TruncatedSeries coord = invert_potential(F, cap).potential();
	TruncatedSeries givental = givental_transformed_potential(F, cap, route);

	// every monomial of total degree 3..cap in the hatted variables
	std::vector<VariableId> vars;
	for (int a = 1; a <= n; ++a)
		vars.push_back(VariableId{0, a});
	std::function<void(size_t, int, Monomial)> sweep = [&](size_t vi, int deg, Monomial m) {
		if (deg >= 3) {
			Rational a = coord.coefficient_or_zero(m);
			Rational b = givental.coefficient_or_zero(m);
			report.rows.push_back(CoefficientRow{m, a, b, a == b});
		}
		if (vi == vars.size() || deg == cap)
			return;
		for (size_t j = vi; j < vars.size(); ++j)
			sweep(j, deg + 1, m.times_var(vars[j], 1));
	};
	sweep(0, 0, Monomial::one());
	return report;
}

} // namespace givental
