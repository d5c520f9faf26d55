#include "givental/operator_action.hpp"

#include <algorithm>
#include <set>

namespace givental {

TransformCaps derive_transform_caps(SeriesCaps target)
{
	TransformCaps tc;
	tc.target = target;
	tc.slack_max = std::max(0, 3 * (target.genus_cap - 1) + target.degree_cap);
	tc.working = SeriesCaps{target.dimension, target.degree_cap + 2 * tc.slack_max,
	                        target.genus_cap};
	// Descendant levels are capped by tameness: sum(d) <= slack budget plus
	// the weighted content of the working range.
	tc.zmax = tc.working.degree_cap + 3 * std::max(target.genus_cap - 1, 0) + 3;
	return tc;
}

namespace {

std::set<VariableId> variables_of(const TruncatedSeries &Z)
{
	std::set<VariableId> vars;
	for (const auto &[m, c] : Z.terms())
		for (const auto &[v, p] : m.factors())
			vars.insert(v);
	return vars;
}

TruncatedSeries apply_linear(const RMatrix &r, const TruncatedSeries &Z)
{
	TruncatedSeries out(Z.caps());
	out = out.with_watermark(Z.watermark());
	for (VariableId v : variables_of(Z)) {
		TruncatedSeries dz(Z.caps());
		bool have_dz = false;
		for (const auto &[l, m] : r.levels()) {
			if (v.d < l)
				continue;
			if (!have_dz) {
				dz = partial(Z, v);
				have_dz = true;
			}
			for (int nu = 1; nu <= r.dimension(); ++nu) {
				Rational c = m[v.mu - 1][nu - 1];
				if (c == 0)
					continue;
				out = add(out, mul_monomial(dz, Monomial(VariableId{v.d - l, nu}, 1), c));
			}
		}
	}
	return out;
}

TruncatedSeries apply_dilaton_term(const RMatrix &r, const TruncatedSeries &Z)
{
	TruncatedSeries out(Z.caps());
	out = out.with_watermark(Z.watermark());
	for (const auto &[l, m] : r.levels())
		for (int mu = 1; mu <= r.dimension(); ++mu) {
			Rational c = m[mu - 1][0]; // (r_l)^mu_1
			if (c == 0)
				continue;
			out = sub(out, scale(partial(Z, VariableId{l + 1, mu}), c));
		}
	return out;
}

TruncatedSeries apply_quadratic(const RMatrix &r, const TruncatedSeries &Z)
{
	const int n = r.dimension();
	TruncatedSeries out(Z.caps());
	out = out.with_watermark(Z.watermark());
	for (const auto &[l, m] : r.levels())
		for (int i = 0; i < l; ++i) {
			const int sign = (i % 2 == 0) ? -1 : 1; // (-1)^{i+1}
			for (int mu = 1; mu <= n; ++mu) {
				TruncatedSeries dmu = partial(Z, VariableId{i, mu});
				if (dmu.is_zero())
					continue;
				for (int nu = 1; nu <= n; ++nu) {
					Rational c = r.bivector(l, mu, nu);
					if (c == 0)
						continue;
					auto d2 = partial(dmu, VariableId{l - 1 - i, nu});
					out = add(out, mul_monomial(d2, Monomial(1), c * Rational(sign, 2)));
				}
			}
		}
	return out;
}

// Iterated exponential sum_k A^k S / k! of a slack-raising operator; the
// slack bound doubles as the termination bound.
template <typename Op>
TruncatedSeries exp_operator(const TruncatedSeries &S, int slack_max, const char *who, Op &&apply)
{
	TruncatedSeries acc = prune_slack(S, slack_max);
	TruncatedSeries term = acc;
	for (int k = 1; !term.is_zero(); ++k) {
		if (k > slack_max + 2)
			throw cap_error(std::string(who) + ": operator exponential did not stabilize "
			                                   "within the slack budget");
		term = prune_slack(apply(term), slack_max);
		term = scale(term, Rational(1, k));
		acc = add(acc, term);
	}
	return acc;
}

int caps_slack(const SeriesCaps &caps)
{
	return std::max(0, 3 * (caps.genus_cap - 1) + caps.degree_cap);
}

} // namespace

TruncatedSeries apply_infinitesimal(const RMatrix &r, int level, const TruncatedSeries &Z)
{
	if (r.dimension() != Z.caps().dimension)
		throw std::invalid_argument("apply_infinitesimal: dimension mismatch");
	if (level < 1)
		throw std::invalid_argument("apply_infinitesimal: level must be >= 1");
	auto it = r.levels().find(level);
	if (it == r.levels().end())
		return TruncatedSeries::zero(Z.caps()).with_watermark(Z.watermark());
	RMatrix single(r.dimension(), {{level, it->second}});
	TruncatedSeries out = apply_dilaton_term(single, Z);
	out = add(out, apply_linear(single, Z));
	return add(out, apply_quadratic(single, Z));
}

TruncatedSeries apply_infinitesimal(const RMatrix &r, const TruncatedSeries &Z)
{
	if (r.dimension() != Z.caps().dimension)
		throw std::invalid_argument("apply_infinitesimal: dimension mismatch");
	TruncatedSeries out = apply_dilaton_term(r, Z);
	out = add(out, apply_linear(r, Z));
	return add(out, apply_quadratic(r, Z));
}

TruncatedSeries exponentiate_action(const RMatrix &r, const TruncatedSeries &Z)
{
	return exponentiate_action(r, Z, caps_slack(Z.caps()));
}

TruncatedSeries exponentiate_action(const RMatrix &r, const TruncatedSeries &Z, int slack_max)
{
	if (r.dimension() != Z.caps().dimension)
		throw std::invalid_argument("exponentiate_action: dimension mismatch");
	if (!is_tame(Z))
		throw std::invalid_argument("exponentiate_action: input series is not tame");
	if (r.is_zero())
		return Z;
	const int slack = std::min(slack_max, caps_slack(Z.caps()));
	auto out = exp_operator(Z, slack, "exponentiate_action",
	                        [&](const TruncatedSeries &s) { return apply_infinitesimal(r, s); });
	// Exactness zone: each slack unit spent consumes at most two degrees.
	return out.with_watermark(std::max(0, Z.watermark() - 2 * slack));
}

FactorizedAction factorize(const RMatrix &r, int zmax)
{
	const int n = r.dimension();
	if (zmax < 0)
		throw std::invalid_argument("factorize: zmax must be >= 0");
	auto mpos = exp_r_series(r, zmax + 1);
	auto Q = edge_quotient(r, zmax);

	FactorizedAction f{r, {}, {}};
	f.v.resize(zmax + 1);
	for (int k = 0; k <= zmax; ++k) {
		f.v[k].resize(zmax + 1 - k, zero_matrix(n));
		for (int l = 0; k + l <= zmax; ++l) {
			// (V_{k,l})^{mu nu} = -(1/2) (Q_{k,l})^mu_rho eta^{rho nu}
			Matrix biv = zero_matrix(n);
			for (int mu = 1; mu <= n; ++mu)
				for (int nu = 1; nu <= n; ++nu)
					biv[mu - 1][nu - 1] =
					    Rational(-1, 2) * Q[k][l][mu - 1][eta_dual(nu, n) - 1];
			f.v[k][l] = biv;
		}
	}
	f.w.assign(zmax + 1, zero_matrix(n));
	for (int l = 2; l <= zmax; ++l)
		f.w[l] = mat_scale(mpos[l - 1], -1);
	return f;
}

TruncatedSeries apply_factorized(const FactorizedAction &f, const TruncatedSeries &Z)
{
	return apply_factorized(f, Z, caps_slack(Z.caps()));
}

TruncatedSeries apply_factorized(const FactorizedAction &f, const TruncatedSeries &Z, int slack_max)
{
	const int n = f.r.dimension();
	if (n != Z.caps().dimension)
		throw std::invalid_argument("apply_factorized: dimension mismatch");
	if (!is_tame(Z))
		throw std::invalid_argument("apply_factorized: input series is not tame");
	if (f.r.is_zero())
		return Z;
	const int slack = std::min(slack_max, caps_slack(Z.caps()));

	// exp(quadratic), then exp(dilaton), then exp(linear).
	auto apply_v = [&](const TruncatedSeries &s) {
		TruncatedSeries out(s.caps());
		for (int k = 0; k < (int)f.v.size(); ++k)
			for (int l = 0; k + l < (int)f.v.size(); ++l) {
				if (mat_is_zero(f.v[k][l]))
					continue;
				for (int mu = 1; mu <= n; ++mu) {
					auto dmu = partial(s, VariableId{k, mu});
					if (dmu.is_zero())
						continue;
					for (int nu = 1; nu <= n; ++nu) {
						Rational c = f.v[k][l][mu - 1][nu - 1];
						if (c == 0)
							continue;
						out = add(out, mul_monomial(partial(dmu, VariableId{l, nu}),
						                            Monomial(1), c));
					}
				}
			}
		return out;
	};
	auto apply_w = [&](const TruncatedSeries &s) {
		TruncatedSeries out(s.caps());
		for (int l = 2; l < (int)f.w.size(); ++l)
			for (int mu = 1; mu <= n; ++mu) {
				Rational c = f.w[l][mu - 1][0]; // (W_l)^mu_1
				if (c == 0)
					continue;
				out = add(out, scale(partial(s, VariableId{l, mu}), c));
			}
		return out;
	};
	auto apply_x = [&](const TruncatedSeries &s) { return apply_linear(f.r, s); };

	auto out = exp_operator(Z, slack, "apply_factorized(V)", apply_v);
	out = exp_operator(out, slack, "apply_factorized(W)", apply_w);
	out = exp_operator(out, slack, "apply_factorized(X)", apply_x);
	return out.with_watermark(std::max(0, Z.watermark() - 2 * slack));
}

TruncatedSeries transformed_free_energy(const CorrelatorTable &table, const RMatrix &r,
                                        SeriesCaps target, TransformRoute route)
{
	TransformCaps tc = derive_transform_caps(target);
	TruncatedSeries f = table_to_free_energy_pruned(table, tc.working, tc.slack_max);
	TruncatedSeries Z = prune_slack(exp_series(f), tc.slack_max);
	TruncatedSeries Zt = route == TransformRoute::Operator
	                         ? exponentiate_action(r, Z, tc.slack_max)
	                         : apply_factorized(factorize(r, tc.zmax), Z, tc.slack_max);
	return log_series(Zt).restricted(target);
}

} // namespace givental
