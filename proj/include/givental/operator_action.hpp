#pragma once

#include "givental/rmatrix.hpp"

namespace givental {

// Caps bookkeeping for an exact Givental transform. Every term of the
// quantized operator raises the slack 3e + k - sum(d) of a series monomial
// by at least one, and lowers the t-degree by at most two; so coefficients
// of the target range are influenced only by monomials with slack at most
// slack_max and t-degree at most degree_cap + 2*slack_max. Computing at
// the widened working caps with slack pruning and restricting afterwards
// is therefore exact.
struct TransformCaps {
	SeriesCaps target;
	SeriesCaps working;
	int slack_max; // 3*(genus_cap - 1) + degree_cap, clamped at 0
	int zmax;      // z-power truncation for matrix kernels
};

TransformCaps derive_transform_caps(SeriesCaps target);

// (r_l z^l)^ Z for a single level l: dilaton, linear and quadratic terms
// of the quantized operator.
TruncatedSeries apply_infinitesimal(const RMatrix &r, int level, const TruncatedSeries &Z);
// Sum over all levels of r.
TruncatedSeries apply_infinitesimal(const RMatrix &r, const TruncatedSeries &Z);

// hat R (Z) = sum_k A^k Z / k! with A = sum_l (r_l z^l)^. Exact at Z's own
// caps in the sense above; Z must be tame (slack >= 0 termwise), which
// bounds the iteration count. The optional slack bound prunes terms that
// cannot reach a narrower final target.
TruncatedSeries exponentiate_action(const RMatrix &r, const TruncatedSeries &Z);
TruncatedSeries exponentiate_action(const RMatrix &r, const TruncatedSeries &Z, int slack_max);

// CBH-factorized form hat R = exp(linear) exp(dilaton) exp(quadratic):
// the quadratic kernel V_{k,l} solves
//   (z+w) sum V_{k,l} z^k w^l = -(hbar/2)(exp(-r(-z)) exp(r(w)) - I)
// by exact division (the numerator vanishes on z = -w), and the dilaton
// kernel W_l is given by sum W_l z^l = (-z)(exp(r(z)) - I).
struct FactorizedAction {
	RMatrix r; // linear part data t^{d,nu} (r_l)^mu_nu d_{d+l,mu}
	// (V_{k,l})^{mu nu} without the hbar factor (applied per use)
	std::vector<std::vector<Matrix>> v;
	// W_l as operator matrices; only the e_1 column enters the action
	std::vector<Matrix> w;
};

FactorizedAction factorize(const RMatrix &r, int zmax);
TruncatedSeries apply_factorized(const FactorizedAction &f, const TruncatedSeries &Z);
TruncatedSeries apply_factorized(const FactorizedAction &f, const TruncatedSeries &Z, int slack_max);

// Exact end-to-end transform: builds Z at the derived working caps from
// the table, applies the action, and returns log(hat R Z) restricted to
// the target caps.
enum class TransformRoute { Operator, Factorized };
TruncatedSeries transformed_free_energy(const CorrelatorTable &table, const RMatrix &r,
                                        SeriesCaps target,
                                        TransformRoute route = TransformRoute::Operator);

} // namespace givental
