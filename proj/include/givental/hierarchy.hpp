#pragma once

#include "givental/inversion.hpp"

namespace givental {

// Hamiltonian density of the principal hierarchy: theta_{alpha,p} =
// Omega_{alpha,p;1,0} restricted to the small phase space, as a series in
// the flat coordinates v^mu == t^{0,mu} at the expansion point.
struct HamiltonianDensity {
	int alpha = 1;
	int p = 0;
	TruncatedSeries value;
};

// From the reconstructed genus-0 descendant potential:
// theta = sum over primary multisets <tau_p(alpha) tau_0(1) tau_0(mu_1)...> / |Aut| v^mu...
HamiltonianDensity theta(const FrobeniusPotential &F, int alpha, int p, int cap);

// U f = -v^n f - (1/2) sum_g v^g v^{n+1-g} df/dv^1 + v^n sum_g v^g df/dv^g.
TruncatedSeries u_operator(const TruncatedSeries &f);

// Truncated operator exponential sum U^k f / k!; every term of U raises
// the v-degree by one, which is verified at runtime by requiring the
// partial sums to stabilize within the cap.
TruncatedSeries exp_u(const TruncatedSeries &f);

// thetahat_{alpha,p}(vhat) = (exp(U) theta_{alpha,p} + delta^n_alpha
// exp(U) theta_{1,p+1})|_{v = vhat}; the n-th variable of the result reads
// as eps = vhat^n + 1 at the target point.
HamiltonianDensity transform_hamiltonians(const FrobeniusPotential &F, int alpha, int p, int cap);

// The Liu-Xu-Zhang form of the transformed densities, re-expressed through
// the inverse inversion map and expanded at the target point:
// thetahat_{1,0} = -1/v^n, thetahat_{1,p} = -theta_{n,p-1}/v^n (p >= 1),
// thetahat_{alpha,p} = theta_{alpha,p}/v^n (middle), thetahat_{n,p} =
// theta_{1,p+1}/v^n.
HamiltonianDensity lxz_hamiltonians(const FrobeniusPotential &F, int alpha, int p, int cap);

// First-order Givental deformation of theta through the operator module:
// the hbar^{-1} part of (r_1 z)^ Z / Z, differentiated and restricted.
// Equals u_operator(theta_{alpha,p}) + delta^n_alpha theta_{1,p+1}.
TruncatedSeries theta_deformation(const FrobeniusPotential &F, int alpha, int p, int cap);

// Exact linear algebra over the coefficient vectors (constant terms
// dropped: densities are defined modulo constants). Exhibits each member
// of family A in the span of family B or a certificate residual.
struct SpanComparison {
	std::vector<HamiltonianDensity> family_a, family_b;
	bool a_in_span_b = false;
	// row i: coefficients expressing family_a[i] over family_b
	std::vector<std::vector<Rational>> change_of_basis;
	int failing_index = -1;
	TruncatedSeries residual{SeriesCaps{1, 0, 0}};
};

SpanComparison compare_spans(std::vector<HamiltonianDensity> family_a,
                             std::vector<HamiltonianDensity> family_b, int cap);

} // namespace givental
