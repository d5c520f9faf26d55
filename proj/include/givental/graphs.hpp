#pragma once

#include "givental/operator_action.hpp"

namespace givental {

// Enumeration bounds for the decorated-graph sum. All derived from the
// series caps through the budget B = 3*genus_cap + degree_cap: a graph of
// genus g with kL ordinary leaves contributes at hbar^{g-1} t^{kL}, which
// survives the caps only if 3g + kL <= B; the per-vertex slack identity
// sum_v (3 g_v - 3 + val_v) = 3g - E - 3 + kL + kL0 >= 2 kL0 then bounds
// edges and dilaton leaves by B - 3.
struct GraphCaps {
	int max_vertices = 0;
	int max_edges = 0;
	int max_leaves = 0;
	int max_dilaton_leaves = 0;
	int max_genus = 0;
	int max_zpow = 0;
	int budget = 0; // B
};

GraphCaps derive_graph_caps(SeriesCaps target);

// Connected multigraph with per-vertex genus and leaf counts; loops and
// parallel edges allowed. Edges are stored as unordered pairs u <= v.
struct Graph {
	std::vector<int> genus;
	std::vector<int> leaves;
	std::vector<std::pair<int, int>> edges;

	int num_vertices() const { return (int)genus.size(); }
	int valence(int v) const;
	bool connected() const;
	int betti() const { return (int)edges.size() - num_vertices() + 1; }
	int total_genus() const;
};

// Decoration of one leaf: either an ordinary leaf carrying a variable
// t^{var_d, var_mu} or a dilaton leaf; basis/zpow expand the V[[z]]-valued
// sums into concrete e_basis z^zpow terms (basis == 0 means "still the
// full sum", the gamma-check level of the paper).
struct LeafDecor {
	bool dilaton = false;
	int basis = 0;
	int zpow = -1;
	int var_d = -1;
	int var_mu = 0;

	friend auto operator<=>(const LeafDecor &, const LeafDecor &) = default;
};

struct EndDecor {
	int basis = 0;
	int zpow = -1;

	friend auto operator<=>(const EndDecor &, const EndDecor &) = default;
};

struct DecoratedEdge {
	int u = 0, v = 0;
	EndDecor at_u, at_v;

	friend auto operator<=>(const DecoratedEdge &, const DecoratedEdge &) = default;
};

struct DecoratedGraph {
	std::vector<int> genus;
	std::vector<std::vector<LeafDecor>> leaves; // sorted within each vertex
	std::vector<DecoratedEdge> edges;           // u <= v; loops with at_u <= at_v

	int num_vertices() const { return (int)genus.size(); }
	int total_genus() const;
	// Sorts decorations into the canonical representative and returns an
	// encoding that is equal for isomorphic decorated graphs.
	std::vector<int> canonical_form() const;
};

// Order of the decoration-preserving automorphism group, by exhaustive
// search over vertex bijections times the internal leaf/parallel-edge/loop
// factors.
Integer automorphism_order(const DecoratedGraph &g);

// Expanded leaf decoration term: coefficient of e_basis z^zpow t^{d,mu}
// in L = exp(sum r_l z^l)(sum e_mu t^{d,mu} z^d).
struct LeafTerm {
	int basis;
	int zpow;
	VariableId var;
	Rational coeff;
};
std::vector<LeafTerm> leaf_vector(const RMatrix &r, int zmax, int max_var_level);

// Dilaton leaf terms: L0 = -z (exp(sum r_l z^l) - I) e_1, zpow >= 2.
struct DilatonTerm {
	int basis;
	int zpow;
	Rational coeff;
};
std::vector<DilatonTerm> dilaton_leaf_vector(const RMatrix &r, int zmax);

// Edge kernel E = Etilde eta with
//   Etilde = -hbar (exp(-r(-z)) exp(r(w)) - I)/(z+w)
// as concrete terms coeff * (e_a z^i) (x) (e_b z^j); the hbar rides on the
// edge as an exponent, not on the coefficient. Symmetric under
// (a,i) <-> (b,j), so undirected edges are well-decorated.
class EdgeKernel {
public:
	EdgeKernel(const RMatrix &r, int zmax);

	int zmax() const { return zmax_; }
	Rational coeff(int a, int i, int b, int j) const;
	// (i, j) pairs carried by the element's level support at first order.
	bool structural_pair(int i, int j) const;

private:
	int n_, zmax_;
	std::vector<std::vector<Matrix>> q_; // q_[i][j] = bivector matrix at z^i w^j
	std::vector<bool> level_;
};

EdgeKernel edge_bivector(const RMatrix &r, int zmax);

// One representative per isomorphism class of connected graphs within the
// caps (including shapes whose contraction later vanishes).
std::vector<Graph> enumerate_graphs(const GraphCaps &caps);

// C(gamma): the contraction of a concretely decorated graph against the
// vertex tensors, with the hbar^{g_v - 1} vertex grading and one hbar per
// edge. Exact; missing table entries above the caps throw cap_error.
TruncatedSeries contract_graph(const DecoratedGraph &g, const CorrelatorTable &table,
                               const RMatrix &r, SeriesCaps caps);

struct GraphSumOptions {
	// Restrict ordinary-leaf variables to t^{d,mu} with d <= max_var_level;
	// the per-sector mode used by the inversion verification, where only
	// the descendant-free part is wanted.
	int max_var_level = -1; // -1: no restriction
	int threads = 1;        // contraction of distinct classes in parallel
};

// log(hat R Z) = sum over decorated graph classes of C(gamma)/#Aut(gamma),
// assembled from gamma-level classes whose leaf sums are contracted in
// place. Result restricted to the target caps.
TruncatedSeries graph_sum(const CorrelatorTable &table, const RMatrix &r, SeriesCaps target,
                          const GraphSumOptions &options = {});

// Fully expanded decorated graphs able to produce the requested monomial
// (leaf variables matching, per-vertex tameness, edge slots from the
// kernel's structural support, all-primary vertices with nonzero tensor),
// with their automorphism orders and exact contributions. Deterministic
// canonical order; the -emit-graphs surface.
struct EmittedGraph {
	DecoratedGraph graph;
	Integer aut;
	TruncatedSeries contribution;
};
std::vector<EmittedGraph> enumerate_contributions(const CorrelatorTable &table, const RMatrix &r,
                                                  const Monomial &monomial, SeriesCaps caps);

} // namespace givental
