#include "givental/graphs.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <numeric>
#include <set>
#include <thread>

namespace givental {

GraphCaps derive_graph_caps(SeriesCaps target)
{
	GraphCaps gc;
	gc.budget = 3 * target.genus_cap + target.degree_cap;
	gc.max_leaves = target.degree_cap;
	gc.max_edges = std::max(0, gc.budget - 3);
	gc.max_dilaton_leaves = std::max(0, gc.budget - 3);
	gc.max_genus = gc.budget / 3;
	gc.max_vertices = std::max(1, gc.budget - 2);
	gc.max_zpow = gc.budget;
	return gc;
}

int Graph::valence(int v) const
{
	int val = leaves[v];
	for (const auto &[a, b] : edges) {
		if (a == v)
			++val;
		if (b == v)
			++val;
	}
	return val;
}

int Graph::total_genus() const
{
	return betti() + std::accumulate(genus.begin(), genus.end(), 0);
}

bool Graph::connected() const
{
	const int n = num_vertices();
	if (n == 0)
		return false;
	std::vector<int> seen(n, 0);
	std::vector<int> stack{0};
	seen[0] = 1;
	while (!stack.empty()) {
		int v = stack.back();
		stack.pop_back();
		for (const auto &[a, b] : edges) {
			int w = -1;
			if (a == v)
				w = b;
			else if (b == v)
				w = a;
			if (w >= 0 && !seen[w]) {
				seen[w] = 1;
				stack.push_back(w);
			}
		}
	}
	return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

int DecoratedGraph::total_genus() const
{
	int b1 = (int)edges.size() - num_vertices() + 1;
	return b1 + std::accumulate(genus.begin(), genus.end(), 0);
}

namespace {

// ---- shared machinery over vertex-attributed multigraphs ----

bool connected_edges(int nv, const std::vector<std::pair<int, int>> &edges)
{
	if (nv == 1)
		return true;
	std::vector<int> seen(nv, 0);
	std::vector<int> stack{0};
	seen[0] = 1;
	while (!stack.empty()) {
		int v = stack.back();
		stack.pop_back();
		for (const auto &[a, b] : edges) {
			int w = a == v ? b : (b == v ? a : -1);
			if (w >= 0 && !seen[w]) {
				seen[w] = 1;
				stack.push_back(w);
			}
		}
	}
	return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

// All permutations of 0..nv-1 whose blocks (given by equal keys) are
// respected; keys must be sorted.
template <typename Key>
std::vector<std::vector<int>> block_permutations(const std::vector<Key> &keys)
{
	const int nv = (int)keys.size();
	std::vector<std::vector<int>> out;
	std::vector<int> perm(nv);
	std::iota(perm.begin(), perm.end(), 0);
	// iterate permutations block by block
	std::vector<std::pair<int, int>> blocks; // [begin, end)
	int b = 0;
	for (int i = 1; i <= nv; ++i)
		if (i == nv || !(keys[i] == keys[b])) {
			blocks.emplace_back(b, i);
			b = i;
		}
	std::function<void(size_t)> rec = [&](size_t bi) {
		if (bi == blocks.size()) {
			out.push_back(perm);
			return;
		}
		auto [lo, hi] = blocks[bi];
		std::sort(perm.begin() + lo, perm.begin() + hi);
		do
			rec(bi + 1);
		while (std::next_permutation(perm.begin() + lo, perm.begin() + hi));
	};
	rec(0);
	return out;
}

} // namespace

std::vector<int> DecoratedGraph::canonical_form() const
{
	const int nv = num_vertices();
	// vertex key: (genus, sorted leaf multiset) packed as ints
	auto leaf_code = [](const LeafDecor &l) {
		return std::array<int, 5>{l.dilaton ? 1 : 0, l.basis, l.zpow, l.var_d, l.var_mu};
	};
	std::vector<std::vector<int>> vkey(nv);
	for (int v = 0; v < nv; ++v) {
		vkey[v].push_back(genus[v]);
		std::vector<std::array<int, 5>> ls;
		for (const auto &l : leaves[v])
			ls.push_back(leaf_code(l));
		std::sort(ls.begin(), ls.end());
		for (const auto &a : ls)
			vkey[v].insert(vkey[v].end(), a.begin(), a.end());
	}
	// order vertices by key first (canonical representatives sort blocks)
	std::vector<int> order(nv);
	std::iota(order.begin(), order.end(), 0);
	std::sort(order.begin(), order.end(), [&](int a, int b) { return vkey[a] < vkey[b]; });
	std::vector<std::vector<int>> keys_sorted(nv);
	for (int i = 0; i < nv; ++i)
		keys_sorted[i] = vkey[order[i]];

	auto encode = [&](const std::vector<int> &pos_of_old) {
		// pos_of_old[v] = new index of old vertex v
		std::vector<int> enc;
		enc.push_back(nv);
		for (int i = 0; i < nv; ++i) {
			enc.push_back(-1);
			const auto &k = keys_sorted[i];
			enc.insert(enc.end(), k.begin(), k.end());
		}
		std::vector<std::array<int, 6>> es;
		for (const auto &e : edges) {
			int u = pos_of_old[e.u], v = pos_of_old[e.v];
			EndDecor du = e.at_u, dv = e.at_v;
			if (u > v || (u == v && std::tie(dv.basis, dv.zpow) < std::tie(du.basis, du.zpow))) {
				std::swap(u, v);
				std::swap(du, dv);
			}
			es.push_back({u, v, du.basis, du.zpow, dv.basis, dv.zpow});
		}
		std::sort(es.begin(), es.end());
		for (const auto &a : es) {
			enc.push_back(-2);
			enc.insert(enc.end(), a.begin(), a.end());
		}
		return enc;
	};

	std::vector<int> best;
	for (const auto &perm : block_permutations(keys_sorted)) {
		// perm maps new position -> position in `order`: old vertex order[perm[i]] gets new index i
		std::vector<int> pos_of_old(nv);
		for (int i = 0; i < nv; ++i)
			pos_of_old[order[perm[i]]] = i;
		auto enc = encode(pos_of_old);
		if (best.empty() || enc < best)
			best = std::move(enc);
	}
	return best;
}

Integer automorphism_order(const DecoratedGraph &g)
{
	const int nv = g.num_vertices();
	// normalized decorated edge tuples
	auto norm_edge = [](const DecoratedGraph &gr, int u, int v, EndDecor du, EndDecor dv) {
		(void)gr;
		if (u > v || (u == v && std::tie(dv.basis, dv.zpow) < std::tie(du.basis, du.zpow))) {
			std::swap(u, v);
			std::swap(du, dv);
		}
		return std::array<int, 6>{u, v, du.basis, du.zpow, dv.basis, dv.zpow};
	};
	std::vector<std::array<int, 6>> base;
	for (const auto &e : g.edges)
		base.push_back(norm_edge(g, e.u, e.v, e.at_u, e.at_v));
	std::sort(base.begin(), base.end());

	// vertex keys: genus + sorted leaves
	std::vector<std::vector<int>> vkey(nv);
	for (int v = 0; v < nv; ++v) {
		vkey[v].push_back(g.genus[v]);
		std::vector<std::array<int, 5>> ls;
		for (const auto &l : g.leaves[v])
			ls.push_back({l.dilaton ? 1 : 0, l.basis, l.zpow, l.var_d, l.var_mu});
		std::sort(ls.begin(), ls.end());
		for (const auto &a : ls)
			vkey[v].insert(vkey[v].end(), a.begin(), a.end());
	}
	std::vector<int> order(nv);
	std::iota(order.begin(), order.end(), 0);
	std::sort(order.begin(), order.end(), [&](int a, int b) { return vkey[a] < vkey[b]; });
	std::vector<std::vector<int>> keys_sorted(nv);
	for (int i = 0; i < nv; ++i)
		keys_sorted[i] = vkey[order[i]];

	Integer vertex_perms = 0;
	for (const auto &perm : block_permutations(keys_sorted)) {
		std::vector<int> image(nv); // old vertex -> old vertex
		for (int i = 0; i < nv; ++i)
			image[order[i]] = order[perm[i]];
		std::vector<std::array<int, 6>> mapped;
		for (const auto &e : g.edges)
			mapped.push_back(norm_edge(g, image[e.u], image[e.v], e.at_u, e.at_v));
		std::sort(mapped.begin(), mapped.end());
		if (mapped == base)
			++vertex_perms;
	}

	Integer internal = 1;
	// leaves: per-vertex multiplicities of identical decorations
	for (int v = 0; v < nv; ++v) {
		std::vector<std::array<int, 5>> ls;
		for (const auto &l : g.leaves[v])
			ls.push_back({l.dilaton ? 1 : 0, l.basis, l.zpow, l.var_d, l.var_mu});
		std::sort(ls.begin(), ls.end());
		int run = 1;
		for (size_t i = 1; i < ls.size(); ++i)
			internal *= (ls[i] == ls[i - 1]) ? ++run : (run = 1);
	}
	// parallel edges with identical decorated ends, and loop half-swaps
	{
		int run = 1;
		for (size_t i = 1; i < base.size(); ++i)
			internal *= (base[i] == base[i - 1]) ? ++run : (run = 1);
		for (const auto &e : base)
			if (e[0] == e[1] && e[2] == e[4] && e[3] == e[5])
				internal *= 2;
	}
	return vertex_perms * internal;
}

// ---- decoration kernels ----

std::vector<LeafTerm> leaf_vector(const RMatrix &r, int zmax, int max_var_level)
{
	const int n = r.dimension();
	auto mpos = exp_r_series(r, zmax);
	std::vector<LeafTerm> out;
	for (int d = 0; d <= std::min(zmax, max_var_level); ++d)
		for (int mu = 1; mu <= n; ++mu)
			for (int j = 0; d + j <= zmax; ++j)
				for (int a = 1; a <= n; ++a) {
					Rational c = mpos[j][a - 1][mu - 1];
					if (!(c == 0))
						out.push_back(LeafTerm{a, d + j, VariableId{d, mu}, c});
				}
	return out;
}

std::vector<DilatonTerm> dilaton_leaf_vector(const RMatrix &r, int zmax)
{
	const int n = r.dimension();
	auto mpos = exp_r_series(r, std::max(zmax - 1, 0));
	std::vector<DilatonTerm> out;
	for (int p = 2; p <= zmax; ++p)
		for (int a = 1; a <= n; ++a) {
			Rational c = -mpos[p - 1][a - 1][0];
			if (!(c == 0))
				out.push_back(DilatonTerm{a, p, c});
		}
	return out;
}

EdgeKernel::EdgeKernel(const RMatrix &r, int zmax) : n_(r.dimension()), zmax_(zmax)
{
	auto Q = edge_quotient(r, zmax);
	q_.resize(zmax + 1);
	for (int i = 0; i <= zmax; ++i) {
		q_[i].resize(zmax + 1 - i, zero_matrix(n_));
		for (int j = 0; i + j <= zmax; ++j) {
			Matrix biv = zero_matrix(n_);
			for (int a = 1; a <= n_; ++a)
				for (int b = 1; b <= n_; ++b)
					biv[a - 1][b - 1] = -Q[i][j][a - 1][eta_dual(b, n_) - 1];
			q_[i][j] = biv;
		}
	}
	level_.assign(zmax + 2, false);
	for (const auto &[l, m] : r.levels())
		if (l <= zmax + 1)
			level_[l] = true;
}

Rational EdgeKernel::coeff(int a, int i, int b, int j) const
{
	if (i < 0 || j < 0 || i + j > zmax_)
		return 0;
	return q_[i][j][a - 1][b - 1];
}

bool EdgeKernel::structural_pair(int i, int j) const
{
	return i >= 0 && j >= 0 && i + j + 1 < (int)level_.size() && level_[i + j + 1];
}

EdgeKernel edge_bivector(const RMatrix &r, int zmax)
{
	return EdgeKernel(r, zmax);
}

// ---- enumeration of gamma-level classes ----

namespace {

struct VAttr {
	int g = 0, kl = 0, kl0 = 0;
	friend auto operator<=>(const VAttr &, const VAttr &) = default;
};

struct TypedGraph {
	std::vector<VAttr> attr;
	std::vector<std::pair<int, int>> edges;

	int valence(int v) const
	{
		int val = attr[v].kl + attr[v].kl0;
		for (const auto &[a, b] : edges)
			val += (a == v) + (b == v);
		return val;
	}
	int total_genus() const
	{
		int s = (int)edges.size() - (int)attr.size() + 1;
		for (const auto &a : attr)
			s += a.g;
		return s;
	}
};

std::vector<int> typed_encode(const TypedGraph &t, const std::vector<int> &pos_of_old,
                              const std::vector<VAttr> &attr_sorted)
{
	std::vector<int> enc;
	for (const auto &a : attr_sorted) {
		enc.push_back(a.g);
		enc.push_back(a.kl);
		enc.push_back(a.kl0);
	}
	std::vector<std::pair<int, int>> es;
	for (auto [u, v] : t.edges) {
		int a = pos_of_old[u], b = pos_of_old[v];
		es.emplace_back(std::min(a, b), std::max(a, b));
	}
	std::sort(es.begin(), es.end());
	for (auto [a, b] : es) {
		enc.push_back(a);
		enc.push_back(b);
	}
	return enc;
}

// Canonical encoding (attrs are already sorted in t).
std::vector<int> typed_canonical(const TypedGraph &t)
{
	const int nv = (int)t.attr.size();
	std::vector<int> best;
	for (const auto &perm : block_permutations(t.attr)) {
		std::vector<int> pos_of_old(nv);
		for (int i = 0; i < nv; ++i)
			pos_of_old[perm[i]] = i;
		auto enc = typed_encode(t, pos_of_old, t.attr);
		if (best.empty() || enc < best)
			best = std::move(enc);
	}
	return best;
}

Integer typed_aut(const TypedGraph &t)
{
	const int nv = (int)t.attr.size();
	std::vector<std::pair<int, int>> base;
	for (auto [u, v] : t.edges)
		base.emplace_back(std::min(u, v), std::max(u, v));
	std::sort(base.begin(), base.end());
	Integer vertex_perms = 0;
	for (const auto &perm : block_permutations(t.attr)) {
		// attrs sorted, so perm maps equal-attr positions among themselves
		std::vector<std::pair<int, int>> mapped;
		for (auto [u, v] : t.edges) {
			int a = perm[u], b = perm[v];
			mapped.emplace_back(std::min(a, b), std::max(a, b));
		}
		std::sort(mapped.begin(), mapped.end());
		if (mapped == base)
			++vertex_perms;
	}
	Integer internal = 1;
	{
		int run = 1;
		for (size_t i = 1; i < base.size(); ++i)
			internal *= (base[i] == base[i - 1]) ? ++run : (run = 1);
		for (const auto &[u, v] : base)
			if (u == v)
				internal *= 2;
	}
	for (const auto &a : t.attr)
		internal *= factorial(a.kl) * factorial(a.kl0);
	return vertex_perms * internal;
}

// All typed classes within the caps with nonvanishing-tensor viability.
std::vector<TypedGraph> enumerate_typed(const GraphCaps &caps, int table_max_genus,
                                        int target_genus_cap, int target_degree_cap)
{
	std::vector<TypedGraph> out;
	std::set<std::vector<int>> seen;

	const int B = caps.budget;
	for (int nv = 1; nv <= caps.max_vertices; ++nv) {
		// non-decreasing attr sequences with 3*sum(g) + sum(kl) <= B
		std::vector<VAttr> attr(nv);
		std::function<void(int, int, int)> attrs = [&](int idx, int spent, int kl0_total) {
			if (idx == nv) {
				int kl_tot = 0, kl0_tot = 0, g_sum = 0, n_g0 = 0;
				for (const auto &a : attr) {
					kl_tot += a.kl;
					kl0_tot += a.kl0;
					g_sum += a.g;
					n_g0 += a.g == 0;
				}
				// genus budget: 3(b1 + sum g) + kl <= B with b1 = E - V + 1
				int emax = std::min(caps.max_edges,
				                    (B - kl_tot) / 3 - g_sum + nv - 1);
				// genus-0 vertices need valence 3, which only leaves and
				// edges can supply
				if (nv > 1 && 3 * n_g0 > kl_tot + kl0_tot + 2 * emax)
					return;
				// connectivity and trivalence force edges from below
				int emin = std::max(nv - 1, (3 * n_g0 - kl_tot - kl0_tot + 1) / 2);
				if (nv == 1)
					emin = 0;
				if (emax < emin)
					return;
				// edge multiplicities over pairs; vertex u is complete once
				// the pair index leaves its block, so its valence and
				// dilaton budget are checked there
				std::vector<std::pair<int, int>> pairs;
				for (int u = 0; u < nv; ++u)
					for (int v = u; v < nv; ++v)
						pairs.emplace_back(u, v);
				std::vector<int> degree(nv, 0);
				auto vertex_ok = [&](int u) {
					int val = attr[u].kl + attr[u].kl0 + degree[u];
					if (attr[u].g == 0 && val < 3 && nv > 1)
						return false;
					if (val == 0 && nv > 1)
						return false;
					return 3 * attr[u].g - 3 + val >= 2 * attr[u].kl0;
				};
				std::vector<std::pair<int, int>> edges;
				std::function<void(size_t)> efill = [&](size_t pi) {
					if ((int)edges.size() > emax)
						return;
					if (pi < pairs.size() && pi > 0 &&
					    pairs[pi].first != pairs[pi - 1].first &&
					    !vertex_ok(pairs[pi - 1].first))
						return;
					if (pi == pairs.size()) {
						if (!vertex_ok(nv - 1))
							return;
						if ((int)edges.size() < emin)
							return;
						TypedGraph t{attr, edges};
						if (!connected_edges(nv, edges))
							return;
						int g = t.total_genus();
						if (g < 0 || g > caps.max_genus)
							return;
						int kl_total = 0, kl0_tot = 0;
						for (const auto &a : attr) {
							kl_total += a.kl;
							kl0_tot += a.kl0;
						}
						// admits the target caps at hbar^{g-1} t^{kl}
						if (3 * (g - target_genus_cap) > target_degree_cap - kl_total)
							return;
						// slack identity: total z budget >= 2 kl0
						if (3 * g - (int)edges.size() - 3 + kl_total + kl0_tot < 2 * kl0_tot)
							return;
						for (int v = 0; v < nv; ++v) {
							int val = t.valence(v);
							// genus-0 vertices need valence >= 3; the
							// only valence-0 vertex allowed is a lone
							// higher-genus one
							if (attr[v].g == 0 && val < 3)
								return;
							if (val == 0 && nv > 1)
								return;
							if (attr[v].g > table_max_genus)
								return;
							// per-vertex z budget for dilaton leaves
							if (3 * attr[v].g - 3 + val < 2 * attr[v].kl0)
								return;
						}
						auto canon = typed_canonical(t);
						if (seen.insert(std::move(canon)).second)
							out.push_back(std::move(t));
						return;
					}
					efill(pi + 1);
					int pushed = 0;
					while ((int)edges.size() < emax) {
						edges.push_back(pairs[pi]);
						degree[pairs[pi].first] += pairs[pi].first == pairs[pi].second ? 2 : 1;
						if (pairs[pi].first != pairs[pi].second)
							degree[pairs[pi].second] += 1;
						++pushed;
						efill(pi + 1);
					}
					for (; pushed; --pushed) {
						degree[pairs[pi].first] -= pairs[pi].first == pairs[pi].second ? 2 : 1;
						if (pairs[pi].first != pairs[pi].second)
							degree[pairs[pi].second] -= 1;
						edges.pop_back();
					}
				};
				efill(0);
				return;
			}
			VAttr lo = idx ? attr[idx - 1] : VAttr{0, 0, 0};
			for (int g = lo.g; spent + 3 * g <= B; ++g) {
				if (g > caps.max_genus)
					break;
				for (int kl = (g == lo.g ? lo.kl : 0); spent + 3 * g + kl <= B &&
				                                       kl <= caps.max_leaves;
				     ++kl)
					for (int kl0 = (g == lo.g && kl == lo.kl ? lo.kl0 : 0);
					     kl0 <= caps.max_dilaton_leaves - kl0_total; ++kl0) {
						attr[idx] = VAttr{g, kl, kl0};
						attrs(idx + 1, spent + 3 * g + kl, kl0_total + kl0);
					}
			}
		};
		attrs(0, 0, 0);
	}
	return out;
}

} // namespace

std::vector<Graph> enumerate_graphs(const GraphCaps &caps)
{
	// Underlying graphs: vertex attributes (genus, leaf count), low-valence
	// shapes retained (they contract to zero but belong to the list).
	std::vector<Graph> out;
	std::set<std::vector<int>> seen;
	for (int nv = 1; nv <= caps.max_vertices; ++nv) {
		std::vector<VAttr> attr(nv);
		std::function<void(int, int)> attrs = [&](int idx, int leaves_used) {
			if (idx == nv) {
				std::vector<std::pair<int, int>> pairs;
				for (int u = 0; u < nv; ++u)
					for (int v = u; v < nv; ++v)
						pairs.emplace_back(u, v);
				std::vector<std::pair<int, int>> edges;
				std::function<void(size_t)> efill = [&](size_t pi) {
					if ((int)edges.size() > caps.max_edges)
						return;
					if (pi == pairs.size()) {
						TypedGraph t{attr, edges};
						if (!connected_edges(nv, edges))
							return;
						if (t.total_genus() > caps.max_genus)
							return;
						auto canon = typed_canonical(t);
						if (!seen.insert(std::move(canon)).second)
							return;
						Graph g;
						for (const auto &a : attr) {
							g.genus.push_back(a.g);
							g.leaves.push_back(a.kl);
						}
						for (auto [u, v] : edges)
							g.edges.emplace_back(u, v);
						out.push_back(std::move(g));
						return;
					}
					efill(pi + 1);
					while ((int)edges.size() < caps.max_edges) {
						edges.push_back(pairs[pi]);
						efill(pi + 1);
					}
					while (!edges.empty() && edges.back() == pairs[pi])
						edges.pop_back();
				};
				efill(0);
				return;
			}
			VAttr lo = idx ? attr[idx - 1] : VAttr{0, 0, 0};
			for (int g = lo.g; g <= caps.max_genus; ++g)
				for (int kl = (g == lo.g ? lo.kl : 0); leaves_used + kl <= caps.max_leaves;
				     ++kl) {
					attr[idx] = VAttr{g, kl, 0};
					attrs(idx + 1, leaves_used + kl);
				}
		};
		attrs(0, 0);
	}
	return out;
}

// ---- contraction ----

namespace {

using End = std::pair<int, int>; // (basis, zpow)

struct ContractEnv {
	const CorrelatorTable *table;
	const EdgeKernel *kernel;
	std::vector<LeafTerm> lterms;
	std::vector<DilatonTerm> dterms;
	SeriesCaps caps;
	// memoized leaf closures keyed by (g, kl, kl0, sorted ends)
	std::map<std::vector<int>, TruncatedSeries> closure_memo;

	// nonzero kernel entries, for message sums
	std::vector<std::array<int, 4>> kernel_support; // (a,i,b,j)

	void build_support(int n)
	{
		for (int i = 0; i <= kernel->zmax(); ++i)
			for (int j = 0; i + j <= kernel->zmax(); ++j)
				for (int a = 1; a <= n; ++a)
					for (int b = 1; b <= n; ++b)
						if (!(kernel->coeff(a, i, b, j) == 0))
							kernel_support.push_back({a, i, b, j});
	}
};

int z_budget(int g, int val)
{
	return 3 * g - 3 + val;
}

// sum over ordered assignments of leaf terms to the kl + kl0 leaf slots of
// one vertex, contracted against the vertex tensor with the fixed ends.
const TruncatedSeries &leaf_closure(ContractEnv &env, int g, int kl, int kl0,
                                    std::vector<End> ends)
{
	std::sort(ends.begin(), ends.end());
	std::vector<int> key{g, kl, kl0};
	for (const auto &[a, p] : ends) {
		key.push_back(a);
		key.push_back(p);
	}
	auto it = env.closure_memo.find(key);
	if (it != env.closure_memo.end())
		return it->second;

	const int val = kl + kl0 + (int)ends.size();
	int zleft = z_budget(g, val);
	for (const auto &[a, p] : ends)
		zleft -= p;

	TruncatedSeries total(env.caps);
	if (zleft >= 0 && !(g == 0 && val < 3)) {
		InsertionList base;
		for (const auto &[a, p] : ends)
			base.push_back(Insertion{p, a});

		// choose a multiset of ordinary leaf terms (counts per term), then
		// dilaton terms; weight = (#ordered assignments) * prod coeffs
		std::function<void(size_t, int, int, Integer, Rational, Monomial, InsertionList &)>
		    pick_l = [&](size_t ti, int left, int zl, Integer denom, Rational coeff,
		                 Monomial mono, InsertionList &ins) {
			    if (left == 0 || ti == env.lterms.size()) {
				    if (left != 0)
					    return;
				    std::function<void(size_t, int, int, Integer, Rational, InsertionList &)>
				        pick_d = [&](size_t di, int dleft, int zl2, Integer denom2,
				                     Rational coeff2, InsertionList &ins2) {
					        if (dleft == 0) {
						        Rational v = env.table->lookup(g, ins2);
						        if (v == 0)
							        return;
						        Rational w = coeff2 *
						                     Rational(factorial(kl) * factorial(kl0) / denom2);
						        total = add(total, TruncatedSeries::monomial(
						                               env.caps, mono.times_hbar(g - 1),
						                               v * w));
						        return;
					        }
					        if (di == env.dterms.size())
						        return;
					        pick_d(di + 1, dleft, zl2, denom2, coeff2, ins2);
					        const auto &t = env.dterms[di];
					        Integer dn = denom2;
					        Rational cf = coeff2;
					        int z = zl2;
					        int pushed = 0;
					        for (int c = 1; c <= dleft; ++c) {
						        z -= t.zpow;
						        if (z < 0)
							        break;
						        dn *= c;
						        cf *= t.coeff;
						        ins2.push_back(Insertion{t.zpow, t.basis});
						        ++pushed;
						        pick_d(di + 1, dleft - c, z, dn, cf, ins2);
					        }
					        for (int i2 = 0; i2 < pushed; ++i2)
						        ins2.pop_back();
				        };
				    InsertionList ins2 = ins;
				    pick_d(0, kl0, zl, denom, coeff, ins2);
				    return;
			    }
			    pick_l(ti + 1, left, zl, denom, coeff, mono, ins);
			    const auto &t = env.lterms[ti];
			    Integer dn = denom;
			    Rational cf = coeff;
			    Monomial mn = mono;
			    int z = zl;
			    int pushed = 0;
			    for (int c = 1; c <= left; ++c) {
				    z -= t.zpow;
				    if (z < 0)
					    break;
				    dn *= c;
				    cf *= t.coeff;
				    mn = mn.times_var(t.var, 1);
				    ins.push_back(Insertion{t.zpow, t.basis});
				    ++pushed;
				    pick_l(ti + 1, left - c, z, dn, cf, mn, ins);
			    }
			    for (int i = 0; i < pushed; ++i)
				    ins.pop_back();
		    };
		InsertionList ins = base;
		pick_l(0, kl, zleft, 1, 1, Monomial::one(), ins);
	}
	return env.closure_memo.emplace(std::move(key), std::move(total)).first->second;
}

// value of the subtree rooted at v (children fully contracted) for each
// possible decoration of v's edge-end towards the parent; fixed holds the
// already-assigned non-tree edge ends per vertex.
struct TreeDP {
	const TypedGraph *t;
	ContractEnv *env;
	std::vector<std::vector<int>> children; // tree children
	std::vector<std::vector<End>> fixed;    // non-tree ends per vertex

	// messages towards the parent: sum over the child-side end of the
	// kernel times the subtree value; keyed by the parent-side end
	std::map<End, TruncatedSeries> message(int v)
	{
		// subtree value of v for a given own-end decoration (or none)
		std::map<End, TruncatedSeries> vals = values(v, true);
		std::map<End, TruncatedSeries> out;
		for (const auto &[own, sval] : vals) {
			auto [a, i] = own;
			for (const auto &[b2, j2] : candidate_ends()) {
				Rational c = env->kernel->coeff(a, i, b2, j2);
				if (c == 0)
					continue;
				// one hbar per edge
				auto term = mul_monomial(sval, Monomial(1), c);
				auto it = out.find(End{b2, j2});
				if (it == out.end())
					out.emplace(End{b2, j2}, std::move(term));
				else
					it->second = add(it->second, term);
			}
		}
		return out;
	}

	std::vector<End> candidate_ends() const
	{
		std::vector<End> out;
		const int n = env->caps.dimension;
		for (int a = 1; a <= n; ++a)
			for (int i = 0; i <= env->kernel->zmax(); ++i)
				out.emplace_back(a, i);
		return out;
	}

	// all joint values at v: if with_own, keyed by v's parent-side end;
	// otherwise a single entry keyed by (-1,-1)
	std::map<End, TruncatedSeries> values(int v, bool with_own)
	{
		std::vector<std::map<End, TruncatedSeries>> msgs;
		for (int c : children[v])
			msgs.push_back(message(c));

		std::map<End, TruncatedSeries> out;
		const VAttr &at = t->attr[v];
		// iterate tuples of children ends
		std::vector<std::map<End, TruncatedSeries>::const_iterator> its;
		std::function<void(size_t, std::vector<End> &, TruncatedSeries)> rec =
		    [&](size_t ci, std::vector<End> &ends, TruncatedSeries weight) {
			    if (ci == msgs.size()) {
				    std::vector<End> all = env_ends(v, ends);
				    if (with_own) {
					    for (const auto &own : candidate_ends()) {
						    std::vector<End> full = all;
						    full.push_back(own);
						    if (!feasible(at, full))
							    continue;
						    auto cl = leaf_closure(*env, at.g, at.kl, at.kl0, full);
						    if (cl.is_zero())
							    continue;
						    auto term = mul(weight, cl);
						    insert_out(out, own, term);
					    }
				    } else {
					    if (!feasible(at, all))
						    return;
					    auto cl = leaf_closure(*env, at.g, at.kl, at.kl0, all);
					    if (cl.is_zero())
						    return;
					    insert_out(out, End{-1, -1}, mul(weight, cl));
				    }
				    return;
			    }
			    for (const auto &[end, series] : msgs[ci]) {
				    ends.push_back(end);
				    rec(ci + 1, ends, mul(weight, series));
				    ends.pop_back();
			    }
		    };
		std::vector<End> ends;
		rec(0, ends, TruncatedSeries::constant(env->caps, 1));
		return out;
	}

	std::vector<End> env_ends(int v, const std::vector<End> &child_ends) const
	{
		std::vector<End> all = fixed[v];
		all.insert(all.end(), child_ends.begin(), child_ends.end());
		return all;
	}

	bool feasible(const VAttr &at, const std::vector<End> &ends) const
	{
		int zb = z_budget(at.g, at.kl + at.kl0 + (int)ends.size());
		for (const auto &[a, p] : ends)
			zb -= p;
		return zb >= 2 * at.kl0;
	}

	static void insert_out(std::map<End, TruncatedSeries> &out, End key,
	                       const TruncatedSeries &term)
	{
		auto it = out.find(key);
		if (it == out.end())
			out.emplace(key, term);
		else
			it->second = add(it->second, term);
	}
};

TruncatedSeries contract_typed(const TypedGraph &t, ContractEnv &env)
{
	const int nv = (int)t.attr.size();
	// spanning tree by BFS; remaining edges get explicit end assignments
	std::vector<std::vector<int>> children(nv);
	std::vector<int> parent(nv, -1), seen(nv, 0), order{0};
	seen[0] = 1;
	std::vector<std::pair<int, int>> nontree;
	std::vector<int> edge_used(t.edges.size(), 0);
	for (size_t qi = 0; qi < order.size(); ++qi) {
		int v = order[qi];
		for (size_t ei = 0; ei < t.edges.size(); ++ei) {
			if (edge_used[ei])
				continue;
			auto [a, b] = t.edges[ei];
			int w = a == v ? b : (b == v ? a : -1);
			if (w < 0)
				continue;
			if (!seen[w]) {
				seen[w] = 1;
				parent[w] = v;
				children[v].push_back(w);
				order.push_back(w);
				edge_used[ei] = 1;
			}
		}
	}
	for (size_t ei = 0; ei < t.edges.size(); ++ei)
		if (!edge_used[ei])
			nontree.push_back(t.edges[ei]);

	TreeDP dp{&t, &env, children, std::vector<std::vector<End>>(nv)};

	TruncatedSeries total(env.caps);
	// assign kernel terms to the non-tree edges
	std::function<void(size_t, Rational)> assign = [&](size_t ni, Rational coeff) {
		if (ni == nontree.size()) {
			auto vals = dp.values(0, false);
			auto it = vals.find(End{-1, -1});
			if (it == vals.end())
				return;
			// hbar per non-tree edge
			total = add(total, mul_monomial(it->second, Monomial((int)nontree.size()), coeff));
			return;
		}
		auto [u, v] = nontree[ni];
		for (const auto &[a, i, b, j] : env.kernel_support) {
			Rational c = env.kernel->coeff(a, i, b, j);
			dp.fixed[u].emplace_back(a, i);
			dp.fixed[v].emplace_back(b, j);
			bool ok = true;
			// cheap budget check on the touched vertices
			for (int w : {u, v}) {
				int zb = z_budget(t.attr[w].g, t.valence(w));
				for (const auto &[aa, pp] : dp.fixed[w])
					zb -= pp;
				if (zb < 2 * t.attr[w].kl0)
					ok = false;
			}
			if (ok)
				assign(ni + 1, coeff * c);
			dp.fixed[u].pop_back();
			dp.fixed[v].pop_back();
		}
	};
	assign(0, 1);
	return total;
}

} // namespace

TruncatedSeries contract_graph(const DecoratedGraph &g, const CorrelatorTable &table,
                               const RMatrix &r, SeriesCaps caps)
{
	const int n = table.dimension();
	if (caps.dimension != n || r.dimension() != n)
		throw std::invalid_argument("contract_graph: dimension mismatch");
	int zmax = derive_graph_caps(caps).max_zpow;
	auto mpos = exp_r_series(r, zmax + 1);
	EdgeKernel kernel(r, zmax);

	Rational coeff = 1;
	Monomial mono = Monomial::one();
	int hbar = (int)g.edges.size();
	InsertionList ins;
	std::vector<InsertionList> per_vertex(g.num_vertices());
	for (int v = 0; v < g.num_vertices(); ++v) {
		hbar += g.genus[v] - 1;
		for (const auto &l : g.leaves[v]) {
			if (l.basis == 0)
				throw std::invalid_argument("contract_graph: leaf decoration not expanded");
			if (l.dilaton) {
				if (l.zpow < 2)
					return TruncatedSeries::zero(caps);
				coeff *= -mpos[l.zpow - 1][l.basis - 1][0];
			} else {
				int j = l.zpow - l.var_d;
				if (j < 0)
					return TruncatedSeries::zero(caps);
				coeff *= mpos[j][l.basis - 1][l.var_mu - 1];
				mono = mono.times_var(VariableId{l.var_d, l.var_mu}, 1);
			}
			per_vertex[v].push_back(Insertion{l.zpow, l.basis});
		}
	}
	for (const auto &e : g.edges) {
		coeff *= kernel.coeff(e.at_u.basis, e.at_u.zpow, e.at_v.basis, e.at_v.zpow);
		per_vertex[e.u].push_back(Insertion{e.at_u.zpow, e.at_u.basis});
		per_vertex[e.v].push_back(Insertion{e.at_v.zpow, e.at_v.basis});
	}
	if (coeff == 0)
		return TruncatedSeries::zero(caps);
	for (int v = 0; v < g.num_vertices(); ++v)
		coeff *= table.lookup(g.genus[v], per_vertex[v]);
	return TruncatedSeries::monomial(caps, mono.times_hbar(hbar), coeff);
}

TruncatedSeries graph_sum(const CorrelatorTable &table, const RMatrix &r, SeriesCaps target,
                          const GraphSumOptions &options)
{
	const int n = table.dimension();
	if (target.dimension != n || r.dimension() != n)
		throw std::invalid_argument("graph_sum: dimension mismatch");
	// the per-vertex z-budget pruning below is tameness; refuse non-tame
	// explicit entries
	for (const auto &[key, v] : table.entries())
		if (total_level(key.second) > 3 * key.first - 3 + (int)key.second.size())
			throw std::invalid_argument("graph_sum: table contains a non-tame correlator");

	GraphCaps gcaps = derive_graph_caps(target);
	ContractEnv env;
	env.table = &table;
	EdgeKernel kernel(r, std::min(gcaps.max_zpow, 3 * gcaps.max_genus + gcaps.budget));
	env.kernel = &kernel;
	// Partial subtree values sit at intermediate hbar exponents (each edge
	// adds one, each genus-0 vertex still to come subtracts one), so the
	// contraction runs with genus headroom and only the final sum is
	// restricted to the target.
	env.caps = SeriesCaps{target.dimension, target.degree_cap,
	                      target.genus_cap + gcaps.max_vertices + gcaps.max_edges};
	int var_level = options.max_var_level < 0 ? kernel.zmax() : options.max_var_level;
	env.lterms = leaf_vector(r, kernel.zmax(), var_level);
	env.dterms = dilaton_leaf_vector(r, kernel.zmax());
	env.build_support(n);

	// an element with no kernel support can make no edges, and no dilaton
	// terms means no dilaton leaves; restricting upfront keeps the
	// enumeration small
	GraphCaps ecaps = gcaps;
	if (env.kernel_support.empty()) {
		ecaps.max_edges = 0;
		ecaps.max_vertices = 1;
		ecaps.max_genus = std::min(ecaps.max_genus, table.caps().max_genus);
	}
	if (env.dterms.empty())
		ecaps.max_dilaton_leaves = 0;
	auto classes = enumerate_typed(ecaps, table.caps().max_genus, target.genus_cap,
	                               target.degree_cap);

	// table caps must cover every remaining vertex
	for (const auto &t : classes)
		for (int v = 0; v < (int)t.attr.size(); ++v)
			if (t.valence(v) > table.caps().max_insertions)
				throw cap_error("graph_sum: vertex valence exceeds the table insertion cap");

	std::vector<TruncatedSeries> parts(classes.size(), TruncatedSeries(env.caps));
	auto work = [&](size_t i, ContractEnv &e) {
		auto c = contract_typed(classes[i], e);
		parts[i] = scale(c, Rational(1) / Rational(typed_aut(classes[i])));
	};
	int threads = options.threads;
	if (threads <= 1 || classes.size() < 2) {
		// the leaf-closure memo is shared across classes
		for (size_t i = 0; i < classes.size(); ++i)
			work(i, env);
	} else {
		std::atomic<size_t> next{0};
		std::vector<std::thread> pool;
		for (int t = 0; t < threads; ++t)
			pool.emplace_back([&] {
				ContractEnv local = env; // private memo per thread
				for (size_t i = next++; i < classes.size(); i = next++)
					work(i, local);
			});
		for (auto &th : pool)
			th.join();
	}
	TruncatedSeries total(env.caps);
	for (const auto &p : parts)
		total = add(total, p);
	return total.restricted(target);
}

std::vector<EmittedGraph> enumerate_contributions(const CorrelatorTable &table, const RMatrix &r,
                                                  const Monomial &monomial, SeriesCaps caps)
{
	const int n = table.dimension();
	const int g_total = monomial.hbar_power() + 1;
	if (g_total < 0)
		throw std::invalid_argument("enumerate_contributions: bad hbar exponent");

	GraphCaps gcaps = derive_graph_caps(caps);
	EdgeKernel kernel(r, gcaps.max_zpow);
	auto lterms = leaf_vector(r, kernel.zmax(), kernel.zmax());
	auto dterms = dilaton_leaf_vector(r, kernel.zmax());

	// leaf variables to place, from the target monomial
	std::vector<VariableId> vars;
	for (const auto &[v, p] : monomial.factors())
		for (int i = 0; i < p; ++i)
			vars.push_back(v);
	const int kl_total = (int)vars.size();

	// edge slots: structural (i,j) pairs and everything with a nonzero
	// kernel coefficient
	std::vector<std::array<int, 4>> edge_slots;
	for (int i = 0; i <= kernel.zmax(); ++i)
		for (int j = 0; i + j <= kernel.zmax(); ++j)
			for (int a = 1; a <= n; ++a)
				for (int b = 1; b <= n; ++b)
					if (kernel.structural_pair(i, j) || !(kernel.coeff(a, i, b, j) == 0))
						edge_slots.push_back({a, i, b, j});

	std::set<std::vector<int>> seen;
	std::vector<EmittedGraph> out;

	// enumerate typed shells matching kl_total, then expand decorations
	GraphCaps shell = gcaps;
	shell.max_genus = std::min(shell.max_genus, g_total);
	auto classes = enumerate_typed(shell, table.caps().max_genus, caps.genus_cap,
	                               caps.degree_cap);
	for (const auto &t : classes) {
		int kl = 0;
		for (const auto &a : t.attr)
			kl += a.kl;
		if (kl != kl_total || t.total_genus() != g_total)
			continue;
		const int nv = (int)t.attr.size();

		// distribute the variable multiset over the vertices and expand
		// every decoration choice
		DecoratedGraph dg;
		dg.genus.resize(nv);
		for (int v = 0; v < nv; ++v)
			dg.genus[v] = t.attr[v].g;
		dg.leaves.assign(nv, {});

		std::function<void(size_t)> fill_edges;
		std::vector<std::pair<int, int>> edge_list = t.edges;

		auto vertex_zbudget_ok = [&](const DecoratedGraph &cand) {
			for (int v = 0; v < nv; ++v) {
				int val = (int)cand.leaves[v].size();
				int z = 0;
				for (const auto &l : cand.leaves[v])
					z += l.zpow;
				for (const auto &e : cand.edges) {
					if (e.u == v) {
						++val;
						z += e.at_u.zpow;
					}
					if (e.v == v) {
						++val;
						z += e.at_v.zpow;
					}
				}
				if (z > z_budget(cand.genus[v], val))
					return false;
			}
			return true;
		};

		auto all_primary_nonzero = [&](const DecoratedGraph &cand) {
			// a vertex with no psi-classes anywhere must carry a nonzero
			// primary tensor; psi-vertices are kept for the list
			for (int v = 0; v < nv; ++v) {
				bool has_psi = false;
				InsertionList ins;
				for (const auto &l : cand.leaves[v]) {
					has_psi |= l.zpow > 0;
					ins.push_back(Insertion{l.zpow, l.basis});
				}
				for (const auto &e : cand.edges) {
					if (e.u == v) {
						has_psi |= e.at_u.zpow > 0;
						ins.push_back(Insertion{e.at_u.zpow, e.at_u.basis});
					}
					if (e.v == v) {
						has_psi |= e.at_v.zpow > 0;
						ins.push_back(Insertion{e.at_v.zpow, e.at_v.basis});
					}
				}
				if (!has_psi && table.lookup(cand.genus[v], ins) == 0)
					return false;
			}
			return true;
		};

		std::function<void()> emit = [&] {
			if (!vertex_zbudget_ok(dg) || !all_primary_nonzero(dg))
				return;
			DecoratedGraph norm = dg;
			for (auto &ls : norm.leaves)
				std::sort(ls.begin(), ls.end());
			auto canon = norm.canonical_form();
			if (!seen.insert(std::move(canon)).second)
				return;
			EmittedGraph eg{norm, automorphism_order(norm),
			                contract_graph(norm, table, r, caps)};
			out.push_back(std::move(eg));
		};

		fill_edges = [&](size_t ei) {
			if (ei == edge_list.size()) {
				emit();
				return;
			}
			auto [u, v] = edge_list[ei];
			for (const auto &[a, i, b, j] : edge_slots) {
				dg.edges.push_back(DecoratedEdge{u, v, EndDecor{a, i}, EndDecor{b, j}});
				fill_edges(ei + 1);
				dg.edges.pop_back();
			}
		};

		// assign each variable (in order) to a vertex with free leaf room
		// and an expansion term
		std::vector<int> room(nv);
		for (int v = 0; v < nv; ++v)
			room[v] = t.attr[v].kl;
		std::function<void(size_t)> place = [&](size_t vi) {
			if (vi == vars.size()) {
				// dilaton leaves
				std::function<void(int)> dil = [&](int v) {
					if (v == nv) {
						fill_edges(0);
						return;
					}
					std::function<void(int, size_t)> pick = [&](int left, size_t di) {
						if (left == 0) {
							dil(v + 1);
							return;
						}
						for (size_t k = di; k < dterms.size(); ++k) {
							dg.leaves[v].push_back(LeafDecor{true, dterms[k].basis,
							                                 dterms[k].zpow, -1, 0});
							pick(left - 1, k);
							dg.leaves[v].pop_back();
						}
					};
					pick(t.attr[v].kl0, 0);
				};
				dil(0);
				return;
			}
			for (int v = 0; v < nv; ++v) {
				if (!room[v])
					continue;
				--room[v];
				for (const auto &term : lterms) {
					if (!(term.var == vars[vi]))
						continue;
					dg.leaves[v].push_back(
					    LeafDecor{false, term.basis, term.zpow, term.var.d, term.var.mu});
					place(vi + 1);
					dg.leaves[v].pop_back();
				}
				++room[v];
			}
		};
		place(0);
	}

	std::sort(out.begin(), out.end(), [](const EmittedGraph &a, const EmittedGraph &b) {
		return a.graph.canonical_form() < b.graph.canonical_form();
	});
	return out;
}

} // namespace givental
