#pragma once

#include <map>
#include <memory>
#include <vector>

#include "givental/series.hpp"

namespace givental {

// One insertion tau_d(e_mu).
struct Insertion {
	int d = 0;
	int mu = 1;

	friend auto operator<=>(const Insertion &, const Insertion &) = default;
};

// Insertion multisets are carried as sorted vectors throughout.
using InsertionList = std::vector<Insertion>;

InsertionList sorted(InsertionList ins);
int total_level(const InsertionList &ins);
// |Aut| of the multiset: product of multiplicity factorials.
Integer aut_order(const InsertionList &ins);

// The metric is fixed anti-diagonal in flat coordinates: eta_{ab} =
// delta_{a+b,n+1}, its own inverse. Single source of truth for index
// raising and the eta-pairing a -> n+1-a.
inline int eta_dual(int a, int n) { return n + 1 - a; }
inline Rational eta(int a, int b, int n) { return a + b == n + 1 ? 1 : 0; }

// Genus-0 descendant-free potential in displacement coordinates at the
// expansion point (0,...,0,1): the fixed eta-cubic plus a jet
// H(t^2,...,t^n) of order >= 3. Terms of order <= 2 are absent by
// normalization.
class FrobeniusPotential {
public:
	FrobeniusPotential(int dimension, TruncatedSeries potential);

	int dimension() const { return n_; }
	int jet_order() const { return F_.caps().degree_cap; }
	const TruncatedSeries &potential() const { return F_; }

	// <tau_0(mu_1)...tau_0(mu_k)>_0 = the corresponding Taylor coefficient.
	Rational primary_correlator(const InsertionList &primaries) const;

	// The fixed cubic (1/2) t^1 t_sigma t^sigma - (1/2) (t^1)^2 t^n.
	static TruncatedSeries eta_cubic(int dimension, SeriesCaps caps);
	// eta_cubic plus a jet in t^2..t^n (no t^1, order >= 3 enforced).
	static FrobeniusPotential from_h_jet(int dimension, const TruncatedSeries &h_jet);

private:
	int n_;
	TruncatedSeries F_;
};

struct TableCaps {
	int max_genus = 0;
	int max_insertions = 0;
	int max_total_level = 0;

	friend bool operator==(const TableCaps &, const TableCaps &) = default;
};

namespace detail {
class TrrEvaluator;
}

// Correlator values keyed by (genus, sorted insertion multiset). Entries
// may be stored explicitly (user input, higher genus) or served by the
// memoized genus-0 topological-recursion evaluator attached by
// reconstruct_descendants. Lookups outside the caps throw cap_error;
// absent entries inside the caps are 0. Genus-0 entries with fewer than
// three insertions are identically 0 by normalization.
class CorrelatorTable {
public:
	using Key = std::pair<int, InsertionList>;

	CorrelatorTable(int dimension, TableCaps caps);

	int dimension() const { return n_; }
	const TableCaps &caps() const { return caps_; }

	void set(int genus, InsertionList ins, const Rational &value);
	Rational lookup(int genus, const InsertionList &ins) const;

	// Explicitly stored or memoized entries; call materialize() first when
	// a full sweep of the capped range is wanted.
	std::map<Key, Rational> entries() const;
	void materialize();

	bool has_evaluator() const { return eval_ != nullptr; }

	friend CorrelatorTable reconstruct_descendants(const FrobeniusPotential &F, TableCaps caps);

private:
	int n_;
	TableCaps caps_;
	std::map<Key, Rational> entries_;
	std::shared_ptr<detail::TrrEvaluator> eval_;

	void check_key(int genus, const InsertionList &ins) const;
};

// <tau_{d_1}(e_{mu_1}) ... >_g for each genus within the table caps:
// the vertex tensor V[n] graded by hbar^{g-1}.
std::map<int, Rational> vertex_tensor(const CorrelatorTable &table, const InsertionList &ins);

// Removes one tau_1(e_1) insertion: <tau_1(1) X>_g = (2g-2+k) <X>_g with
// k = |X|. Returns the factor and the reduced multiset.
std::pair<Rational, InsertionList> dilaton_reduce(int genus, const InsertionList &ins);

// Genus-0 table whose all-primary part is the Taylor expansion of F and
// whose descendant part closes the genus-0 topological recursion
//   <t_{d1}(a1) t_{d2}(a2) t_{d3}(a3) D>_0 =
//     sum <t_{d1-1}(a1) t_0(l) D'>_0 eta^{ls} <t_0(s) t_{d2}(a2) t_{d3}(a3) D''>_0
// evaluated lazily with memoization; each application lowers the total
// descendant level, so the recursion terminates within the caps.
CorrelatorTable reconstruct_descendants(const FrobeniusPotential &F, TableCaps caps);

// F_g = sum <...>_g / |Aut| t^{d_1,a_1}...; returns sum_g hbar^{g-1} F_g.
TruncatedSeries table_to_free_energy(const CorrelatorTable &table, SeriesCaps caps);
// Same, enumerating only keys with slack 3g - 3 + k - sum(d) <= slack_max;
// terms above the caps-derived slack are unrepresentable anyway, so the
// two-argument form uses that bound.
TruncatedSeries table_to_free_energy_pruned(const CorrelatorTable &table, SeriesCaps caps,
                                            int slack_max);
// Z = exp(sum hbar^{g-1} F_g).
TruncatedSeries table_to_partition_function(const CorrelatorTable &table, SeriesCaps caps);
// Inverse of table_to_partition_function; exact round trip within caps.
CorrelatorTable partition_function_to_table(const TruncatedSeries &Z, TableCaps caps);

// WDVV associativity of F at truncation order: for all (a,b,c,e),
// sum_l F_{abl} eta^{ls} F_{sce} is symmetric under b <-> c as a series
// identity up to the reliable order.
bool wdvv_holds(const FrobeniusPotential &F);

} // namespace givental
