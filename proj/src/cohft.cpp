#include "givental/cohft.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <mutex>

namespace givental {

InsertionList sorted(InsertionList ins)
{
	std::sort(ins.begin(), ins.end());
	return ins;
}

int total_level(const InsertionList &ins)
{
	int d = 0;
	for (const auto &i : ins)
		d += i.d;
	return d;
}

Integer aut_order(const InsertionList &ins)
{
	Integer a = 1;
	int run = 1;
	for (size_t i = 1; i < ins.size(); ++i) {
		if (ins[i] == ins[i - 1])
			a *= ++run;
		else
			run = 1;
	}
	return a;
}

namespace {

Monomial insertions_to_monomial(const InsertionList &ins, int hbar)
{
	Monomial m(hbar);
	for (const auto &i : ins)
		m = m.times_var(VariableId{i.d, i.mu}, 1);
	return m;
}

InsertionList monomial_to_insertions(const Monomial &m)
{
	InsertionList ins;
	for (const auto &[v, p] : m.factors())
		for (int i = 0; i < p; ++i)
			ins.push_back(Insertion{v.d, v.mu});
	return ins;
}

} // namespace

FrobeniusPotential::FrobeniusPotential(int dimension, TruncatedSeries potential)
    : n_(dimension), F_(std::move(potential))
{
	if (n_ < 2)
		throw std::invalid_argument("FrobeniusPotential: dimension must be >= 2");
	if (F_.caps().dimension != n_)
		throw std::invalid_argument("FrobeniusPotential: caps dimension mismatch");
	for (const auto &[m, c] : F_.terms()) {
		if (m.hbar_power() != 0)
			throw std::invalid_argument("FrobeniusPotential: hbar must not appear");
		if (m.weighted_degree() != 0)
			throw std::invalid_argument("FrobeniusPotential: descendant variables must not appear");
		if (m.degree() <= 2)
			throw std::invalid_argument("FrobeniusPotential: terms of order <= 2 must be absent");
		if (m.power_of(VariableId{0, 1}) > 0) {
			// t^1 may only enter through the fixed eta-cubic.
			Rational expected = 0;
			if (m.degree() == 3) {
				InsertionList ins = monomial_to_insertions(m);
				expected = eta(ins[1].mu, ins[2].mu, n_) / Rational(aut_order(ins));
			}
			if (!(c == expected))
				throw std::invalid_argument(
				    "FrobeniusPotential: t^1-monomial deviates from the eta-cubic form");
		}
	}
	// The eta-cubic itself must be present in full.
	auto cubic = eta_cubic(n_, F_.caps());
	for (const auto &[m, c] : cubic.terms())
		if (!(F_.coefficient_or_zero(m) == c))
			throw std::invalid_argument("FrobeniusPotential: eta-cubic part incomplete");
}

Rational FrobeniusPotential::primary_correlator(const InsertionList &primaries) const
{
	InsertionList ins = sorted(primaries);
	for (const auto &i : ins)
		if (i.d != 0)
			throw std::invalid_argument("primary_correlator: descendant insertion");
	Monomial m = insertions_to_monomial(ins, 0);
	if (m.degree() > F_.caps().degree_cap)
		throw cap_error("primary_correlator: beyond the stored jet order");
	return F_.coefficient_or_zero(m) * Rational(aut_order(ins));
}

TruncatedSeries FrobeniusPotential::eta_cubic(int n, SeriesCaps caps)
{
	TruncatedSeries f(caps);
	// (1/2) t^1 sum_g t^g t^{n+1-g}  -  (1/2) (t^1)^2 t^n
	for (int g = 1; g <= n; ++g) {
		Monomial m = Monomial(VariableId{0, 1}, 1)
		                 .times_var(VariableId{0, g}, 1)
		                 .times_var(VariableId{0, eta_dual(g, n)}, 1);
		f = add(f, TruncatedSeries::monomial(caps, m, Rational(1, 2)));
	}
	Monomial sq = Monomial(VariableId{0, 1}, 2).times_var(VariableId{0, n}, 1);
	f = add(f, TruncatedSeries::monomial(caps, sq, Rational(-1, 2)));
	return f;
}

FrobeniusPotential FrobeniusPotential::from_h_jet(int n, const TruncatedSeries &h_jet)
{
	for (const auto &[m, c] : h_jet.terms())
		if (m.power_of(VariableId{0, 1}) > 0)
			throw std::invalid_argument("from_h_jet: H must not involve t^1");
	return FrobeniusPotential(n, add(eta_cubic(n, h_jet.caps()), h_jet));
}

namespace detail {

// Memoized genus-0 topological recursion. Canonical evaluation order: the
// pivot is the maximal insertion (sorted order puts the highest descendant
// level last) and the companions are the two minimal remaining ones.
class TrrEvaluator {
public:
	TrrEvaluator(FrobeniusPotential F, TableCaps caps) : F_(std::move(F)), caps_(caps) {}

	Rational value(const InsertionList &ins) const
	{
		if (ins.size() < 3)
			return 0;
		if (total_level(ins) == 0)
			return F_.primary_correlator(ins);
		{
			std::lock_guard<std::mutex> lock(mu_);
			auto it = memo_.find(ins);
			if (it != memo_.end())
				return it->second;
		}
		Rational v = compute(ins);
		std::lock_guard<std::mutex> lock(mu_);
		memo_.emplace(ins, v);
		return v;
	}

	std::map<InsertionList, Rational> snapshot() const
	{
		std::lock_guard<std::mutex> lock(mu_);
		return memo_;
	}

private:
	FrobeniusPotential F_;
	TableCaps caps_;
	mutable std::map<InsertionList, Rational> memo_;
	mutable std::mutex mu_;

	Rational compute(const InsertionList &ins) const
	{
		const int n = F_.dimension();
		// ins is sorted; the pivot sits at the back.
		Insertion pivot = ins.back();
		InsertionList rest(ins.begin(), ins.end() - 1);
		Insertion c2 = rest[0], c3 = rest[1];

		// Distinct remaining elements with multiplicities, for weighted splits.
		std::vector<std::pair<Insertion, int>> kinds;
		for (size_t i = 2; i < rest.size(); ++i) {
			if (!kinds.empty() && kinds.back().first == rest[i])
				++kinds.back().second;
			else
				kinds.emplace_back(rest[i], 1);
		}

		Rational total = 0;
		std::vector<int> take(kinds.size(), 0);
		for (;;) {
			Integer ways = 1;
			for (size_t i = 0; i < kinds.size(); ++i)
				ways *= binomial(kinds[i].second, take[i]);
			InsertionList left{Insertion{pivot.d - 1, pivot.mu}};
			InsertionList right{c2, c3};
			for (size_t i = 0; i < kinds.size(); ++i) {
				left.insert(left.end(), take[i], kinds[i].first);
				right.insert(right.end(), kinds[i].second - take[i], kinds[i].first);
			}
			Rational contracted = 0;
			for (int lam = 1; lam <= n; ++lam) {
				InsertionList l = left, r = right;
				l.push_back(Insertion{0, lam});
				r.push_back(Insertion{0, eta_dual(lam, n)});
				Rational lv = value(sorted(std::move(l)));
				if (lv == 0)
					continue;
				contracted += lv * value(sorted(std::move(r)));
			}
			total += Rational(ways) * contracted;

			size_t k = 0;
			while (k < take.size() && take[k] == kinds[k].second)
				take[k++] = 0;
			if (k == take.size())
				break;
			++take[k];
		}
		return total;
	}
};

} // namespace detail

CorrelatorTable::CorrelatorTable(int dimension, TableCaps caps) : n_(dimension), caps_(caps)
{
	if (n_ < 1 || caps.max_genus < 0 || caps.max_insertions < 0 || caps.max_total_level < 0)
		throw std::invalid_argument("CorrelatorTable: invalid dimension or caps");
}

void CorrelatorTable::check_key(int genus, const InsertionList &ins) const
{
	if (genus < 0)
		throw std::invalid_argument("correlator genus must be >= 0");
	for (const auto &i : ins)
		if (i.d < 0 || i.mu < 1 || i.mu > n_)
			throw std::invalid_argument("correlator insertion out of range");
	if (genus > caps_.max_genus || (int)ins.size() > caps_.max_insertions ||
	    total_level(ins) > caps_.max_total_level)
		throw cap_error("correlator request outside table caps");
}

void CorrelatorTable::set(int genus, InsertionList ins, const Rational &value)
{
	ins = sorted(std::move(ins));
	check_key(genus, ins);
	if (genus == 0 && ins.size() < 3)
		throw std::invalid_argument("genus-0 correlators need >= 3 insertions");
	if (value == 0)
		entries_.erase({genus, ins});
	else
		entries_[{genus, std::move(ins)}] = value;
}

Rational CorrelatorTable::lookup(int genus, const InsertionList &ins) const
{
	InsertionList key = sorted(ins);
	check_key(genus, key);
	if (genus == 0 && key.size() < 3)
		return 0;
	auto it = entries_.find({genus, key});
	if (it != entries_.end())
		return it->second;
	if (genus == 0 && eval_)
		return eval_->value(key);
	return 0;
}

namespace {

// All sorted insertion multisets with size <= max_k, total level <= max_d.
void enumerate_keys(int n, int max_k, int max_d, Insertion from, InsertionList &cur,
                    const std::function<void(const InsertionList &)> &fn)
{
	fn(cur);
	if ((int)cur.size() == max_k)
		return;
	for (int d = from.d; d <= max_d - total_level(cur); ++d)
		for (int mu = (d == from.d ? from.mu : 1); mu <= n; ++mu) {
			cur.push_back(Insertion{d, mu});
			enumerate_keys(n, max_k, max_d, Insertion{d, mu}, cur, fn);
			cur.pop_back();
		}
}

} // namespace

std::map<CorrelatorTable::Key, Rational> CorrelatorTable::entries() const
{
	std::map<Key, Rational> out = entries_;
	if (eval_)
		for (const auto &[ins, v] : eval_->snapshot())
			if (!(v == 0))
				out.emplace(Key{0, ins}, v);
	std::erase_if(out, [](const auto &kv) { return kv.second == 0; });
	return out;
}

void CorrelatorTable::materialize()
{
	if (!eval_)
		return;
	InsertionList cur;
	enumerate_keys(n_, caps_.max_insertions, caps_.max_total_level, Insertion{0, 1}, cur,
	               [&](const InsertionList &ins) {
		               if (ins.size() >= 3 && total_level(ins) > 0)
			               eval_->value(ins);
	               });
}

std::map<int, Rational> vertex_tensor(const CorrelatorTable &table, const InsertionList &ins)
{
	std::map<int, Rational> out;
	for (int g = 0; g <= table.caps().max_genus; ++g) {
		Rational v = table.lookup(g, ins);
		if (!(v == 0))
			out[g] = v;
	}
	return out;
}

std::pair<Rational, InsertionList> dilaton_reduce(int genus, const InsertionList &ins)
{
	InsertionList key = sorted(ins);
	auto it = std::find(key.begin(), key.end(), Insertion{1, 1});
	if (it == key.end())
		throw std::invalid_argument("dilaton_reduce: no tau_1(e_1) insertion");
	key.erase(it);
	int k = (int)key.size();
	return {Rational(2 * genus - 2 + k), key};
}

CorrelatorTable reconstruct_descendants(const FrobeniusPotential &F, TableCaps caps)
{
	if (caps.max_genus != 0)
		throw std::invalid_argument("reconstruct_descendants: only genus 0 is derivable");
	// A lookup whose recursion would need Taylor coefficients beyond the
	// stored jet fails with cap_error at evaluation time, never silently.
	CorrelatorTable t(F.dimension(), caps);
	t.eval_ = std::make_shared<detail::TrrEvaluator>(F, caps);
	return t;
}

TruncatedSeries table_to_free_energy(const CorrelatorTable &table, SeriesCaps caps)
{
	return table_to_free_energy_pruned(table, caps,
	                                   std::max(0, 3 * (caps.genus_cap - 1) + caps.degree_cap));
}

TruncatedSeries table_to_free_energy_pruned(const CorrelatorTable &table, SeriesCaps caps,
                                            int slack_max)
{
	if (caps.dimension != table.dimension())
		throw std::invalid_argument("table_to_free_energy: dimension mismatch");
	TruncatedSeries f(caps);
	const int level_cap = table.caps().max_total_level;
	for (int g = 0; g <= table.caps().max_genus; ++g) {
		if (!caps.admits(g == 0 ? 3 : 0, g - 1))
			continue;
		// slack = 3g - 3 + k - sum(d) <= slack_max caps k once the level
		// budget is exhausted
		const int max_k = std::min({caps.degree_cap, table.caps().max_insertions,
		                            slack_max + level_cap + 3 - 3 * g});
		if (max_k < 0)
			continue;
		InsertionList cur;
		enumerate_keys(table.dimension(), max_k, level_cap, Insertion{0, 1}, cur,
		               [&](const InsertionList &ins) {
			               if (g == 0 && ins.size() < 3)
				               return;
			               if (3 * g - 3 + (int)ins.size() - total_level(ins) > slack_max)
				               return;
			               Rational v = table.lookup(g, ins);
			               if (v == 0)
				               return;
			               f = add(f, TruncatedSeries::monomial(
			                              caps, insertions_to_monomial(ins, g - 1),
			                              v / Rational(aut_order(ins))));
		               });
	}
	return f;
}

TruncatedSeries table_to_partition_function(const CorrelatorTable &table, SeriesCaps caps)
{
	return exp_series(table_to_free_energy(table, caps));
}

CorrelatorTable partition_function_to_table(const TruncatedSeries &Z, TableCaps caps)
{
	CorrelatorTable t(Z.caps().dimension, caps);
	TruncatedSeries f = log_series(Z);
	for (const auto &[m, c] : f.terms()) {
		int g = m.hbar_power() + 1;
		InsertionList ins = monomial_to_insertions(m);
		if (g < 0 || g > caps.max_genus || (int)ins.size() > caps.max_insertions ||
		    total_level(ins) > caps.max_total_level)
			throw cap_error("partition_function_to_table: term outside table caps");
		t.set(g, ins, c * Rational(aut_order(ins)));
	}
	return t;
}

bool wdvv_holds(const FrobeniusPotential &F)
{
	const int n = F.dimension();
	const TruncatedSeries &f = F.potential();
	std::map<std::array<int, 3>, TruncatedSeries> cache;
	auto third = [&](int a, int b, int c) -> const TruncatedSeries & {
		std::array<int, 3> k{a, b, c};
		std::sort(k.begin(), k.end());
		auto it = cache.find(k);
		if (it == cache.end())
			it = cache
			         .emplace(k, partial(partial(partial(f, VariableId{0, k[0]}),
			                                     VariableId{0, k[1]}),
			                             VariableId{0, k[2]}))
			         .first;
		return it->second;
	};
	for (int a = 1; a <= n; ++a)
		for (int b = 1; b <= n; ++b)
			for (int c = b + 1; c <= n; ++c)
				for (int e = 1; e <= n; ++e) {
					TruncatedSeries lhs(f.caps()), rhs(f.caps());
					for (int lam = 1; lam <= n; ++lam) {
						lhs = add(lhs, mul(third(a, b, lam), third(eta_dual(lam, n), c, e)));
						rhs = add(rhs, mul(third(a, c, lam), third(eta_dual(lam, n), b, e)));
					}
					auto diff = sub(lhs, rhs);
					for (const auto &[m, co] : diff.terms())
						if (m.degree() <= diff.watermark())
							return false;
				}
	return true;
}

} // namespace givental
