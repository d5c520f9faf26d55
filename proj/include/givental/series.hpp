#pragma once

#include <compare>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "givental/rational.hpp"

namespace givental {

// Formal variable t^{d,mu}: descendant level d >= 0, primary index 1..n.
// The weight of t^{d,mu} is d; hbar is tracked on the monomial directly.
struct VariableId {
	int d = 0;
	int mu = 1;

	friend auto operator<=>(const VariableId &, const VariableId &) = default;
};

// A monomial hbar^e * prod t^{d_i,mu_i}^{p_i} with sorted factors and
// strictly positive powers. The hbar exponent may be negative (hbar^{g-1}
// with g = 0 gives e = -1).
class Monomial {
public:
	Monomial() = default;
	explicit Monomial(int hbar_power) : hbar_(hbar_power) {}
	Monomial(VariableId v, int power);

	static Monomial one() { return Monomial(); }

	const std::vector<std::pair<VariableId, int>> &factors() const { return factors_; }
	int hbar_power() const { return hbar_; }
	bool is_one() const { return factors_.empty() && hbar_ == 0; }
	bool is_constant() const { return factors_.empty(); }

	// Total power of the t-variables.
	int degree() const;
	// Sum of d_i * p_i; the tameness bound is phrased in this grading.
	int weighted_degree() const;
	int power_of(VariableId v) const;

	Monomial times(const Monomial &other) const;
	Monomial times_var(VariableId v, int power) const;
	Monomial times_hbar(int e) const;
	// Removes one power of v; v must be present.
	Monomial divide_var(VariableId v) const;

	friend bool operator==(const Monomial &, const Monomial &) = default;
	friend std::strong_ordering operator<=>(const Monomial &a, const Monomial &b);

private:
	std::vector<std::pair<VariableId, int>> factors_;
	int hbar_ = 0;
};

// Truncation data: dimension n of the underlying Frobenius structure,
// maximum retained total t-power, and maximum retained genus.
//
// A monomial hbar^e of t-degree k is kept iff
//     k <= degree_cap   and   3*(e - (genus_cap - 1)) <= degree_cap - k.
// The second condition is the genus cut with degree headroom: a partner
// monomial can lower the hbar exponent only by carrying three t-powers per
// unit (every hbar^{-1} in a partition function rides on a genus-0
// correlator with >= 3 insertions), so the discarded set is an ideal and
// ring laws hold exactly on the retained range. At full degree k =
// degree_cap the cut reduces to the plain bound e <= genus_cap - 1.
struct SeriesCaps {
	int dimension = 1;
	int degree_cap = 0;
	int genus_cap = 0;

	int hbar_cap() const { return genus_cap - 1; }
	bool admits(int t_degree, int hbar_power) const
	{
		return t_degree <= degree_cap &&
		       3 * (hbar_power - (genus_cap - 1)) <= degree_cap - t_degree;
	}
	SeriesCaps meet(const SeriesCaps &other) const;

	friend bool operator==(const SeriesCaps &, const SeriesCaps &) = default;
};

// Multivariate formal power series in t^{d,mu} and hbar over Q, truncated
// by total t-power and by genus. Immutable value type; all operations are
// pure and exact on the retained range.
//
// A "reliable degree" watermark travels with each series: differentiation
// lowers it, and coefficient() refuses to read above it, so truncation
// error is never silently observed.
class TruncatedSeries {
public:
	explicit TruncatedSeries(SeriesCaps caps);

	static TruncatedSeries zero(SeriesCaps caps) { return TruncatedSeries(caps); }
	static TruncatedSeries constant(SeriesCaps caps, const Rational &c);
	static TruncatedSeries variable(SeriesCaps caps, VariableId v);
	static TruncatedSeries monomial(SeriesCaps caps, const Monomial &m, const Rational &c);

	const SeriesCaps &caps() const { return caps_; }
	int watermark() const { return watermark_; }
	const std::map<Monomial, Rational> &terms() const { return terms_; }
	bool is_zero() const { return terms_.empty(); }
	// Smallest total t-power among stored terms; degree_cap + 1 for zero.
	int min_degree() const;
	int min_hbar() const;

	// Stored coefficient, or 0. Throws if m lies outside caps or above the
	// watermark -- the caller would be reading truncation garbage.
	Rational coefficient(const Monomial &m) const;
	// Unchecked lookup used where staleness is impossible by construction.
	Rational coefficient_or_zero(const Monomial &m) const;

	TruncatedSeries restricted(SeriesCaps caps) const;
	TruncatedSeries with_watermark(int w) const;

	friend bool operator==(const TruncatedSeries &a, const TruncatedSeries &b)
	{
		return a.caps_ == b.caps_ && a.terms_ == b.terms_;
	}

private:
	SeriesCaps caps_;
	int watermark_;
	std::map<Monomial, Rational> terms_;

	void insert(const Monomial &m, const Rational &c);

	friend TruncatedSeries add(const TruncatedSeries &, const TruncatedSeries &);
	friend TruncatedSeries sub(const TruncatedSeries &, const TruncatedSeries &);
	friend TruncatedSeries mul(const TruncatedSeries &, const TruncatedSeries &);
	friend TruncatedSeries neg(const TruncatedSeries &);
	friend TruncatedSeries scale(const TruncatedSeries &, const Rational &);
	friend TruncatedSeries mul_monomial(const TruncatedSeries &, const Monomial &, const Rational &);
	friend TruncatedSeries partial(const TruncatedSeries &, VariableId);
	friend TruncatedSeries prune_slack(const TruncatedSeries &, int);
};

TruncatedSeries add(const TruncatedSeries &a, const TruncatedSeries &b);
TruncatedSeries sub(const TruncatedSeries &a, const TruncatedSeries &b);
TruncatedSeries mul(const TruncatedSeries &a, const TruncatedSeries &b);
TruncatedSeries neg(const TruncatedSeries &a);
TruncatedSeries scale(const TruncatedSeries &a, const Rational &c);
TruncatedSeries mul_monomial(const TruncatedSeries &a, const Monomial &m, const Rational &c);

inline TruncatedSeries operator+(const TruncatedSeries &a, const TruncatedSeries &b) { return add(a, b); }
inline TruncatedSeries operator-(const TruncatedSeries &a, const TruncatedSeries &b) { return sub(a, b); }
inline TruncatedSeries operator*(const TruncatedSeries &a, const TruncatedSeries &b) { return mul(a, b); }
inline TruncatedSeries operator-(const TruncatedSeries &a) { return neg(a); }
inline TruncatedSeries operator*(const TruncatedSeries &a, const Rational &c) { return scale(a, c); }
inline TruncatedSeries operator*(const Rational &c, const TruncatedSeries &a) { return scale(a, c); }

// exp(a) = sum a^k / k!. Requires that a has no constant term with
// hbar-exponent <= 0 (such a term would exponentiate to a transcendental
// constant, or fail to terminate under the caps).
TruncatedSeries exp_series(const TruncatedSeries &a);

// Inverse of exp_series; requires constant term exactly 1.
TruncatedSeries log_series(const TruncatedSeries &a);

// Multiplicative inverse; requires constant term exactly 1.
TruncatedSeries inverse_series(const TruncatedSeries &a);

// Formal partial derivative with respect to a t-variable. The watermark of
// the result drops by one.
TruncatedSeries partial(const TruncatedSeries &a, VariableId v);

// Tameness of a log-partition-function: every stored monomial
// hbar^{g-1} t^{d_1,mu_1} ... t^{d_k,mu_k} satisfies
// sum d_i <= 3g - 3 + k, i.e. weighted degree <= 3*hbar + degree.
bool is_tame(const TruncatedSeries &a);

// Drops every term whose slack 3*hbar + degree - weighted_degree exceeds
// slack_max. The Givental operators raise the slack of every term by at
// least one per application, so terms above the target slack can never
// re-enter the requested caps; this keeps intermediate series small.
TruncatedSeries prune_slack(const TruncatedSeries &a, int slack_max);

// Substitutes series for variables in a polynomial-like series. Every
// variable occurring in a must have an entry in args; hbar passes through.
TruncatedSeries substitute(const TruncatedSeries &a,
                           const std::map<VariableId, TruncatedSeries> &args,
                           SeriesCaps out_caps);

// Line-oriented canonical text form, one term per line:
//   p/q * hbar^e * t[d,mu]^k * ...
// Terms in canonical monomial order; byte-stable for golden files.
std::string series_to_text(const TruncatedSeries &a);
std::string monomial_to_text(const Monomial &m);
Monomial parse_monomial(std::string_view s);
TruncatedSeries parse_series(std::string_view text, SeriesCaps caps);

} // namespace givental
