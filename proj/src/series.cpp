#include "givental/series.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

namespace givental {

Monomial::Monomial(VariableId v, int power)
{
	if (power < 0)
		throw std::invalid_argument("monomial power must be >= 0");
	if (power > 0)
		factors_.emplace_back(v, power);
}

int Monomial::degree() const
{
	int d = 0;
	for (const auto &[v, p] : factors_)
		d += p;
	return d;
}

int Monomial::weighted_degree() const
{
	int d = 0;
	for (const auto &[v, p] : factors_)
		d += v.d * p;
	return d;
}

int Monomial::power_of(VariableId v) const
{
	for (const auto &[w, p] : factors_)
		if (w == v)
			return p;
	return 0;
}

Monomial Monomial::times(const Monomial &other) const
{
	Monomial r;
	r.hbar_ = hbar_ + other.hbar_;
	r.factors_.reserve(factors_.size() + other.factors_.size());
	auto i = factors_.begin(), j = other.factors_.begin();
	while (i != factors_.end() && j != other.factors_.end()) {
		if (i->first < j->first)
			r.factors_.push_back(*i++);
		else if (j->first < i->first)
			r.factors_.push_back(*j++);
		else {
			r.factors_.emplace_back(i->first, i->second + j->second);
			++i, ++j;
		}
	}
	r.factors_.insert(r.factors_.end(), i, factors_.end());
	r.factors_.insert(r.factors_.end(), j, other.factors_.end());
	return r;
}

Monomial Monomial::times_var(VariableId v, int power) const
{
	if (power == 0)
		return *this;
	Monomial r = *this;
	auto it = std::lower_bound(r.factors_.begin(), r.factors_.end(), v,
	                           [](const auto &f, const VariableId &w) { return f.first < w; });
	if (it != r.factors_.end() && it->first == v)
		it->second += power;
	else
		r.factors_.insert(it, {v, power});
	return r;
}

Monomial Monomial::times_hbar(int e) const
{
	Monomial r = *this;
	r.hbar_ += e;
	return r;
}

Monomial Monomial::divide_var(VariableId v) const
{
	Monomial r = *this;
	auto it = std::lower_bound(r.factors_.begin(), r.factors_.end(), v,
	                           [](const auto &f, const VariableId &w) { return f.first < w; });
	if (it == r.factors_.end() || !(it->first == v))
		throw std::invalid_argument("divide_var: variable not present");
	if (--it->second == 0)
		r.factors_.erase(it);
	return r;
}

std::strong_ordering operator<=>(const Monomial &a, const Monomial &b)
{
	if (auto c = a.degree() <=> b.degree(); c != 0)
		return c;
	if (auto c = a.hbar_ <=> b.hbar_; c != 0)
		return c;
	return a.factors_ <=> b.factors_;
}

SeriesCaps SeriesCaps::meet(const SeriesCaps &other) const
{
	if (dimension != other.dimension)
		throw std::invalid_argument("series dimension mismatch");
	return SeriesCaps{dimension, std::min(degree_cap, other.degree_cap),
	                  std::min(genus_cap, other.genus_cap)};
}

TruncatedSeries::TruncatedSeries(SeriesCaps caps) : caps_(caps), watermark_(caps.degree_cap)
{
	if (caps.dimension < 1 || caps.degree_cap < 0 || caps.genus_cap < 0)
		throw std::invalid_argument("invalid series caps");
}

TruncatedSeries TruncatedSeries::constant(SeriesCaps caps, const Rational &c)
{
	return monomial(caps, Monomial::one(), c);
}

TruncatedSeries TruncatedSeries::variable(SeriesCaps caps, VariableId v)
{
	return monomial(caps, Monomial(v, 1), 1);
}

TruncatedSeries TruncatedSeries::monomial(SeriesCaps caps, const Monomial &m, const Rational &c)
{
	TruncatedSeries s(caps);
	for (const auto &[v, p] : m.factors())
		if (v.d < 0 || v.mu < 1 || v.mu > caps.dimension)
			throw std::invalid_argument("variable index out of range");
	s.insert(m, c);
	return s;
}

void TruncatedSeries::insert(const Monomial &m, const Rational &c)
{
	if (c == 0)
		return;
	if (!caps_.admits(m.degree(), m.hbar_power()))
		return;
	auto [it, fresh] = terms_.try_emplace(m, c);
	if (!fresh) {
		it->second += c;
		if (it->second == 0)
			terms_.erase(it);
	}
}

int TruncatedSeries::min_degree() const
{
	int d = caps_.degree_cap + 1;
	for (const auto &[m, c] : terms_)
		d = std::min(d, m.degree());
	return d;
}

int TruncatedSeries::min_hbar() const
{
	int e = 0;
	for (const auto &[m, c] : terms_)
		e = std::min(e, m.hbar_power());
	return e;
}

Rational TruncatedSeries::coefficient(const Monomial &m) const
{
	if (!caps_.admits(m.degree(), m.hbar_power()))
		throw cap_error("coefficient request outside series caps");
	if (m.degree() > watermark_)
		throw cap_error("coefficient request above reliable-degree watermark");
	return coefficient_or_zero(m);
}

Rational TruncatedSeries::coefficient_or_zero(const Monomial &m) const
{
	auto it = terms_.find(m);
	return it == terms_.end() ? Rational(0) : it->second;
}

TruncatedSeries TruncatedSeries::restricted(SeriesCaps caps) const
{
	if (caps.dimension != caps_.dimension)
		throw std::invalid_argument("restricted: dimension mismatch");
	if (caps.degree_cap > caps_.degree_cap || caps.genus_cap > caps_.genus_cap)
		throw std::invalid_argument("restricted: caps may only narrow");
	TruncatedSeries r(caps);
	r.watermark_ = std::min(watermark_, caps.degree_cap);
	for (const auto &[m, c] : terms_)
		r.insert(m, c);
	return r;
}

TruncatedSeries TruncatedSeries::with_watermark(int w) const
{
	TruncatedSeries r = *this;
	r.watermark_ = std::min(w, caps_.degree_cap);
	return r;
}

TruncatedSeries add(const TruncatedSeries &a, const TruncatedSeries &b)
{
	TruncatedSeries r(a.caps_.meet(b.caps_));
	r.watermark_ = std::min(a.watermark_, b.watermark_);
	for (const auto &[m, c] : a.terms_)
		r.insert(m, c);
	for (const auto &[m, c] : b.terms_)
		r.insert(m, c);
	return r;
}

TruncatedSeries sub(const TruncatedSeries &a, const TruncatedSeries &b)
{
	TruncatedSeries r(a.caps_.meet(b.caps_));
	r.watermark_ = std::min(a.watermark_, b.watermark_);
	for (const auto &[m, c] : a.terms_)
		r.insert(m, c);
	for (const auto &[m, c] : b.terms_)
		r.insert(m, -c);
	return r;
}

TruncatedSeries neg(const TruncatedSeries &a)
{
	TruncatedSeries r(a.caps_);
	r.watermark_ = a.watermark_;
	for (const auto &[m, c] : a.terms_)
		r.terms_.emplace(m, -c);
	return r;
}

TruncatedSeries scale(const TruncatedSeries &a, const Rational &c)
{
	TruncatedSeries r(a.caps_);
	r.watermark_ = a.watermark_;
	if (c == 0)
		return r;
	for (const auto &[m, k] : a.terms_)
		r.terms_.emplace(m, k * c);
	return r;
}

TruncatedSeries mul_monomial(const TruncatedSeries &a, const Monomial &m, const Rational &c)
{
	TruncatedSeries r(a.caps_);
	r.watermark_ = std::min(a.watermark_ + m.degree(), a.caps_.degree_cap);
	if (c == 0)
		return r;
	for (const auto &[x, k] : a.terms_)
		r.insert(x.times(m), k * c);
	return r;
}

TruncatedSeries mul(const TruncatedSeries &a, const TruncatedSeries &b)
{
	TruncatedSeries r(a.caps_.meet(b.caps_));
	// A degree-D coefficient of a*b reads a only up to D - mindeg(b) and
	// vice versa, so reliability degrades by the partner's minimum degree.
	r.watermark_ = std::min({a.watermark_ + b.min_degree(), b.watermark_ + a.min_degree(),
	                         r.caps_.degree_cap});
	const int cap = r.caps_.degree_cap;
	for (const auto &[ma, ca] : a.terms_) {
		const int da = ma.degree();
		for (const auto &[mb, cb] : b.terms_) {
			if (da + mb.degree() > cap)
				break;
			r.insert(ma.times(mb), ca * cb);
		}
	}
	return r;
}

namespace {

// Shared by exp/log: rejects terms that make the truncated power sums
// infinite (a t-constant with hbar exponent <= 0 never dies under the
// caps), and produces an iteration bound that the power loop must respect.
int power_iteration_bound(const TruncatedSeries &a, const char *who)
{
	int min_e = 0;
	for (const auto &[m, c] : a.terms()) {
		if (m.degree() == 0 && m.hbar_power() <= 0)
			throw std::invalid_argument(std::string(who) +
			                            ": constant term at hbar^e with e <= 0");
		min_e = std::min(min_e, m.hbar_power());
	}
	const auto &caps = a.caps();
	return caps.degree_cap * (1 + std::max(0, -min_e)) + std::max(caps.genus_cap, 1) + 4;
}

} // namespace

TruncatedSeries exp_series(const TruncatedSeries &a)
{
	const int bound = power_iteration_bound(a, "exp_series");
	TruncatedSeries r = TruncatedSeries::constant(a.caps(), 1);
	r = r.with_watermark(a.watermark());
	TruncatedSeries inc = r;
	for (int k = 1; !inc.is_zero(); ++k) {
		if (k > bound)
			throw cap_error("exp_series: power sum did not terminate within caps");
		inc = scale(mul(inc, a), Rational(1, k));
		r = add(r, inc);
	}
	return r;
}

TruncatedSeries log_series(const TruncatedSeries &a)
{
	if (!(a.coefficient_or_zero(Monomial::one()) == 1))
		throw std::invalid_argument("log_series: constant term must be 1");
	TruncatedSeries b = sub(a, TruncatedSeries::constant(a.caps(), 1));
	const int bound = power_iteration_bound(b, "log_series");
	TruncatedSeries r(a.caps());
	r = r.with_watermark(a.watermark());
	TruncatedSeries p = TruncatedSeries::constant(a.caps(), 1).with_watermark(a.watermark());
	for (int k = 1; ; ++k) {
		if (k > bound)
			throw cap_error("log_series: power sum did not terminate within caps");
		p = mul(p, b);
		if (p.is_zero())
			break;
		r = add(r, scale(p, Rational(k % 2 ? 1 : -1, k)));
	}
	return r;
}

TruncatedSeries inverse_series(const TruncatedSeries &a)
{
	return exp_series(neg(log_series(a)));
}

TruncatedSeries partial(const TruncatedSeries &a, VariableId v)
{
	if (v.d < 0 || v.mu < 1 || v.mu > a.caps().dimension)
		throw std::invalid_argument("partial: variable index out of range");
	TruncatedSeries r(a.caps());
	r.watermark_ = std::max(a.watermark() - 1, 0);
	for (const auto &[m, c] : a.terms_) {
		int p = m.power_of(v);
		if (p > 0)
			r.insert(m.divide_var(v), c * p);
	}
	return r;
}

bool is_tame(const TruncatedSeries &a)
{
	for (const auto &[m, c] : a.terms())
		if (m.weighted_degree() > 3 * m.hbar_power() + m.degree())
			return false;
	return true;
}

TruncatedSeries prune_slack(const TruncatedSeries &a, int slack_max)
{
	TruncatedSeries r(a.caps_);
	r.watermark_ = a.watermark_;
	for (const auto &[m, c] : a.terms_)
		if (3 * m.hbar_power() + m.degree() - m.weighted_degree() <= slack_max)
			r.terms_.emplace(m, c);
	return r;
}

TruncatedSeries substitute(const TruncatedSeries &a,
                           const std::map<VariableId, TruncatedSeries> &args,
                           SeriesCaps out_caps)
{
	// Memoized powers of each argument.
	std::map<VariableId, std::vector<TruncatedSeries>> powers;
	auto arg_power = [&](VariableId v, int p) -> const TruncatedSeries & {
		auto it = args.find(v);
		if (it == args.end())
			throw std::invalid_argument("substitute: no argument for variable");
		auto &vec = powers[v];
		if (vec.empty())
			vec.push_back(TruncatedSeries::constant(out_caps, 1));
		while ((int)vec.size() <= p)
			vec.push_back(mul(vec.back(), it->second));
		return vec[p];
	};
	TruncatedSeries r(out_caps);
	for (const auto &[m, c] : a.terms()) {
		TruncatedSeries t = TruncatedSeries::monomial(out_caps, Monomial(m.hbar_power()), c);
		for (const auto &[v, p] : m.factors())
			t = mul(t, arg_power(v, p));
		r = add(r, t);
	}
	return r;
}

std::string monomial_to_text(const Monomial &m)
{
	std::ostringstream os;
	if (m.hbar_power() != 0)
		os << "hbar^" << m.hbar_power();
	for (const auto &[v, p] : m.factors()) {
		if (os.tellp() > 0)
			os << " * ";
		os << "t[" << v.d << "," << v.mu << "]";
		if (p != 1)
			os << "^" << p;
	}
	if (os.tellp() == 0)
		os << "1";
	return os.str();
}

std::string series_to_text(const TruncatedSeries &a)
{
	std::ostringstream os;
	for (const auto &[m, c] : a.terms()) {
		os << rational_to_string(c);
		if (!m.is_one())
			os << " * " << monomial_to_text(m);
		os << "\n";
	}
	return os.str();
}

namespace {

int parse_int(std::string_view s)
{
	int value = 0;
	auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
	if (ec != std::errc() || p != s.data() + s.size())
		throw parse_error("bad integer: '" + std::string(s) + "'");
	return value;
}

std::string_view strip(std::string_view s)
{
	while (!s.empty() && std::isspace((unsigned char)s.front()))
		s.remove_prefix(1);
	while (!s.empty() && std::isspace((unsigned char)s.back()))
		s.remove_suffix(1);
	return s;
}

} // namespace

Monomial parse_monomial(std::string_view s)
{
	Monomial m;
	size_t pos = 0;
	while (pos < s.size()) {
		auto next = s.find('*', pos);
		std::string_view f = strip(s.substr(pos, next == std::string_view::npos ? next : next - pos));
		pos = next == std::string_view::npos ? s.size() : next + 1;
		if (f.empty())
			throw parse_error("empty factor in monomial");
		if (f == "1")
			continue;
		int power = 1;
		if (auto caret = f.rfind('^'); caret != std::string_view::npos && f.find(']') < caret) {
			power = parse_int(strip(f.substr(caret + 1)));
			f = strip(f.substr(0, caret));
		} else if (f.substr(0, 5) == "hbar^") {
			m = m.times_hbar(parse_int(f.substr(5)));
			continue;
		}
		if (f.substr(0, 2) == "t[" && f.back() == ']') {
			auto comma = f.find(',');
			if (comma == std::string_view::npos)
				throw parse_error("bad variable: '" + std::string(f) + "'");
			VariableId v{parse_int(strip(f.substr(2, comma - 2))),
			             parse_int(strip(f.substr(comma + 1, f.size() - comma - 2)))};
			if (power <= 0)
				throw parse_error("variable power must be positive");
			m = m.times_var(v, power);
		} else {
			throw parse_error("bad monomial factor: '" + std::string(f) + "'");
		}
	}
	return m;
}

TruncatedSeries parse_series(std::string_view text, SeriesCaps caps)
{
	TruncatedSeries r(caps);
	size_t pos = 0;
	while (pos < text.size()) {
		auto eol = text.find('\n', pos);
		std::string_view line = strip(text.substr(pos, eol == std::string_view::npos ? eol : eol - pos));
		pos = eol == std::string_view::npos ? text.size() : eol + 1;
		if (line.empty() || line.front() == '#')
			continue;
		auto star = line.find('*');
		Rational c = parse_rational(strip(line.substr(0, star)));
		Monomial m = star == std::string_view::npos ? Monomial::one()
		                                            : parse_monomial(line.substr(star + 1));
		r = add(r, TruncatedSeries::monomial(caps, m, c));
	}
	return r;
}

} // namespace givental
