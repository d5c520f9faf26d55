#include "givental/rational.hpp"

namespace givental {

std::string rational_to_string(const Rational &q)
{
	return numerator(q).str() + "/" + denominator(q).str();
}

Rational parse_rational(std::string_view s)
{
	auto bad = [&] { return parse_error("bad rational: '" + std::string(s) + "'"); };
	if (s.empty())
		throw bad();
	auto slash = s.find('/');
	try {
		if (slash == std::string_view::npos)
			return Rational(Integer(std::string(s)));
		Integer num{std::string(s.substr(0, slash))};
		Integer den{std::string(s.substr(slash + 1))};
		if (den == 0)
			throw bad();
		return Rational(num, den);
	} catch (const std::runtime_error &) {
		throw bad();
	}
}

} // namespace givental
