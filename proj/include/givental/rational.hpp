#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>
#include <string_view>

#include "givental/errors.hpp"

namespace givental {

// Exact arithmetic throughout: all identities in this library are checked
// with equality of rationals, never with tolerances.
using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Integer factorial(int n)
{
	if (n < 0)
		throw std::invalid_argument("factorial of negative number");
	Integer r = 1;
	for (int i = 2; i <= n; ++i)
		r *= i;
	return r;
}

inline Integer binomial(int n, int k)
{
	if (k < 0 || k > n)
		return 0;
	Integer r = 1;
	for (int i = 0; i < k; ++i) {
		r *= n - i;
		r /= i + 1;
	}
	return r;
}

// Canonical "p/q" form, q > 0, lowest terms. Used by all file formats and
// reports; bit-exact round trip with parse_rational.
std::string rational_to_string(const Rational &q);

// Accepts "p" or "p/q" with optional sign on p.
Rational parse_rational(std::string_view s);

} // namespace givental
