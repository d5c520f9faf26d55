#pragma once

#include <stdexcept>

namespace givental {

// Requested computation cannot be completed within the given truncation
// caps. Distinct from std::invalid_argument (malformed input) and from
// parse_error (file syntax). The CLI maps these to exit codes 3 and 2.
struct cap_error : std::runtime_error {
	using std::runtime_error::runtime_error;
};

struct parse_error : std::runtime_error {
	using std::runtime_error::runtime_error;
};

} // namespace givental
