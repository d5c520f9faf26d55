#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "givental/hierarchy.hpp"

namespace givental {

// Potential file: line-oriented text.
//   # comment
//   dimension <n>
//   jet_order <M>              (optional; defaults to the largest monomial)
//   potential
//   <monomial> <p/q>           e.g.  t[0,2]^3 1/6
//   end
//   correlators                (optional explicit entries, any genus)
//   g <g> ; tau[<d>,<mu>] ... ; <p/q>
//   end
// The potential section must contain the full eta-cubic; rationals are
// "p/q" strings and round trip bit-exactly.
struct PotentialFile {
	FrobeniusPotential potential;
	std::optional<CorrelatorTable> extra_correlators;
};

PotentialFile load_potential(std::istream &in);
PotentialFile load_potential_file(const std::string &path);
std::string potential_to_text(const FrobeniusPotential &F);

// R-matrix file:
//   dimension <n>
//   level <l>
//   <n rows of n rationals>
// The loader enforces the (skew-)symmetry constraint and reports the
// offending (l, mu, nu) on failure.
RMatrix load_rmatrix(std::istream &in);
RMatrix load_rmatrix_file(const std::string &path);
std::string rmatrix_to_text(const RMatrix &r);

// Atomic write: content goes to a temporary in the target directory and is
// renamed over the destination, so failures never leave partial output.
void write_file_atomic(const std::string &path, const std::string &content);

} // namespace givental
