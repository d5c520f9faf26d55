#pragma once

#include "givental/io.hpp"

namespace givental {

// Configuration of one CLI run; the subcommand semantics and the exit-code
// contract (0 ok, 1 mismatch, 2 parse error, 3 cap insufficiency) live in
// run_command so the command line and the bindings share them.
struct RunConfig {
	std::string subcommand;          // transform | invert | hierarchy | graphs
	std::string input_path;          // potential file
	std::string rmatrix_path;        // group element file (transform/graphs)
	std::string output_path;         // optional; atomic write
	int cap = 4;
	int genus_cap = 0;
	int pmax = 1;
	std::string route = "both";      // transform: operator|graph|both; invert: coord|givental|both
	std::string report = "text";     // text | structured
	std::string compare = "lxz";     // hierarchy comparison target
	bool emit_graphs = false;
	int threads = 0;                 // 0: GIVENTAL_THREADS or single-threaded
};

struct RunResult {
	int exit_code = 0;
	std::string report;
};

RunResult run_command(const RunConfig &config);

} // namespace givental
