// Command-line surface: batch transformations and verifications over
// potential/rmatrix files, with deterministic reports.

#include <iostream>

#include "CLI11.hpp"
#include "givental/runner.hpp"

int main(int argc, char **argv)
{
	CLI::App app{"Givental group action on CohFT partition functions: "
	             "transforms, inversion symmetry, hierarchy comparison"};
	app.require_subcommand(1);

	givental::RunConfig config;

	auto add_common = [&](CLI::App *cmd, bool needs_rmatrix) {
		cmd->add_option("--input", config.input_path, "potential file")->required();
		if (needs_rmatrix)
			cmd->add_option("--rmatrix", config.rmatrix_path, "group element file")->required();
		cmd->add_option("--cap", config.cap, "total t-degree cap");
		cmd->add_option("--report", config.report, "text | structured")
		    ->check(CLI::IsMember({"text", "structured"}));
		cmd->add_option("--output", config.output_path, "write the report to a file (atomic)");
		cmd->add_option("--threads", config.threads,
		                "parallel graph contraction (0: GIVENTAL_THREADS)");
	};

	auto *transform = app.add_subcommand("transform", "apply a group element to a CohFT");
	add_common(transform, true);
	transform->add_option("--genus-cap", config.genus_cap, "maximum output genus");
	transform->add_option("--route", config.route, "graph | operator | both");
	transform->add_flag("--emit-graphs", config.emit_graphs,
	                    "append the contributing decorated graphs per monomial");

	auto *invert = app.add_subcommand("invert", "verify the inversion symmetry");
	add_common(invert, false);
	invert->add_option("--route", config.route, "coord | givental | both");

	auto *hierarchy = app.add_subcommand("hierarchy", "transform the principal-hierarchy densities");
	add_common(hierarchy, false);
	hierarchy->add_option("--pmax", config.pmax, "highest descendant level");
	hierarchy->add_option("--compare", config.compare, "comparison family (lxz)");

	auto *graphs = app.add_subcommand("graphs", "dump the decorated-graph expansion");
	add_common(graphs, true);
	graphs->add_option("--genus-cap", config.genus_cap, "maximum output genus");

	CLI11_PARSE(app, argc, argv);

	if (transform->parsed())
		config.subcommand = "transform";
	else if (invert->parsed())
		config.subcommand = "invert";
	else if (hierarchy->parsed())
		config.subcommand = "hierarchy";
	else
		config.subcommand = "graphs";

	auto result = givental::run_command(config);
	if (result.exit_code == 2 || result.exit_code == 3)
		std::cerr << result.report;
	else if (config.output_path.empty())
		std::cout << result.report;
	return result.exit_code;
}
