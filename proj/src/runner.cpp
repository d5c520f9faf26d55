#include "givental/runner.hpp"

#include <cstdlib>
#include <functional>
#include <sstream>
#include <thread>

namespace givental {

namespace {

std::string monomial_compact(const Monomial &m)
{
	std::string s = monomial_to_text(m);
	std::string out;
	for (char c : s)
		if (c != ' ')
			out += c;
	return out;
}

int resolve_threads(int requested)
{
	if (requested > 0)
		return requested;
	if (const char *env = std::getenv("GIVENTAL_THREADS")) {
		int v = std::atoi(env);
		if (v > 0)
			return v;
		if (v == 0 && env[0] == '0')
			return (int)std::max(1u, std::thread::hardware_concurrency());
	}
	return 1;
}

std::string leaf_text(const LeafDecor &l)
{
	std::ostringstream os;
	if (l.dilaton)
		os << "D(e" << l.basis << "z" << l.zpow << ")";
	else
		os << "L(t[" << l.var_d << "," << l.var_mu << "]|e" << l.basis << "z" << l.zpow << ")";
	return os.str();
}

std::string decorated_graph_text(const EmittedGraph &e)
{
	std::ostringstream os;
	os << "graph aut=" << e.aut.str() << " g=" << e.graph.total_genus() << " V="
	   << e.graph.num_vertices() << " E=" << e.graph.edges.size() << " vertices={";
	for (int v = 0; v < e.graph.num_vertices(); ++v) {
		if (v)
			os << " ";
		os << "g" << e.graph.genus[v] << "[";
		for (size_t i = 0; i < e.graph.leaves[v].size(); ++i)
			os << (i ? "," : "") << leaf_text(e.graph.leaves[v][i]);
		os << "]";
	}
	os << "} edges={";
	for (size_t i = 0; i < e.graph.edges.size(); ++i) {
		const auto &ed = e.graph.edges[i];
		os << (i ? " " : "") << ed.u << "-" << ed.v << "(e" << ed.at_u.basis << "z"
		   << ed.at_u.zpow << ",e" << ed.at_v.basis << "z" << ed.at_v.zpow << ")";
	}
	os << "} contribution=";
	if (e.contribution.is_zero())
		os << "0/1";
	else {
		bool first = true;
		for (const auto &[m, c] : e.contribution.terms()) {
			os << (first ? "" : "+") << rational_to_string(c);
			first = false;
		}
	}
	return os.str();
}

// the genus-0 descendant-free slice of a transformed free energy, with the
// hbar prefactor stripped
TruncatedSeries genus0_primary_slice(const TruncatedSeries &f)
{
	SeriesCaps caps = f.caps();
	caps.genus_cap = std::max(caps.genus_cap, 1);
	TruncatedSeries out(caps);
	for (const auto &[m, c] : f.terms())
		if (m.hbar_power() == -1 && m.weighted_degree() == 0)
			out = add(out, TruncatedSeries::monomial(caps, m.times_hbar(1), c));
	return out;
}

void emit_graph_sections(std::ostream &os, const CorrelatorTable &table, const RMatrix &r,
                         const TruncatedSeries &genus0, SeriesCaps caps)
{
	for (const auto &[m, c] : genus0.terms()) {
		if (m.degree() < 3)
			continue;
		Monomial target = m.times_hbar(-1);
		os << "monomial " << monomial_compact(m) << "\n";
		for (const auto &e : enumerate_contributions(table, r, target, caps))
			os << decorated_graph_text(e) << "\n";
	}
}

struct ReportWriter {
	std::string format;
	std::ostringstream os;

	void header(const RunConfig &config, int dimension)
	{
		if (format == "structured") {
			os << "givental-report v1\n";
			os << "command " << config.subcommand << "\n";
			os << "dimension " << dimension << "\n";
			os << "cap " << config.cap << "\n";
		} else {
			os << "# " << config.subcommand << " report, dimension " << dimension
			   << ", cap " << config.cap << "\n";
		}
	}

	void line(const std::string &s) { os << s << "\n"; }

	void status(const std::string &s)
	{
		if (format == "structured")
			os << "status " << s << "\n";
		else
			os << "# status: " << s << "\n";
	}
};

CorrelatorTable build_table(const PotentialFile &pf, SeriesCaps target)
{
	GraphCaps gc = derive_graph_caps(target);
	TableCaps caps{0, gc.max_leaves + 2 * gc.max_edges, gc.budget};
	if (pf.extra_correlators) {
		const TableCaps &e = pf.extra_correlators->caps();
		caps.max_genus = std::max(caps.max_genus, e.max_genus);
		caps.max_insertions = std::max(caps.max_insertions, e.max_insertions);
		caps.max_total_level = std::max(caps.max_total_level, e.max_total_level);
	}
	CorrelatorTable table = reconstruct_descendants(pf.potential, caps);
	if (pf.extra_correlators)
		for (const auto &[key, v] : pf.extra_correlators->entries())
			table.set(key.first, key.second, v);
	return table;
}

RunResult cmd_transform(const RunConfig &config)
{
	PotentialFile pf = load_potential_file(config.input_path);
	RMatrix r = load_rmatrix_file(config.rmatrix_path);
	const int n = pf.potential.dimension();
	if (r.dimension() != n)
		throw parse_error("dimension mismatch between potential and rmatrix files");
	SeriesCaps target{n, config.cap, config.genus_cap};
	CorrelatorTable table = build_table(pf, target);

	ReportWriter w{config.report};
	w.header(config, n);

	GraphSumOptions opt;
	opt.threads = resolve_threads(config.threads);
	TruncatedSeries result(target);
	bool mismatch = false;
	if (config.route == "graph") {
		result = graph_sum(table, r, target, opt);
	} else if (config.route == "operator") {
		result = transformed_free_energy(table, r, target);
	} else if (config.route == "both") {
		auto via_graphs = graph_sum(table, r, target, opt);
		auto via_operator = transformed_free_energy(table, r, target);
		mismatch = !(via_graphs == via_operator);
		result = via_graphs;
	} else {
		throw parse_error("transform route must be graph, operator or both");
	}

	for (const auto &[m, c] : result.terms())
		w.line((config.report == "structured" ? "term " : "") + rational_to_string(c) +
		       " * " + monomial_compact(m));
	if (config.emit_graphs)
		emit_graph_sections(w.os, table, r, genus0_primary_slice(result), target);
	w.status(mismatch ? "mismatch" : "ok");
	return RunResult{mismatch ? 1 : 0, w.os.str()};
}

RunResult cmd_invert(const RunConfig &config)
{
	PotentialFile pf = load_potential_file(config.input_path);
	const int n = pf.potential.dimension();
	ReportWriter w{config.report};
	w.header(config, n);

	bool mismatch = false;
	if (config.route == "coord") {
		auto fhat = invert_potential(pf.potential, config.cap);
		for (const auto &[m, c] : fhat.potential().terms())
			w.line((config.report == "structured" ? "term " : "") + rational_to_string(c) +
			       " * " + monomial_compact(m));
	} else if (config.route == "givental") {
		auto ghat = givental_transformed_potential(pf.potential, config.cap);
		for (const auto &[m, c] : ghat.terms())
			w.line((config.report == "structured" ? "term " : "") + rational_to_string(c) +
			       " * " + monomial_compact(m));
	} else if (config.route == "both") {
		auto report = verify_inversion_theorem(pf.potential, config.cap);
		for (const auto &row : report.rows)
			w.line((config.report == "structured" ? "row " : "") +
			       monomial_compact(row.monomial) + " coord " +
			       rational_to_string(row.coordinate_value) + " givental " +
			       rational_to_string(row.givental_value) +
			       (row.equal ? " equal" : " MISMATCH"));
		mismatch = !report.all_equal();
	} else {
		throw parse_error("invert route must be coord, givental or both");
	}
	w.status(mismatch ? "mismatch" : "ok");
	return RunResult{mismatch ? 1 : 0, w.os.str()};
}

RunResult cmd_hierarchy(const RunConfig &config)
{
	if (config.compare != "lxz")
		throw parse_error("hierarchy comparison target must be lxz");
	PotentialFile pf = load_potential_file(config.input_path);
	const int n = pf.potential.dimension();
	ReportWriter w{config.report};
	w.header(config, n);

	std::vector<HamiltonianDensity> ours, lxz;
	for (int p = 0; p <= config.pmax; ++p)
		for (int alpha = 1; alpha <= n; ++alpha) {
			ours.push_back(transform_hamiltonians(pf.potential, alpha, p, config.cap));
			lxz.push_back(lxz_hamiltonians(pf.potential, alpha, p, config.cap));
		}
	lxz.push_back(lxz_hamiltonians(pf.potential, 1, config.pmax + 1, config.cap));

	auto cmp = compare_spans(ours, lxz, config.cap);
	for (size_t i = 0; i < ours.size(); ++i) {
		std::ostringstream line;
		line << (config.report == "structured" ? "density " : "") << "theta_hat[" << ours[i].alpha
		     << "," << ours[i].p << "]";
		if (i < cmp.change_of_basis.size()) {
			bool exact = ours[i].alpha >= 2 && ours[i].alpha <= n - 1;
			line << (exact ? " exact-lxz-match" : " combination");
			for (size_t j = 0; j < lxz.size(); ++j)
				if (!(cmp.change_of_basis[i][j] == 0))
					line << " " << rational_to_string(cmp.change_of_basis[i][j]) << "*lxz["
					     << lxz[j].alpha << "," << lxz[j].p << "]";
		} else {
			line << " OUTSIDE-SPAN";
		}
		w.line(line.str());
	}
	w.status(cmp.a_in_span_b ? "ok" : "mismatch");
	return RunResult{cmp.a_in_span_b ? 0 : 1, w.os.str()};
}

RunResult cmd_graphs(const RunConfig &config)
{
	PotentialFile pf = load_potential_file(config.input_path);
	RMatrix r = load_rmatrix_file(config.rmatrix_path);
	const int n = pf.potential.dimension();
	if (r.dimension() != n)
		throw parse_error("dimension mismatch between potential and rmatrix files");
	SeriesCaps target{n, config.cap, config.genus_cap};
	CorrelatorTable table = build_table(pf, target);

	ReportWriter w{config.report};
	w.header(config, n);
	GraphSumOptions opt;
	opt.threads = resolve_threads(config.threads);
	auto result = graph_sum(table, r, target, opt);
	emit_graph_sections(w.os, table, r, genus0_primary_slice(result), target);
	w.status("ok");
	return RunResult{0, w.os.str()};
}

} // namespace

RunResult run_command(const RunConfig &config)
{
	try {
		RunResult result;
		if (config.subcommand == "transform")
			result = cmd_transform(config);
		else if (config.subcommand == "invert")
			result = cmd_invert(config);
		else if (config.subcommand == "hierarchy")
			result = cmd_hierarchy(config);
		else if (config.subcommand == "graphs")
			result = cmd_graphs(config);
		else
			throw parse_error("unknown subcommand '" + config.subcommand + "'");
		if (!config.output_path.empty())
			write_file_atomic(config.output_path, result.report);
		return result;
	} catch (const parse_error &e) {
		return RunResult{2, std::string("error: ") + e.what() + "\n"};
	} catch (const cap_error &e) {
		return RunResult{3, std::string("error: ") + e.what() + "\n"};
	} catch (const std::invalid_argument &e) {
		return RunResult{2, std::string("error: ") + e.what() + "\n"};
	}
}

} // namespace givental
