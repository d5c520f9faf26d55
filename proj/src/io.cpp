#include "givental/io.hpp"

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace givental {

namespace {

std::string strip(const std::string &s)
{
	size_t b = 0, e = s.size();
	while (b < e && std::isspace((unsigned char)s[b]))
		++b;
	while (e > b && std::isspace((unsigned char)s[e - 1]))
		--e;
	return s.substr(b, e - b);
}

std::vector<std::string> split_ws(const std::string &s)
{
	std::vector<std::string> out;
	std::istringstream is(s);
	std::string w;
	while (is >> w)
		out.push_back(w);
	return out;
}

struct LineReader {
	std::istream &in;
	int lineno = 0;

	std::optional<std::string> next()
	{
		std::string line;
		while (std::getline(in, line)) {
			++lineno;
			line = strip(line);
			if (line.empty() || line[0] == '#')
				continue;
			return line;
		}
		return std::nullopt;
	}

	[[noreturn]] void fail(const std::string &msg) const
	{
		throw parse_error("line " + std::to_string(lineno) + ": " + msg);
	}
};

Insertion parse_tau(LineReader &r, const std::string &w)
{
	// tau[d,mu]
	if (w.size() < 6 || w.substr(0, 4) != "tau[" || w.back() != ']')
		r.fail("bad insertion '" + w + "'");
	auto comma = w.find(',');
	if (comma == std::string::npos)
		r.fail("bad insertion '" + w + "'");
	try {
		return Insertion{std::stoi(w.substr(4, comma - 4)),
		                 std::stoi(w.substr(comma + 1, w.size() - comma - 2))};
	} catch (const std::exception &) {
		r.fail("bad insertion '" + w + "'");
	}
}

} // namespace

PotentialFile load_potential(std::istream &in)
{
	LineReader r{in};
	int n = 0, jet = -1;
	std::vector<std::pair<Monomial, Rational>> terms;
	std::vector<std::tuple<int, InsertionList, Rational>> correlators;
	int max_deg = 0, max_extra_g = 0, max_extra_k = 0, max_extra_d = 0;

	auto line = r.next();
	for (; line; line = r.next()) {
		auto words = split_ws(*line);
		if (words[0] == "dimension" && words.size() == 2) {
			n = std::stoi(words[1]);
		} else if (words[0] == "jet_order" && words.size() == 2) {
			jet = std::stoi(words[1]);
		} else if (words[0] == "potential") {
			while ((line = r.next()) && *line != "end") {
				auto lw = split_ws(*line);
				if (lw.size() < 2)
					r.fail("potential line needs a monomial and a rational");
				std::string mono_text;
				for (size_t i = 0; i + 1 < lw.size(); ++i) {
					if (lw[i] == "*")
						continue;
					mono_text += (mono_text.empty() ? "" : " * ") + lw[i];
				}
				try {
					Monomial m = parse_monomial(mono_text);
					max_deg = std::max(max_deg, m.degree());
					terms.emplace_back(m, parse_rational(lw.back()));
				} catch (const parse_error &e) {
					r.fail(e.what());
				}
			}
			if (!line)
				r.fail("unterminated potential section");
		} else if (words[0] == "correlators") {
			while ((line = r.next()) && *line != "end") {
				// g <g> ; tau[d,mu] ... ; p/q
				auto first_semi = line->find(';');
				auto last_semi = line->rfind(';');
				if (first_semi == std::string::npos || last_semi == first_semi)
					r.fail("correlator line needs two ';' separators");
				auto head = split_ws(strip(line->substr(0, first_semi)));
				if (head.size() != 2 || head[0] != "g")
					r.fail("correlator line must start with 'g <genus>'");
				int g = std::stoi(head[1]);
				InsertionList ins;
				for (const auto &w :
				     split_ws(strip(line->substr(first_semi + 1, last_semi - first_semi - 1))))
					ins.push_back(parse_tau(r, w));
				Rational v;
				try {
					v = parse_rational(strip(line->substr(last_semi + 1)));
				} catch (const parse_error &e) {
					r.fail(e.what());
				}
				max_extra_g = std::max(max_extra_g, g);
				max_extra_k = std::max(max_extra_k, (int)ins.size());
				max_extra_d = std::max(max_extra_d, total_level(ins));
				correlators.emplace_back(g, std::move(ins), v);
			}
			if (!line)
				r.fail("unterminated correlators section");
		} else {
			r.fail("unexpected line '" + *line + "'");
		}
	}
	if (n < 2)
		throw parse_error("potential file: dimension must be declared and >= 2");
	if (jet < 0)
		jet = std::max(max_deg, 3);

	SeriesCaps caps{n, jet, 1};
	TruncatedSeries f(caps);
	for (const auto &[m, c] : terms)
		f = add(f, TruncatedSeries::monomial(caps, m, c));
	PotentialFile out{FrobeniusPotential(n, f), std::nullopt};
	if (!correlators.empty()) {
		CorrelatorTable t(n, TableCaps{max_extra_g, std::max(max_extra_k, 3), max_extra_d});
		for (auto &[g, ins, v] : correlators)
			t.set(g, std::move(ins), v);
		out.extra_correlators = std::move(t);
	}
	return out;
}

PotentialFile load_potential_file(const std::string &path)
{
	std::ifstream in(path);
	if (!in)
		throw parse_error("cannot open potential file '" + path + "'");
	try {
		return load_potential(in);
	} catch (const std::invalid_argument &e) {
		throw parse_error("potential file '" + path + "': " + e.what());
	}
}

std::string potential_to_text(const FrobeniusPotential &F)
{
	std::ostringstream os;
	os << "dimension " << F.dimension() << "\n";
	os << "jet_order " << F.jet_order() << "\n";
	os << "potential\n";
	for (const auto &[m, c] : F.potential().terms())
		os << monomial_to_text(m) << " " << rational_to_string(c) << "\n";
	os << "end\n";
	return os.str();
}

RMatrix load_rmatrix(std::istream &in)
{
	LineReader r{in};
	int n = 0;
	std::map<int, Matrix> levels;
	auto line = r.next();
	for (; line; line = r.next()) {
		auto words = split_ws(*line);
		if (words[0] == "dimension" && words.size() == 2) {
			n = std::stoi(words[1]);
		} else if (words[0] == "level" && words.size() == 2) {
			if (n < 1)
				r.fail("dimension must come before the first level");
			int l = std::stoi(words[1]);
			Matrix m = zero_matrix(n);
			for (int i = 0; i < n; ++i) {
				line = r.next();
				if (!line)
					r.fail("truncated matrix block");
				auto row = split_ws(*line);
				if ((int)row.size() != n)
					r.fail("expected " + std::to_string(n) + " entries");
				for (int j = 0; j < n; ++j)
					try {
						m[i][j] = parse_rational(row[j]);
					} catch (const parse_error &e) {
						r.fail(e.what());
					}
			}
			levels[l] = std::move(m);
		} else {
			r.fail("unexpected line '" + *line + "'");
		}
	}
	if (n < 1)
		throw parse_error("rmatrix file: dimension must be declared");
	try {
		return RMatrix(n, std::move(levels));
	} catch (const std::invalid_argument &e) {
		throw parse_error(e.what());
	}
}

RMatrix load_rmatrix_file(const std::string &path)
{
	std::ifstream in(path);
	if (!in)
		throw parse_error("cannot open rmatrix file '" + path + "'");
	return load_rmatrix(in);
}

std::string rmatrix_to_text(const RMatrix &r)
{
	std::ostringstream os;
	os << "dimension " << r.dimension() << "\n";
	for (const auto &[l, m] : r.levels()) {
		os << "level " << l << "\n";
		for (const auto &row : m) {
			for (size_t j = 0; j < row.size(); ++j)
				os << (j ? " " : "") << rational_to_string(row[j]);
			os << "\n";
		}
	}
	return os.str();
}

void write_file_atomic(const std::string &path, const std::string &content)
{
	namespace fs = std::filesystem;
	fs::path target(path);
	fs::path dir = target.parent_path();
	if (dir.empty())
		dir = ".";
	fs::path tmp = dir / (target.filename().string() + ".tmp");
	{
		std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
		if (!out)
			throw std::runtime_error("cannot write '" + tmp.string() + "'");
		out << content;
		if (!out.flush())
			throw std::runtime_error("write failed for '" + tmp.string() + "'");
	}
	fs::rename(tmp, target);
}

} // namespace givental
