#pragma once

#include "ivmc/core/zset.hpp"

#include <fstream>
#include <functional>
#include <sstream>
#include <string>

namespace ivmc::test {

inline std::string data_file(const std::string &name) {
	std::ifstream in(std::string(IVMC_TEST_DATA) + "/" + name);
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

inline Schema make_schema(const std::string &name, std::vector<std::pair<std::string, ScalarType>> cols) {
	Schema s;
	s.name = name;
	for (auto &[n, t] : cols) {
		s.columns.push_back({n, t, name});
	}
	return s;
}

/// Relation from (tuple, +/-1) pairs.
inline ZSetRelation rel(const Schema &s, std::vector<std::pair<Tuple, int>> rows) {
	ZSetRelation r(s);
	for (auto &[t, w] : rows) {
		r.add(t, w > 0 ? Multiplicity::insertion() : Multiplicity::deletion());
	}
	return r;
}

/// Collapses whitespace runs to one space and lower-cases.
inline std::string normalize_sql(const std::string &sql) {
	std::string out;
	bool space = false;
	for (char c : sql) {
		if (c == ' ' || c == '\n' || c == '\t' || c == '\r') {
			space = !out.empty();
			continue;
		}
		if (space) {
			if (c != ')' && c != ',' && c != ';' && out.back() != '(') {
				out += ' ';
			}
			space = false;
		}
		out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
	}
	return out;
}

/// Removes `--` comment lines.
inline std::string strip_comments(const std::string &sql) {
	std::istringstream in(sql);
	std::string line;
	std::string out;
	while (std::getline(in, line)) {
		if (line.rfind("--", 0) != 0) {
			out += line + "\n";
		}
	}
	return out;
}

} // namespace ivmc::test
