#include "qpr/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "qpr/errors.hpp"

namespace qpr {
namespace report {

OutputFormat parse_format(const std::string& s) {
    if (s == "json") return OutputFormat::json;
    if (s == "csv") return OutputFormat::csv;
    throw ParseError("unknown output format '" + s + "' (expected json or csv)");
}

std::string fmt17(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Cell cell_num(double v) {
    const std::string s = fmt17(v);
    if (std::isfinite(v)) return {s, s};
    return {s, "\"" + s + "\""};
}

Cell cell_int(long v) {
    const std::string s = std::to_string(v);
    return {s, s};
}

Cell cell_size(std::size_t v) {
    const std::string s = std::to_string(v);
    return {s, s};
}

Cell cell_str(const std::string& s) {
    std::string esc;
    esc.reserve(s.size());
    for (char c : s) {
        if (c == '"' || c == '\\') esc.push_back('\\');
        esc.push_back(c);
    }
    return {s, "\"" + esc + "\""};
}

Cell cell_bool(bool b) {
    return {b ? "true" : "false", b ? "true" : "false"};
}

Cell cell_empty() {
    return {"", "null"};
}

void Table::add_row(std::vector<Cell> cells) {
    if (cells.size() != columns.size())
        throw std::logic_error("table row width mismatch in " + name);
    rows.push_back(std::move(cells));
}

std::string Table::to_csv() const {
    std::ostringstream os;
    os << "table";
    for (const auto& c : columns) os << "," << c;
    os << "\n";
    for (const auto& row : rows) {
        os << name;
        for (const auto& cell : row) os << "," << cell.csv;
        os << "\n";
    }
    return os.str();
}

std::string Table::to_json() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t r = 0; r < rows.size(); ++r) {
        os << (r ? "," : "") << "{";
        for (std::size_t c = 0; c < columns.size(); ++c)
            os << (c ? "," : "") << "\"" << columns[c] << "\":" << rows[r][c].json;
        os << "}";
    }
    os << "]";
    return os.str();
}

void Section::add(const std::string& key, Cell value) {
    entries.emplace_back(key, std::move(value));
}

std::string Section::to_csv() const {
    std::ostringstream os;
    os << "table,key,value\n";
    for (const auto& [k, v] : entries) os << name << "," << k << "," << v.csv << "\n";
    return os.str();
}

std::string Section::to_json() const {
    std::ostringstream os;
    os << "{";
    for (std::size_t i = 0; i < entries.size(); ++i)
        os << (i ? "," : "") << "\"" << entries[i].first << "\":" << entries[i].second.json;
    os << "}";
    return os.str();
}

std::string Artifact::render(OutputFormat fmt) const {
    std::ostringstream os;
    if (fmt == OutputFormat::json) {
        os << "{";
        bool first = true;
        for (const auto& s : sections) {
            os << (first ? "" : ",") << "\"" << s.name << "\":" << s.to_json();
            first = false;
        }
        for (const auto& t : tables) {
            os << (first ? "" : ",") << "\"" << t.name << "\":" << t.to_json();
            first = false;
        }
        os << "}\n";
    } else {
        bool first = true;
        for (const auto& s : sections) {
            if (!first) os << "\n";
            os << s.to_csv();
            first = false;
        }
        for (const auto& t : tables) {
            if (!first) os << "\n";
            os << t.to_csv();
            first = false;
        }
    }
    return os.str();
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open output file '" + path + "'");
    out << text;
}

} // namespace report
} // namespace qpr
