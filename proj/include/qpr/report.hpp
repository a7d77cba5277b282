#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace qpr {
namespace report {

enum class OutputFormat { json, csv };

/** Accepts "json" or "csv" (case-sensitive); throws ParseError otherwise. */
OutputFormat parse_format(const std::string& s);

/** 17 significant digits; non-finite values become inf/-inf/nan. */
std::string fmt17(double v);

/** One table cell carrying both renderings so JSON and CSV stay in sync. */
struct Cell {
    std::string csv;
    std::string json;
};

Cell cell_num(double v);
Cell cell_int(long v);
Cell cell_size(std::size_t v);
Cell cell_str(const std::string& s);
Cell cell_bool(bool b);
Cell cell_empty();

/** Rectangular table with named columns; JSON form is a list of objects. */
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> cells);
    std::string to_csv() const;  // header line + data lines
    std::string to_json() const; // [{"col": value, ...}, ...]
};

/** Key/value section (radius estimates, ledger constants, run metadata). */
struct Section {
    std::string name;
    std::vector<std::pair<std::string, Cell>> entries;

    void add(const std::string& key, Cell value);
    std::string to_csv() const;  // key,value lines under a header
    std::string to_json() const; // {"key": value, ...}
};

/** A full artifact: sections and tables rendered either as one JSON object
 *  {"name": ..., ...} or as blank-line separated CSV blocks, each block
 *  prefixed by a `table` header column naming it. */
struct Artifact {
    std::vector<Section> sections;
    std::vector<Table> tables;

    std::string render(OutputFormat fmt) const;
};

/** Writes to `path`, or to stdout when path is empty. */
void emit(const std::string& text, const std::string& path);

} // namespace report
} // namespace qpr
