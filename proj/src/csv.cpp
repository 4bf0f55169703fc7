#include "bkmr/csv.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace bkmr::csv {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell += c;
        }
    }
    out.push_back(cell);
    return out;
}

std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

bool parse_cell(const std::string& raw, double& out) {
    const std::string cell = trimmed(raw);
    if (cell.empty()) return false;
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end != cell.c_str() + cell.size() || errno == ERANGE) return false;
    if (!std::isfinite(v)) return false;
    out = v;
    return true;
}

std::string join_lines(const std::vector<std::size_t>& lines) {
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(lines[i]);
    }
    return out;
}

} // namespace

std::size_t NumericTable::column(const std::string& name) const {
    for (std::size_t j = 0; j < headers.size(); ++j)
        if (headers[j] == name) return j;
    throw InputError("csv: no column named '" + name + "'");
}

NumericTable read_numeric_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("csv: cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw InputError("csv: '" + path + "' is empty");

    NumericTable table;
    for (const std::string& h : split_line(line)) {
        const std::string name = trimmed(h);
        if (name.empty()) throw InputError("csv: '" + path + "' has an empty header cell");
        for (const std::string& seen : table.headers)
            if (seen == name)
                throw InputError("csv: '" + path + "' has duplicate column '" + name + "'");
        table.headers.push_back(name);
    }
    table.columns.assign(table.headers.size(), {});

    std::vector<std::size_t> bad_lines;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != table.headers.size()) {
            bad_lines.push_back(line_no);
            continue;
        }
        bool row_ok = true;
        std::vector<double> parsed(cells.size());
        for (std::size_t j = 0; j < cells.size(); ++j)
            if (!parse_cell(cells[j], parsed[j])) {
                row_ok = false;
                break;
            }
        if (!row_ok) {
            bad_lines.push_back(line_no);
            continue;
        }
        for (std::size_t j = 0; j < cells.size(); ++j) table.columns[j].push_back(parsed[j]);
        if (bad_lines.size() >= 20) break;
    }
    if (!bad_lines.empty())
        throw InputError("csv: '" + path +
                         "' has rows with missing or non-numeric cells at line(s) " +
                         join_lines(bad_lines));
    if (table.row_count() == 0) throw InputError("csv: '" + path + "' has no data rows");
    return table;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_unsigned(std::uint64_t v) { return std::to_string(v); }

void write_csv(const std::string& path, const Row& header, const std::vector<Row>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("csv: cannot write '" + path + "'");
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j) out << ',';
        out << header[j];
    }
    out << '\n';
    for (const Row& row : rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out << ',';
            out << row[j];
        }
        out << '\n';
    }
    if (!out) throw InputError("csv: write failed for '" + path + "'");
}

void write_numeric_csv(const std::string& path, const std::vector<std::string>& header,
                       const la::Matrix& values) {
    std::vector<Row> rows(values.rows());
    for (std::size_t i = 0; i < values.rows(); ++i) {
        rows[i].reserve(values.cols());
        for (std::size_t j = 0; j < values.cols(); ++j)
            rows[i].push_back(format_double(values(i, j)));
    }
    write_csv(path, header, rows);
}

} // namespace bkmr::csv
