#pragma once

#include <string>
#include <vector>

#include "bkmr/linalg.hpp"

// Strict CSV handling: comma separated, UTF-8, mandatory header row, '.'
// decimal separator, no quoting. Numbers are written with shortest
// round-trip formatting so written files re-read to identical doubles.

namespace bkmr::csv {

struct NumericTable {
    std::vector<std::string> headers;
    std::vector<la::Vector> columns; // one per header, equal lengths

    std::size_t row_count() const { return columns.empty() ? 0 : columns[0].size(); }
    // index of a named column; throws InputError when absent
    std::size_t column(const std::string& name) const;
};

// Rejects missing cells, non-numeric cells, and ragged rows with the
// offending line numbers in the message.
NumericTable read_numeric_csv(const std::string& path);

std::string format_double(double v);     // shortest round-trip
std::string format_unsigned(std::uint64_t v);

using Row = std::vector<std::string>;
void write_csv(const std::string& path, const Row& header, const std::vector<Row>& rows);

// header + row-major numeric body
void write_numeric_csv(const std::string& path, const std::vector<std::string>& header,
                       const la::Matrix& values);

} // namespace bkmr::csv
