#pragma once

// Rectangular result tables and their CSV / JSON serialisation.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace qwire {

using Cell = std::variant<std::int64_t, double, std::string>;

class ResultTable {
  public:
    explicit ResultTable(std::vector<std::string> columns);

    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<std::vector<Cell>>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }

    /// Throws std::invalid_argument when the row width does not match.
    void add_row(std::vector<Cell> row);

    /// Config echo, artefact version and per-experiment notes.
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    /// Kept out of `meta` so repeated runs serialise identically.
    double wall_seconds = 0.0;

  private:
    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
};

enum class Format { Csv, Json };

/// Header row plus data, RFC 4180 quoting, CRLF line ends, doubles at 17
/// significant digits.
std::string to_csv(const ResultTable& table);

/// {"meta": {...}, "columns": {name: [values...]}}.
std::string to_json(const ResultTable& table);

/// Writes the table to `path`. CSV output gets a `<path>.meta.json` sidecar
/// holding the metadata; both formats get `<path>.timing.json` for the wall
/// time. Throws std::runtime_error naming the path on I/O failure.
void emit(const ResultTable& table, const std::string& path, Format format);

std::string format_double(double v);

}  // namespace qwire
