#include "qwire/table.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qwire {

namespace {

std::string quote_csv(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

std::string cell_text(const Cell& c) {
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    return std::get<std::string>(c);
}

nlohmann::ordered_json cell_json(const Cell& c) {
    if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
    if (const auto* d = std::get_if<double>(&c)) {
        if (!std::isfinite(*d)) return nullptr;
        return *d;
    }
    return std::get<std::string>(c);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ResultTable::ResultTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
    if (columns_.empty()) throw std::invalid_argument("a table needs at least one column");
}

void ResultTable::add_row(std::vector<Cell> row) {
    if (row.size() != columns_.size()) {
        throw std::invalid_argument("row has " + std::to_string(row.size()) + " cells, table has " +
                                    std::to_string(columns_.size()) + " columns");
    }
    rows_.push_back(std::move(row));
}

std::string to_csv(const ResultTable& table) {
    std::string out;
    auto line = [&out](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out += ',';
            out += quote_csv(fields[i]);
        }
        out += "\r\n";
    };
    line(table.columns());
    for (const auto& row : table.rows()) {
        std::vector<std::string> fields;
        fields.reserve(row.size());
        for (const auto& c : row) fields.push_back(cell_text(c));
        line(fields);
    }
    return out;
}

std::string to_json(const ResultTable& table) {
    nlohmann::ordered_json doc;
    doc["meta"] = table.meta;
    nlohmann::ordered_json cols = nlohmann::ordered_json::object();
    for (std::size_t j = 0; j < table.columns().size(); ++j) {
        nlohmann::ordered_json values = nlohmann::ordered_json::array();
        for (const auto& row : table.rows()) values.push_back(cell_json(row[j]));
        cols[table.columns()[j]] = std::move(values);
    }
    doc["columns"] = std::move(cols);
    return doc.dump(2) + "\n";
}

void emit(const ResultTable& table, const std::string& path, Format format) {
    if (format == Format::Csv) {
        write_file(path, to_csv(table));
        write_file(path + ".meta.json", table.meta.dump(2) + "\n");
    } else {
        write_file(path, to_json(table));
    }
    nlohmann::ordered_json timing;
    timing["wall_seconds"] = table.wall_seconds;
    write_file(path + ".timing.json", timing.dump(2) + "\n");
}

}  // namespace qwire
