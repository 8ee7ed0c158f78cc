#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace fzcli {

// A scalar in an output record. Doubles print with %.10g in text and with
// round-trip precision in CSV and JSON.
using Cell = std::variant<std::string, double, std::int64_t, bool>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

struct Section {
    std::string name;
    std::vector<std::pair<std::string, Cell>> fields;  // rendered before the table
    Table table;
    std::vector<std::string> notes;
};

struct Document {
    std::string command;
    std::vector<Section> sections;

    Section& add(std::string name);
};

enum class Format { Text, Csv, Json };

Format parse_format(const std::string& s);
std::string render(const Document& doc, Format format);

}  // namespace fzcli
