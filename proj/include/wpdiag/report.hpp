#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace wpdiag {

// Shortest decimal that parses back to the same double.
std::string format_real(double x);

// Column-named table; cells are numbers, integers, booleans or strings.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<nlohmann::ordered_json>> rows;

    void add(std::vector<nlohmann::ordered_json> row);
};

// Header line then one line per row; floats via format_real, booleans as 0/1,
// strings quoted only when they contain a comma or a quote.
std::string to_csv(const Table& table);
// Array of objects keyed by column name.
nlohmann::ordered_json to_json(const Table& table);

// Throws InvalidConfig when the file cannot be written.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace wpdiag
