#include "wpdiag/report.hpp"

#include <charconv>
#include <fstream>

#include "wpdiag/errors.hpp"

namespace wpdiag {

std::string format_real(double x) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc()) throw Error(ErrorCode::InvalidConfig, "float formatting failed");
    return std::string(buf, end);
}

void Table::add(std::vector<nlohmann::ordered_json> row) {
    if (row.size() != columns.size()) throw Error(ErrorCode::InvalidConfig, "row width differs from the header");
    rows.push_back(std::move(row));
}

namespace {

std::string csv_cell(const nlohmann::ordered_json& v) {
    if (v.is_number_float()) return format_real(v.get<double>());
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
    if (v.is_null()) return "";
    const std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + "\"";
}

}  // namespace

std::string to_csv(const Table& table) {
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + table.columns[i];
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_cell(row[i]);
        out += '\n';
    }
    return out;
}

nlohmann::ordered_json to_json(const Table& table) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = row[i];
        out.push_back(std::move(obj));
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::InvalidConfig, "cannot open " + path + " for writing");
    f << content;
    if (!f) throw Error(ErrorCode::InvalidConfig, "write failed for " + path);
}

}  // namespace wpdiag
