#include "stakepool/report.hpp"

#include "stakepool/errors.hpp"

#include <algorithm>

namespace stakepool {

Format parse_format(std::string_view name) {
    if (name == "table") return Format::table;
    if (name == "csv") return Format::csv;
    throw InputError("unknown format '" + std::string(name) + "'");
}

std::string format_number(const Scalar& x, Format format) {
    if (format == Format::table && x.is_exact()) return x.str();
    return x.decimal(12);
}

std::string csv_field(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void write_table(std::ostream& out, const Table& table, Format format) {
    if (format == Format::csv) {
        if (!table.title.empty()) out << "# " << table.title << "\r\n";
        auto line = [&](const std::vector<std::string>& row) {
            for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
            out << "\r\n";
        };
        line(table.header);
        for (const auto& row : table.rows) line(row);
        out << "\r\n";
        return;
    }
    std::vector<std::size_t> width(table.header.size(), 0);
    auto measure = [&](const std::vector<std::string>& row) {
        if (row.size() > width.size()) width.resize(row.size(), 0);
        for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    };
    measure(table.header);
    for (const auto& row : table.rows) measure(row);
    auto line = [&](const std::vector<std::string>& row) {
        std::string text;
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) text += "  ";
            text += row[i];
            if (i + 1 < row.size()) text.append(width[i] - row[i].size(), ' ');
        }
        out << text << '\n';
    };
    if (!table.title.empty()) out << table.title << '\n';
    line(table.header);
    std::size_t total = 0;
    for (std::size_t i = 0; i < width.size(); ++i) total += width[i] + (i ? 2 : 0);
    out << std::string(total, '-') << '\n';
    for (const auto& row : table.rows) line(row);
    out << '\n';
}

}  // namespace stakepool
