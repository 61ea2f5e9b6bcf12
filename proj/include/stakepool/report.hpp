#pragma once

#include "stakepool/scalar.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace stakepool {

enum class Format { table, csv };

Format parse_format(std::string_view name);

// Rationals as p/q in table mode; 12 significant digits in CSV and for floats.
std::string format_number(const Scalar& x, Format format);

struct Table {
    std::string title;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

std::string csv_field(const std::string& field);
void write_table(std::ostream& out, const Table& table, Format format);

}  // namespace stakepool
