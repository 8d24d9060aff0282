#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qflow {

/// 17 significant digits, '.' decimal separator, locale independent.
std::string csv_number(double v);

/// RFC-4180 quoting when the field contains a comma, quote or newline.
std::string csv_field(const std::string& s);

void write_csv_row(std::ostream& os, const std::vector<std::string>& fields);

}  // namespace qflow
