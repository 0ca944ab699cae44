#include "burgers/csv.hpp"

#include <cmath>
#include <cstdio>

namespace burgers {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void CsvWriter::header(std::initializer_list<std::string_view> names) {
    for (auto n : names) cell(n);
    end_row();
}

void CsvWriter::header(const std::vector<std::string>& names) {
    for (const auto& n : names) cell(std::string_view(n));
    end_row();
}

void CsvWriter::separator() {
    if (row_open_) os_ << ',';
    row_open_ = true;
}

CsvWriter& CsvWriter::cell(double value) {
    separator();
    os_ << format_double(value);
    return *this;
}

CsvWriter& CsvWriter::cell(long long value) {
    separator();
    os_ << value;
    return *this;
}

CsvWriter& CsvWriter::cell(std::string_view text) {
    separator();
    if (text.find_first_of(",\"\n\r") == std::string_view::npos) {
        os_ << text;
        return *this;
    }
    os_ << '"';
    for (char c : text) {
        if (c == '"') os_ << '"';
        os_ << c;
    }
    os_ << '"';
    return *this;
}

void CsvWriter::end_row() {
    os_ << '\n';
    row_open_ = false;
}

}  // namespace burgers
