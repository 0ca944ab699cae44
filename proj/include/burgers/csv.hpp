#pragma once

#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace burgers {

// Shortest round-trip is not needed; 17 significant digits always.
std::string format_double(double value);

// RFC-4180 writer: comma separated, CRLF-free, quoting only when needed.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    void header(std::initializer_list<std::string_view> names);
    void header(const std::vector<std::string>& names);

    CsvWriter& cell(double value);
    CsvWriter& cell(long long value);
    CsvWriter& cell(int value) { return cell(static_cast<long long>(value)); }
    CsvWriter& cell(std::size_t value) { return cell(static_cast<long long>(value)); }
    CsvWriter& cell(std::string_view text);
    CsvWriter& cell(const char* text) { return cell(std::string_view(text)); }
    void end_row();

private:
    void separator();

    std::ostream& os_;
    bool row_open_ = false;
};

}  // namespace burgers
