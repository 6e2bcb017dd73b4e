#pragma once

#include <charconv>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>

namespace cavssh {

/// Locale-independent rendering with 17 significant digits.
inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    if (res.ec != std::errc{}) return "nan";
    return {buf, res.ptr};
}

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void header(std::initializer_list<std::string_view> names) {
        bool first = true;
        for (auto name : names) {
            if (!first) out_ << ',';
            out_ << name;
            first = false;
        }
        out_ << '\n';
    }

    CsvWriter& cell(double x) { return raw(format_double(x)); }
    CsvWriter& cell(std::string_view s) { return raw(s); }
    CsvWriter& cell(bool b) { return raw(b ? "1" : "0"); }
    CsvWriter& cell(std::size_t n) { return raw(std::to_string(n)); }

    void end_row() {
        out_ << '\n';
        fresh_ = true;
    }

private:
    CsvWriter& raw(std::string_view s) {
        if (!fresh_) out_ << ',';
        out_ << s;
        fresh_ = false;
        return *this;
    }

    std::ostream& out_;
    bool fresh_ = true;
};

}  // namespace cavssh
