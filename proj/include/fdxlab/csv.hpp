#pragma once

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace fdxlab {

/// 17 significant digits, so every double round-trips.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

/// Minimal CSV emitter: one header, numeric or text rows, `# key: value`
/// comment lines. Every file ends with a `# status:` line.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    void header(const std::vector<std::string>& cols) { row_text(cols); }

    void row(const std::vector<double>& vals) {
        for (std::size_t i = 0; i < vals.size(); ++i) {
            if (i) os_ << ',';
            os_ << format_double(vals[i]);
        }
        os_ << '\n';
    }

    void row_text(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os_ << ',';
            os_ << cells[i];
        }
        os_ << '\n';
    }

    void comment(std::string_view key, std::string_view value) { os_ << "# " << key << ": " << value << '\n'; }

    void status(std::string_view value) { comment("status", value); }

private:
    std::ostream& os_;
};

} // namespace fdxlab
