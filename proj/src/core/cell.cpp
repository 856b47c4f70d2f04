/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#include "rfw/core/cell.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "rfw/core/timestamp.hpp"

namespace rfw {

std::optional<double> Cell::as_double() const noexcept {
    if (const auto* i = std::get_if<std::int64_t>(&value_)) return static_cast<double>(*i);
    if (const auto* d = std::get_if<double>(&value_)) return *d;
    return std::nullopt;
}

std::string Cell::to_string() const {
    switch (kind()) {
        case CellKind::Null: return "";
        case CellKind::Integer: return std::to_string(as_integer());
        case CellKind::Number: return format_number(as_number());
        case CellKind::Text: return as_text();
        case CellKind::Timestamp: return format_iso8601_ms(as_timestamp());
    }
    return "";
}

bool Cell::key_equals(const Cell& other) const noexcept {
    if (is_numeric() && other.is_numeric()) return *as_double() == *other.as_double();
    return *this == other;
}

std::strong_ordering compare_cells(const Cell& a, const Cell& b) {
    auto rank = [](const Cell& c) {
        switch (c.kind()) {
            case CellKind::Null: return 0;
            case CellKind::Integer:
            case CellKind::Number: return 1;
            case CellKind::Text: return 2;
            case CellKind::Timestamp: return 3;
        }
        return 0;
    };
    if (auto c = rank(a) <=> rank(b); c != 0) return c;
    switch (a.kind()) {
        case CellKind::Null: return std::strong_ordering::equal;
        case CellKind::Integer:
        case CellKind::Number: {
            if (a.kind() == CellKind::Integer && b.kind() == CellKind::Integer) return a.as_integer() <=> b.as_integer();
            double x = *a.as_double(), y = *b.as_double();
            if (x < y) return std::strong_ordering::less;
            if (x > y) return std::strong_ordering::greater;
            // Integer before Number at equal value keeps the order total.
            return static_cast<int>(a.kind()) <=> static_cast<int>(b.kind());
        }
        case CellKind::Text: return a.as_text() <=> b.as_text();
        case CellKind::Timestamp: return a.as_timestamp() <=> b.as_timestamp();
    }
    return std::strong_ordering::equal;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    std::string s(buf.data(), end);
    if (s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
}

}  // namespace rfw
