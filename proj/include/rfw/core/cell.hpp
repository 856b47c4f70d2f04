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

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace rfw {

/// Nanoseconds since the Unix epoch, UTC.
struct Timestamp {
    std::int64_t ns = 0;
    auto operator<=>(const Timestamp&) const = default;
};

enum class CellKind { Null, Integer, Number, Text, Timestamp };

class Cell {
public:
    using Storage = std::variant<std::monostate, std::int64_t, double, std::string, Timestamp>;

    Cell() = default;

    static Cell null() { return Cell{}; }
    static Cell integer(std::int64_t v) { return Cell{Storage{v}}; }
    static Cell number(double v) { return Cell{Storage{v}}; }
    static Cell text(std::string v) { return Cell{Storage{std::move(v)}}; }
    static Cell timestamp(Timestamp v) { return Cell{Storage{v}}; }

    CellKind kind() const noexcept { return static_cast<CellKind>(value_.index()); }
    bool is_null() const noexcept { return kind() == CellKind::Null; }
    bool is_numeric() const noexcept { return kind() == CellKind::Integer || kind() == CellKind::Number; }

    /// Integer or Number widened to double; nullopt otherwise.
    std::optional<double> as_double() const noexcept;

    std::int64_t as_integer() const { return std::get<std::int64_t>(value_); }
    double as_number() const { return std::get<double>(value_); }
    const std::string& as_text() const { return std::get<std::string>(value_); }
    Timestamp as_timestamp() const { return std::get<Timestamp>(value_); }

    const Storage& storage() const noexcept { return value_; }

    /// Display form; CSV export uses its own formatting.
    std::string to_string() const;

    bool operator==(const Cell& other) const = default;

    /// Equality used for join keys: numbers compare by value across Integer/Number.
    bool key_equals(const Cell& other) const noexcept;

private:
    explicit Cell(Storage v) : value_(std::move(v)) {}
    Storage value_;
};

/// Total order over cells for deterministic grouping: Null < numeric < Text < Timestamp.
std::strong_ordering compare_cells(const Cell& a, const Cell& b);

/// Shortest round-trip decimal form of a double, always carrying a '.' or exponent
/// so that re-parsing yields a Number rather than an Integer.
std::string format_number(double v);

}  // namespace rfw
