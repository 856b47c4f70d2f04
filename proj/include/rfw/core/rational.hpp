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
#include <string>
#include <string_view>

namespace rfw {

/// Exact non-negative fraction; used for side-effect budgets so that 2/20 <= 0.10 holds exactly.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den);

    /// Parses "0.10", "1", "3/40", "10%". Throws InvalidArgument.
    static Rational parse(std::string_view text);
    /// Nearest fraction with denominator 10^9 (reduced); enough for JSON-provided budgets.
    static Rational from_double(double v);

    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }
    double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

    std::strong_ordering operator<=>(const Rational& o) const noexcept;
    bool operator==(const Rational& o) const noexcept { return (*this <=> o) == 0; }

    std::string to_string() const;

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace rfw
