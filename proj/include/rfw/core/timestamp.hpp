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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "rfw/core/cell.hpp"

namespace rfw {

/// Strictly positive time span; the bucket width of a temporal grid.
class Duration {
public:
    Duration() = default;  // one second
    /// Throws NonPositiveDelta when ns <= 0.
    explicit Duration(std::int64_t ns);

    static Duration from_seconds(std::int64_t s) { return Duration{s * 1'000'000'000}; }
    static Duration from_millis(std::int64_t ms) { return Duration{ms * 1'000'000}; }

    std::int64_t ns() const noexcept { return ns_; }
    auto operator<=>(const Duration&) const = default;

private:
    std::int64_t ns_ = 1'000'000'000;
};

/// "1s", "100ms", "250us", "7ns", "2min". Throws InvalidArgument/NonPositiveDelta.
Duration parse_duration(std::string_view text);
/// Largest exact unit: 1s, 100ms, 60s, ...
std::string format_duration(Duration d);

/// Floor of t onto the grid {k * delta}.
std::int64_t floor_to(std::int64_t t, std::int64_t delta) noexcept;
inline Timestamp floor_to(Timestamp t, Duration d) noexcept { return Timestamp{floor_to(t.ns, d.ns())}; }

/// ISO 8601: YYYY-MM-DD, optional [T ]HH:MM[:SS[.fraction]], optional Z or +HH:MM.
std::optional<Timestamp> parse_iso8601(std::string_view text);

/// Epoch magnitude disambiguation: |v| < 1e11 seconds, < 1e14 milliseconds, else nanoseconds.
std::optional<Timestamp> timestamp_from_epoch(double value);

/// YYYY-MM-DDTHH:MM:SS.mmmZ (floored to the millisecond).
std::string format_iso8601_ms(Timestamp t);

}  // namespace rfw
