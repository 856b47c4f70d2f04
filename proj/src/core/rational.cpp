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

#include "rfw/core/rational.hpp"

#include <charconv>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "rfw/core/error.hpp"

namespace rfw {

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den <= 0 || num < 0) throw Error(ErrorCode::InvalidArgument, fmt::format("invalid fraction {}/{}", num, den));
    const std::int64_t g = std::gcd(num, den);
    num_ = num / g;
    den_ = den / g;
}

Rational Rational::parse(std::string_view text) {
    auto fail = [&] { return Error(ErrorCode::InvalidArgument, fmt::format("invalid fraction '{}'", text)); };
    if (text.empty()) throw fail();
    bool percent = false;
    if (text.back() == '%') {
        percent = true;
        text.remove_suffix(1);
    }
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        std::int64_t n = 0, d = 0;
        auto r1 = std::from_chars(text.data(), text.data() + slash, n);
        auto r2 = std::from_chars(text.data() + slash + 1, text.data() + text.size(), d);
        if (r1.ec != std::errc{} || r2.ec != std::errc{} || r1.ptr != text.data() + slash ||
            r2.ptr != text.data() + text.size())
            throw fail();
        return percent ? Rational{n, d * 100} : Rational{n, d};
    }
    std::int64_t num = 0, den = 1;
    bool seen_dot = false, any = false;
    for (char c : text) {
        if (c == '.') {
            if (seen_dot) throw fail();
            seen_dot = true;
            continue;
        }
        if (c < '0' || c > '9') throw fail();
        if (num > 100'000'000'000'000LL) throw fail();
        num = num * 10 + (c - '0');
        if (seen_dot) den *= 10;
        any = true;
    }
    if (!any) throw fail();
    return percent ? Rational{num, den * 100} : Rational{num, den};
}

Rational Rational::from_double(double v) {
    if (!std::isfinite(v) || v < 0) throw Error(ErrorCode::InvalidArgument, fmt::format("invalid fraction {}", v));
    return Rational{std::llround(v * 1e9), 1'000'000'000};
}

namespace {
__extension__ typedef __int128 wide_int;
}

std::strong_ordering Rational::operator<=>(const Rational& o) const noexcept {
    const wide_int l = static_cast<wide_int>(num_) * o.den_;
    const wide_int r = static_cast<wide_int>(o.num_) * den_;
    if (l < r) return std::strong_ordering::less;
    if (l > r) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::string Rational::to_string() const { return fmt::format("{}/{}", num_, den_); }

}  // namespace rfw
