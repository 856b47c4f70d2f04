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

#include "rfw/dsl/bands.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "rfw/core/csv.hpp"
#include "rfw/core/error.hpp"

namespace rfw::resources {
std::string_view lte_bands_csv();
}

namespace rfw::dsl {
namespace {

std::int64_t integer_field(const Table& t, std::size_t row, std::string_view column) {
    const auto v = t.at(row, t.column_index(column)).as_double();
    if (!v || std::floor(*v) != *v)
        throw Error(ErrorCode::ConfigSyntax, fmt::format("band table row {}: '{}' must be an integer", row + 1, column));
    return static_cast<std::int64_t>(*v);
}

}  // namespace

const BandTable& BandTable::shipped() {
    static const BandTable table = parse_csv(resources::lte_bands_csv());
    return table;
}

BandTable BandTable::parse_csv(std::string_view text) {
    Table t;
    try {
        t = ingest_csv(text, "bands");
    } catch (const Error& e) {
        throw Error(ErrorCode::ConfigSyntax, fmt::format("band table: {}", e.what()));
    }
    BandTable out;
    try {
        for (std::size_t row = 0; row < t.row_count(); ++row) {
            BandEntry e;
            e.band = static_cast<int>(integer_field(t, row, "band"));
            e.earfcn_low = integer_field(t, row, "earfcn_low");
            e.earfcn_high = integer_field(t, row, "earfcn_high");
            e.n_offs_dl = integer_field(t, row, "n_offs_dl");
            const auto f = t.at(row, t.column_index("f_dl_low_mhz")).as_double();
            if (!f) throw Error(ErrorCode::ConfigSyntax, fmt::format("band table row {}: bad frequency", row + 1));
            e.f_dl_low_tenths = std::llround(*f * 10.0);
            if (e.earfcn_low > e.earfcn_high)
                throw Error(ErrorCode::ConfigSyntax, fmt::format("band {}: earfcn_low > earfcn_high", e.band));
            out.entries_.push_back(e);
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::UnknownColumn) throw Error(ErrorCode::ConfigSyntax, e.what());
        throw;
    }
    return out;
}

void BandTable::extend(const BandTable& other) {
    for (const auto& e : other.entries_) {
        auto it = std::find_if(entries_.begin(), entries_.end(), [&](const BandEntry& x) { return x.band == e.band; });
        if (it != entries_.end())
            *it = e;
        else
            entries_.push_back(e);
    }
}

const BandEntry* BandTable::find_band(int band) const {
    for (const auto& e : entries_)
        if (e.band == band) return &e;
    return nullptr;
}

const BandEntry* BandTable::find_by_earfcn(std::int64_t earfcn) const {
    for (const auto& e : entries_)
        if (earfcn >= e.earfcn_low && earfcn <= e.earfcn_high) return &e;
    return nullptr;
}

std::vector<const BandEntry*> BandTable::bands_for_mhz(double mhz) const {
    std::vector<const BandEntry*> out;
    const double tenths = mhz * 10.0;
    const std::int64_t t = std::llround(tenths);
    if (std::abs(tenths - static_cast<double>(t)) > 1e-6) return out;
    for (const auto& e : entries_) {
        const std::int64_t n = e.n_offs_dl + (t - e.f_dl_low_tenths);
        if (n >= e.earfcn_low && n <= e.earfcn_high) out.push_back(&e);
    }
    return out;
}

double BandTable::earfcn_to_mhz(std::int64_t earfcn) const {
    const BandEntry* e = find_by_earfcn(earfcn);
    if (!e) throw Error(ErrorCode::UnknownBand, fmt::format("EARFCN {} is outside every known band", earfcn));
    return static_cast<double>(e->f_dl_low_tenths + (earfcn - e->n_offs_dl)) / 10.0;
}

std::int64_t BandTable::mhz_to_earfcn(double mhz, std::optional<int> band_hint) const {
    const auto bands = bands_for_mhz(mhz);
    const BandEntry* chosen = nullptr;
    if (band_hint) {
        for (const auto* b : bands)
            if (b->band == *band_hint) chosen = b;
        if (!chosen)
            throw Error(ErrorCode::UnknownBand, fmt::format("{} MHz is not a downlink channel of band {}",
                                                            format_number(mhz), *band_hint));
    } else if (bands.size() == 1) {
        chosen = bands.front();
    } else if (bands.empty()) {
        throw Error(ErrorCode::UnknownBand, fmt::format("{} MHz is not in any known band", format_number(mhz)));
    } else {
        std::string names;
        for (const auto* b : bands) names += (names.empty() ? "" : ", ") + std::to_string(b->band);
        throw Error(ErrorCode::AmbiguousBand,
                    fmt::format("{} MHz lies in bands {}; give a band hint", format_number(mhz), names));
    }
    return chosen->n_offs_dl + (std::llround(mhz * 10.0) - chosen->f_dl_low_tenths);
}

}  // namespace rfw::dsl
