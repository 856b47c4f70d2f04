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
#include <string_view>
#include <vector>

namespace rfw::dsl {

/// One LTE downlink band. Frequencies are kept in tenths of MHz so that the
/// channel raster (100 kHz) is exact.
struct BandEntry {
    int band = 0;
    std::int64_t earfcn_low = 0;
    std::int64_t earfcn_high = 0;
    std::int64_t f_dl_low_tenths = 0;
    std::int64_t n_offs_dl = 0;

    double f_dl_low_mhz() const { return static_cast<double>(f_dl_low_tenths) / 10.0; }
    bool operator==(const BandEntry&) const = default;
};

class BandTable {
public:
    BandTable() = default;
    /// The versioned table shipped with the library.
    static const BandTable& shipped();
    /// CSV with header band,earfcn_low,earfcn_high,f_dl_low_mhz,n_offs_dl. Throws ConfigSyntax.
    static BandTable parse_csv(std::string_view text);

    /// Adds bands, replacing entries with the same band number.
    void extend(const BandTable& other);
    const std::vector<BandEntry>& entries() const noexcept { return entries_; }

    const BandEntry* find_band(int band) const;
    const BandEntry* find_by_earfcn(std::int64_t earfcn) const;
    /// Bands whose downlink raster contains the frequency.
    std::vector<const BandEntry*> bands_for_mhz(double mhz) const;

    /// F_DL = f_dl_low + 0.1 (N_DL - n_offs_dl). Throws UnknownBand.
    double earfcn_to_mhz(std::int64_t earfcn) const;
    /// Inverse within the hinted band; without a hint the frequency must fall in
    /// exactly one band. Throws UnknownBand, AmbiguousBand.
    std::int64_t mhz_to_earfcn(double mhz, std::optional<int> band_hint = std::nullopt) const;

private:
    std::vector<BandEntry> entries_;
};

}  // namespace rfw::dsl
