/**
 * @file bands.hpp
 * @brief Band-structure containers, gap detection and CSV export shared by the
 *        photonic and phononic solvers.
 */
#pragma once

#include "symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace shamrock {

enum class Polarization { TE, TM, elastic };

inline std::string to_string(Polarization p) {
    switch (p) {
        case Polarization::TE: return "TE";
        case Polarization::TM: return "TM";
        case Polarization::elastic: return "elastic";
    }
    return "?";
}

inline constexpr double kSpeedOfLight = 299792458.0;

struct BandStructure {
    KPath kpath;
    std::vector<std::vector<double>> frequencies;  ///< [k][band], normalized
    Polarization polarization = Polarization::TE;
    std::vector<double> light_line;                ///< empty for elastic bands
    double unit_factor = 1.0;                      ///< normalized -> physical
    std::string unit = "THz";
    double n_eff = 0.0;
    bool n_eff_fallback = false;
    std::string warning;
    std::size_t basis_size = 0;

    [[nodiscard]] std::size_t n_k() const { return frequencies.size(); }
    [[nodiscard]] std::size_t n_bands() const { return frequencies.empty() ? 0 : frequencies.front().size(); }
    [[nodiscard]] double band_min(std::size_t b) const {
        double v = std::numeric_limits<double>::infinity();
        for (const auto& f : frequencies) v = std::min(v, f[b]);
        return v;
    }
    [[nodiscard]] double band_max(std::size_t b) const {
        double v = -std::numeric_limits<double>::infinity();
        for (const auto& f : frequencies) v = std::max(v, f[b]);
        return v;
    }
};

struct Gap {
    double lower = 0.0;
    double upper = 0.0;
    double midgap = 0.0;
    double ratio = 0.0;
    double lower_phys = 0.0;
    double upper_phys = 0.0;
    double midgap_phys = 0.0;
    int band_below = -1;
    int band_above = -1;
};

struct GapReport {
    std::vector<Gap> gaps;
    std::string unit;
    double unit_factor = 1.0;

    [[nodiscard]] bool empty() const { return gaps.empty(); }
    /// Widest gap by gap-to-midgap ratio.
    [[nodiscard]] std::optional<Gap> largest() const {
        if (gaps.empty()) return std::nullopt;
        return *std::max_element(gaps.begin(), gaps.end(),
                                 [](const Gap& a, const Gap& b) { return a.ratio < b.ratio; });
    }
};

inline Gap make_gap(double lo, double hi, int below, int above, double factor) {
    Gap g;
    g.lower = lo;
    g.upper = hi;
    g.midgap = 0.5 * (lo + hi);
    g.ratio = (hi - lo) / g.midgap;
    g.lower_phys = lo * factor;
    g.upper_phys = hi * factor;
    g.midgap_phys = g.midgap * factor;
    g.band_below = below;
    g.band_above = above;
    return g;
}

/**
 * @brief Gaps between consecutive sorted bands: min_k band i+1 > max_k band i.
 *
 * With a window, only gaps overlapping [first, second] are kept.
 */
inline GapReport find_gaps(const BandStructure& bands, std::optional<std::pair<double, double>> window = std::nullopt) {
    GapReport r;
    r.unit = bands.unit;
    r.unit_factor = bands.unit_factor;
    const std::size_t nb = bands.n_bands();
    for (std::size_t i = 0; i + 1 < nb; ++i) {
        const double lo = bands.band_max(i);
        const double hi = bands.band_min(i + 1);
        if (!(hi > lo)) continue;
        if (window && (hi < window->first || lo > window->second)) continue;
        r.gaps.push_back(make_gap(lo, hi, static_cast<int>(i), static_cast<int>(i + 1), bands.unit_factor));
    }
    return r;
}

/**
 * @brief Frequency intervals not covered by any band over the sampled k set.
 *
 * Bands need not be sorted or belong to one branch family: the covered set is
 * the union of every band's [min, max] range.
 */
inline GapReport find_complete_gap(const BandStructure& bands) {
    GapReport r;
    r.unit = bands.unit;
    r.unit_factor = bands.unit_factor;
    struct Range {
        double lo, hi;
        int band;
    };
    std::vector<Range> ranges;
    for (std::size_t b = 0; b < bands.n_bands(); ++b)
        ranges.push_back({bands.band_min(b), bands.band_max(b), static_cast<int>(b)});
    std::sort(ranges.begin(), ranges.end(), [](const Range& a, const Range& b) {
        return a.lo < b.lo || (a.lo == b.lo && a.band < b.band);
    });
    if (ranges.empty()) return r;
    double reach = ranges.front().hi;
    int reach_band = ranges.front().band;
    for (std::size_t i = 1; i < ranges.size(); ++i) {
        if (ranges[i].lo > reach) r.gaps.push_back(make_gap(reach, ranges[i].lo, reach_band, ranges[i].band, bands.unit_factor));
        if (ranges[i].hi > reach) {
            reach = ranges[i].hi;
            reach_band = ranges[i].band;
        }
    }
    return r;
}

/// Largest relative change between two band sets on the same k samples, over the lowest n bands.
inline double max_relative_change(const BandStructure& a, const BandStructure& b, std::size_t n) {
    double scale = 0.0;
    for (const auto& f : b.frequencies)
        for (double v : f) scale = std::max(scale, v);
    double worst = 0.0;
    for (std::size_t k = 0; k < std::min(a.n_k(), b.n_k()); ++k)
        for (std::size_t i = 0; i < std::min({n, a.n_bands(), b.n_bands()}); ++i) {
            const double den = std::max(b.frequencies[k][i], 1e-3 * scale);
            worst = std::max(worst, std::abs(a.frequencies[k][i] - b.frequencies[k][i]) / den);
        }
    return worst;
}

/// (k_index, path_length, band_index, freq_normalized, freq_<unit>[, above_light_line]).
inline void write_bands_csv(const BandStructure& bands, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open " + file.string());
    const bool ll = !bands.light_line.empty();
    out << "k_index,path_length,band_index,freq_normalized,freq_" << bands.unit;
    if (ll) out << ",above_light_line";
    out << '\n' << std::setprecision(12);
    for (std::size_t k = 0; k < bands.n_k(); ++k)
        for (std::size_t b = 0; b < bands.n_bands(); ++b) {
            const double f = bands.frequencies[k][b];
            out << k << ',' << bands.kpath.samples[k].path_length << ',' << b << ',' << f << ','
                << f * bands.unit_factor;
            if (ll) out << ',' << (f > bands.light_line[k] ? 1 : 0);
            out << '\n';
        }
    if (!out) throw std::runtime_error("write failed for " + file.string());
}

}  // namespace shamrock
