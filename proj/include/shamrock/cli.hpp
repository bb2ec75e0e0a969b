/**
 * @file cli.hpp
 * @brief Subcommands bands / defect / cascade / sweep. Each writes into a
 *        private temp directory that is renamed onto out_dir only on success.
 */
#pragma once

#include "bands.hpp"
#include "cascade.hpp"
#include "config.hpp"
#include "defects.hpp"
#include "phononic.hpp"
#include "photonic.hpp"
#include "svg.hpp"
#include "symmetry.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace shamrock {

namespace fs = std::filesystem;

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNumerical = 2 };

enum class Domain { photonic, phononic };

inline Domain parse_domain(const std::string& s) {
    if (s == "photonic") return Domain::photonic;
    if (s == "phononic") return Domain::phononic;
    throw ConfigError("domain must be 'photonic' or 'phononic'");
}

struct RunContext {
    bool quiet = false;
    void log(const std::string& msg) const {
        if (!quiet) std::cerr << msg << '\n';
    }
    void warn(const std::string& msg) const { std::cerr << "warning: " << msg << '\n'; }
};

/// What a subcommand produced; the sweep driver reads the optional payloads.
struct CommandOutput {
    std::vector<std::string> files;
    std::optional<BandStructure> bands;
    std::optional<WaveguideBands> waveguide;
    std::optional<CavityResult> cavity;
    json summary;
};

namespace cli_detail {

inline void write_json(const json& j, const fs::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + file.string());
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for " + file.string());
}

inline json gap_json(const Gap& g) {
    return {{"lower", g.lower},           {"upper", g.upper},           {"midgap", g.midgap},
            {"gap_to_midgap", g.ratio},   {"lower_phys", g.lower_phys}, {"upper_phys", g.upper_phys},
            {"midgap_phys", g.midgap_phys}, {"band_below", g.band_below}, {"band_above", g.band_above}};
}

inline json gaps_json(const GapReport& r) {
    json a = json::array();
    for (const auto& g : r.gaps) a.push_back(gap_json(g));
    return a;
}

inline double finite_or(double v, double fallback) { return std::isfinite(v) ? v : fallback; }

inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline const GeometryConfig& need_geometry(const RunConfig& rc) {
    if (!rc.geometry) throw ConfigError("missing 'geometry' block");
    return *rc.geometry;
}

inline DomainMaterial need_material(const RunConfig& rc, Domain d) {
    if (d == Domain::photonic) {
        if (!rc.photonic) throw ConfigError("missing 'photonic' block");
        return *rc.photonic;
    }
    if (!rc.elastic) throw ConfigError("missing 'elastic' block");
    return *rc.elastic;
}

}  // namespace cli_detail

inline CommandOutput cmd_bands(const RunConfig& rc, Domain domain, const fs::path& dir, const RunContext& ctx) {
    using namespace cli_detail;
    const auto& g = need_geometry(rc);
    const auto material = need_material(rc, domain);
    const auto lattice = g.lattice();
    const auto cell = build_unit_cell(lattice, g.hole, g.resolution);
    const auto images = domain == Domain::photonic ? cell_path_images(cell)
                                                   : elastic_path_images(cell, std::get<ElasticMaterial>(material));
    // the symmetries the spectrum actually has decide how many images of the path are needed
    const auto kpath = extended_path(lattice, irbz_path(lattice, rc.solver.samples_per_segment), images);
    const auto t0 = std::chrono::steady_clock::now();
    CommandOutput out;
    BandStructure bs;
    json report;
    if (domain == Domain::photonic) {
        bs = band_structure(cell, std::get<PhotonicMaterial>(material), kpath, rc.solver.n_bands, rc.solver.cutoff, Polarization::TE);
        if (bs.n_eff_fallback) ctx.warn(bs.warning);
        const auto gaps = find_gaps(bs);
        report["gaps"] = gaps_json(gaps);
        report["n_eff"] = bs.n_eff;
        report["n_eff_fallback"] = bs.n_eff_fallback;
        report["reference_3d_range"] = {{"lower", 305.0}, {"upper", 383.0}, {"unit", "THz"},
                                        {"note", "3D membrane values; 2D effective-index model, comparison only"}};
        write_svg(band_diagram_svg(bs, &gaps, "TE bands"), dir / "bands.svg");
    } else {
        const auto& em = std::get<ElasticMaterial>(material);
        bs = elastic_band_structure(cell, em, kpath, rc.solver.n_bands, rc.solver.cutoff);
        const auto gaps = find_gaps(bs);
        const auto complete = find_complete_gap(bs);
        report["gaps"] = gaps_json(gaps);
        const auto big = complete.largest();
        report["complete_gap"] = big ? gap_json(*big) : json(nullptr);
        report["complete_gaps"] = gaps_json(complete);
        report["reference_3d_range"] = {{"lower", 4.7}, {"upper", 7.1}, {"unit", "GHz"},
                                        {"note", "3D membrane values; 2D plane-strain model, comparison only"}};
        write_svg(band_diagram_svg(bs, &complete, "elastic bands"), dir / "bands.svg");
    }
    if (rc.solver.full_zone_grid > 0) {
        const auto grid = kpath_from_points(zone_grid(lattice, rc.solver.full_zone_grid));
        json fz;
        fz["grid"] = rc.solver.full_zone_grid;
        if (domain == Domain::photonic) {
            const auto zb = band_structure(cell, std::get<PhotonicMaterial>(material), grid, rc.solver.n_bands,
                                           rc.solver.cutoff, Polarization::TE);
            fz["gaps"] = gaps_json(find_gaps(zb));
        } else {
            const auto zb = elastic_band_structure(cell, std::get<ElasticMaterial>(material), grid, rc.solver.n_bands,
                                                   rc.solver.cutoff);
            const auto big = find_complete_gap(zb).largest();
            fz["complete_gap"] = big ? gap_json(*big) : json(nullptr);
        }
        report["full_zone"] = fz;
    }
    ctx.log("bands: " + std::to_string(kpath.size()) + " k-points in " +
            std::to_string(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()) + " s");
    report["domain"] = domain == Domain::photonic ? "photonic" : "phononic";
    report["polarization"] = to_string(bs.polarization);
    report["unit"] = bs.unit;
    report["unit_factor"] = bs.unit_factor;
    report["cutoff"] = rc.solver.cutoff;
    report["path_images"] = images.size();
    report["basis_size"] = bs.basis_size;
    report["resolution"] = g.resolution;
    report["fill_fraction"] = cell.fill_fraction;
    write_bands_csv(bs, dir / "bands.csv");
    write_json(report, dir / "gaps.json");
    out.files = {"bands.csv", "gaps.json", "bands.svg"};
    out.summary = report;
    out.bands = std::move(bs);
    return out;
}

inline void write_waveguide_csv(const WaveguideBands& wb, const fs::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + file.string());
    const bool photonic = wb.bands.polarization != Polarization::elastic;
    out << "kx,band_index,freq_normalized,freq_" << wb.bands.unit << ",localization,guided";
    if (photonic) out << ",above_light_line";
    out << '\n' << std::setprecision(12);
    for (std::size_t k = 0; k < wb.kx.size(); ++k)
        for (std::size_t b = 0; b < wb.bands.frequencies[k].size(); ++b) {
            const double f = wb.bands.frequencies[k][b];
            out << wb.kx[k] << ',' << b << ',' << f << ',' << f * wb.bands.unit_factor << ',' << wb.localization[k][b] << ','
                << (wb.guided[k][b] ? 1 : 0);
            if (photonic) out << ',' << (f > wb.bands.light_line[k] ? 1 : 0);
            out << '\n';
        }
    if (!out) throw std::runtime_error("write failed for " + file.string());
}

inline std::string waveguide_svg(const WaveguideBands& wb, const std::string& title) {
    Series other{"bulk-like", {}, {}, true}, guided{"guided", {}, {}, true};
    double ymax = 0.0;
    for (std::size_t k = 0; k < wb.kx.size(); ++k)
        for (std::size_t b = 0; b < wb.bands.frequencies[k].size(); ++b) {
            const double f = wb.bands.frequencies[k][b];
            ymax = std::max(ymax, f);
            (wb.guided[k][b] ? guided : other).x.push_back(wb.kx[k]);
            (wb.guided[k][b] ? guided : other).y.push_back(f);
        }
    std::vector<Series> s{other};
    if (!guided.x.empty()) s.push_back(guided);
    if (!wb.bands.light_line.empty()) s.push_back({"light line", wb.kx, wb.bands.light_line, false});
    return line_plot_svg(s, title, "kx (2π/a)", "normalized frequency", std::make_pair(0.0, 1.05 * ymax));
}

inline CommandOutput cmd_defect(const RunConfig& rc, Domain domain, const fs::path& dir, const RunContext& ctx) {
    using namespace cli_detail;
    const auto& g = need_geometry(rc);
    const auto material = need_material(rc, domain);
    if (!rc.defect && !rc.heterostructure) throw ConfigError("defect needs a 'defect' or 'heterostructure' block");
    const auto lattice = g.lattice();
    CommandOutput out;
    json summary;
    summary["domain"] = domain == Domain::photonic ? "photonic" : "phononic";
    if (rc.defect) {
        const auto& d = *rc.defect;
        const auto unit = build_unit_cell(lattice, g.hole, d.resolution);
        const auto sc = build_supercell(unit, d.spec, d.n_transverse);
        const int per_period = domain == Domain::photonic ? 3 : 6;
        const int nb = d.n_bands > 0 ? d.n_bands : per_period * d.n_transverse;
        std::vector<double> kx;
        for (int i = 0; i < d.kx_samples; ++i) kx.push_back(0.5 * i / (d.kx_samples - 1));
        WaveguideOptions opt;
        opt.threshold = d.threshold;
        auto wb = waveguide_bands(sc, unit, material, nb, d.cutoff, kx, opt);
        write_waveguide_csv(wb, dir / "guided_bands.csv");
        write_svg(waveguide_svg(wb, "projected guide bands"), dir / "guided_bands.svg");
        json w;
        w["kind"] = d.spec.kind == DefectKind::removed_row_W ? "removed_row_W" : "circular_hole_row";
        w["W"] = d.spec.W;
        if (d.spec.kind == DefectKind::circular_hole_row)
            w["circle_radius_over_a"] = d.spec.circle_radius > 0.0 ? d.spec.circle_radius : area_matched_radius(unit);
        w["n_transverse"] = d.n_transverse;
        w["basis_size"] = wb.bands.basis_size;
        w["unit"] = wb.bands.unit;
        w["bulk_gap"] = wb.bulk_gap ? gap_json(*wb.bulk_gap) : json(nullptr);
        w["guided_count"] = wb.guided_count();
        json edges = json::array();
        for (std::size_t k = 0; k < kx.size(); ++k) {
            double top = -1.0;
            for (std::size_t b = 0; b < wb.guided[k].size(); ++b)
                if (wb.guided[k][b]) top = std::max(top, wb.bands.frequencies[k][b]);
            edges.push_back({{"kx", kx[k]}, {"highest_guided", top > 0 ? json(top) : json(nullptr)}});
        }
        w["guided_by_kx"] = edges;
        summary["waveguide"] = w;
        out.files.insert(out.files.end(), {"guided_bands.csv", "guided_bands.svg"});
        ctx.log("defect: " + std::to_string(wb.guided_count()) + " guided (k, band) samples");
        out.waveguide = std::move(wb);
    }
    if (rc.heterostructure) {
        const auto& c = *rc.heterostructure;
        const auto unit = build_unit_cell(lattice, g.hole, c.resolution);
        CavityOptions opt;
        opt.per_a = c.per_a;
        auto res = cavity_modes(unit, c.spec, material, c.n_modes, c.gmax_over_2pi, opt);
        json modes = json::array();
        for (std::size_t i = 0; i < res.modes.size(); ++i) {
            const auto& m = res.modes[i];
            char stem[32];
            std::snprintf(stem, sizeof stem, "mode_%02zu", i);
            export_mode_profile(m, dir / stem);
            out.files.push_back(std::string(stem) + ".csv");
            out.files.push_back(std::string(stem) + ".svg");
            modes.push_back({{"index", i},
                             {"frequency", m.frequency},
                             {"frequency_phys", m.frequency_phys},
                             {"unit", m.unit},
                             {"localization", m.localization},
                             {"decay_length", number_or_null(m.decay_length)},
                             {"in_gap", m.in_gap},
                             {"degenerate", m.degenerate},
                             {"combined_states", m.combined_states},
                             {"profile", std::string(stem) + ".csv"}});
        }
        json cav;
        cav["mirror_W"] = c.spec.mirror_W;
        cav["core_W"] = c.spec.core_W;
        cav["core_periods"] = c.spec.core_periods;
        cav["mirror_periods"] = c.spec.mirror_periods;
        cav["access_periods"] = c.spec.access_periods;
        cav["n_transverse"] = c.spec.n_transverse;
        cav["basis_size"] = res.basis_size;
        cav["bulk_gap"] = res.bulk ? gap_json(*res.bulk) : json(nullptr);
        cav["window"] = res.window ? gap_json(*res.window) : json(nullptr);
        cav["window_note"] = "part of the bulk gap free of mirror-section guided bands";
        cav["modes"] = modes;
        cav["reference_3d"] = {{"photonic_THz", 337.0}, {"phononic_GHz", 5.9}, {"note", "3D values, comparison only"}};
        summary["cavity"] = cav;
        write_json(cav, dir / "modes.json");
        out.files.push_back("modes.json");
        ctx.log("defect: " + std::to_string(res.modes.size()) + " cavity modes");
        out.cavity = std::move(res);
    }
    write_json(summary, dir / "defect.json");
    out.files.push_back("defect.json");
    out.summary = summary;
    return out;
}

inline CommandOutput cmd_cascade(const RunConfig& rc, const fs::path& dir, const RunContext& ctx) {
    using namespace cli_detail;
    if (!rc.cascade) throw ConfigError("missing 'cascade' block");
    const auto& c = *rc.cascade;
    const auto er = effective_rates(c.rates);
    if (!(er.linewidth() > 0.0)) throw ConfigError("cascade: zero total linewidth (no emitter coupling and gamma3 = 0)");
    const auto regime = validate_regime(c.rates, c.regime_factor);
    const double to_ghz = 1.0 / (2.0 * kPi);
    json rep;
    rep["rates_GHz"] = {{"g12", c.rates.g12 * to_ghz},         {"g13", c.rates.g13 * to_ghz},         {"g23", c.rates.g23 * to_ghz},
                        {"kappa_eo", c.rates.kappa_eo * to_ghz}, {"kappa_em", c.rates.kappa_em * to_ghz}, {"kappa_io", c.rates.kappa_io * to_ghz},
                        {"kappa_im", c.rates.kappa_im * to_ghz}, {"gamma3", c.rates.gamma3 * to_ghz},     {"gamma2", c.rates.gamma2 * to_ghz}};
    rep["effective_GHz"] = {{"Gamma12", er.Gamma12 * to_ghz}, {"Gamma13", er.Gamma13 * to_ghz}, {"Gamma23", er.Gamma23 * to_ghz},
                            {"linewidth", er.linewidth() * to_ghz}};
    rep["beta_cav"] = er.beta_cav;
    rep["C_opt"] = number_or_null(er.C_opt);
    rep["C_mech"] = number_or_null(er.C_mech);
    rep["phonon_branch_efficiency"] = {{"value", er.phonon_branch_efficiency()}, {"label", "model extrapolation"},
                                       {"formula", "C_mech/(1+C_mech)"}};
    json checks = json::array();
    for (const auto& ch : regime.checks) {
        checks.push_back({{"name", ch.name}, {"ratio", number_or_null(ch.ratio)}, {"passed", ch.passed}, {"margin", number_or_null(ch.margin)}});
        if (!ch.passed) ctx.warn("regime condition '" + ch.name + "' not met at factor " + std::to_string(c.regime_factor));
    }
    rep["regime"] = {{"factor", c.regime_factor}, {"all_passed", regime.all_passed()}, {"checks", checks}};
    const double lw = er.linewidth();
    const auto curve = success_curve(er, er.gamma3, {c.delta_range_linewidths.first * lw, c.delta_range_linewidths.second * lw}, c.n_samples);
    write_curve_csv(curve, lw, dir / "success_curve.csv");
    rep["peak_p_success"] = scatter(0.0, er, er.gamma3).p_success;

    std::ofstream bc(dir / "beta_curves.csv", std::ios::binary);
    if (!bc) throw std::runtime_error("cannot open beta_curves.csv");
    bc << "beta,delta_over_Gamma13,p_success,p_elastic,p_loss\n" << std::setprecision(15);
    std::vector<Series> series;
    json peaks = json::array();
    for (double beta : c.beta_values) {
        const auto m = matched_rates(1.0, beta);
        const double half = 0.5 * (c.delta_range_linewidths.second - c.delta_range_linewidths.first) * (2.0 + m.gamma3);
        const auto cv = success_curve(m, m.gamma3, {-half, half}, c.n_samples);
        Series s;
        char label[32];
        std::snprintf(label, sizeof label, "beta = %.2f", beta);
        s.label = label;
        for (const auto& p : cv) {
            bc << beta << ',' << p.delta << ',' << p.p_success << ',' << p.p_elastic << ',' << p.p_loss << '\n';
            s.x.push_back(p.delta);
            s.y.push_back(p.p_success);
        }
        series.push_back(std::move(s));
        peaks.push_back({{"beta", beta}, {"peak_p_success", scatter(0.0, m, m.gamma3).p_success}});
    }
    bc.close();
    if (!bc) throw std::runtime_error("write failed for beta_curves.csv");
    rep["beta_curves"] = peaks;
    write_svg(line_plot_svg(series, "success probability, Gamma13 = Gamma23", "Δ / Γ13", "p_success", std::make_pair(0.0, 1.0)),
              dir / "success_curves.svg");
    if (c.wavepacket) {
        const auto& w = *c.wavepacket;
        SpectralDensity sd{w.shape, 2.0 * kPi * w.center_GHz, 2.0 * kPi * w.width_GHz};
        json wp;
        wp["shape"] = w.shape == SpectralShape::lorentzian ? "lorentzian" : "gaussian";
        wp["center_GHz"] = w.center_GHz;
        wp["width_GHz"] = w.width_GHz;
        wp["p_success"] = wavepacket_success(sd, er, er.gamma3);
        wp["single_frequency_p_success"] = scatter(sd.center, er, er.gamma3).p_success;
        if (w.shape == SpectralShape::lorentzian) wp["closed_form"] = lorentzian_overlap(sd, er, er.gamma3);
        rep["wavepacket"] = wp;
    }
    write_json(rep, dir / "regime.json");
    CommandOutput out;
    out.files = {"regime.json", "success_curve.csv", "beta_curves.csv", "success_curves.svg"};
    out.summary = rep;
    return out;
}

inline CommandOutput run_command(const std::string& cmd, const RunConfig& rc, Domain domain, const fs::path& dir, const RunContext& ctx) {
    if (cmd == "bands") return cmd_bands(rc, domain, dir, ctx);
    if (cmd == "defect") return cmd_defect(rc, domain, dir, ctx);
    if (cmd == "cascade") return cmd_cascade(rc, dir, ctx);
    throw ConfigError("unknown command '" + cmd + "'");
}

inline CommandOutput cmd_sweep(const RunConfig& rc, const fs::path& dir, const RunContext& ctx) {
    using namespace cli_detail;
    if (!rc.sweep) throw ConfigError("missing 'sweep' block");
    const auto& sw = *rc.sweep;
    if (sw.values.empty()) throw ConfigError("sweep.values is empty");
    if (sw.parameter.rfind("sweep", 0) == 0) throw ConfigError("cannot sweep the sweep block itself");
    const Domain domain = parse_domain(sw.domain);
    json base = rc.raw;
    base.erase("sweep");
    std::vector<RunConfig> configs;
    for (double v : sw.values) configs.push_back(parse_config(set_path(base, sw.parameter, v)));
    std::vector<CommandOutput> outs(configs.size());
    std::vector<std::string> names(configs.size());
    for (std::size_t i = 0; i < configs.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "run_%03zu", i);
        names[i] = buf;
        fs::create_directory(dir / names[i]);
    }
    parallel_for(configs.size(), [&](std::size_t i) {
        RunContext quiet_ctx{true};
        outs[i] = run_command(sw.command, configs[i], domain, dir / names[i], quiet_ctx);
        write_json(configs[i].raw, dir / names[i] / "config.json");
    });
    json index;
    index["parameter"] = sw.parameter;
    index["command"] = sw.command;
    index["domain"] = sw.domain;
    json runs = json::array();
    for (std::size_t i = 0; i < configs.size(); ++i) {
        json files = json::array();
        for (const auto& f : outs[i].files) files.push_back(names[i] + "/" + f);
        files.push_back(names[i] + "/config.json");
        runs.push_back({{"value", sw.values[i]}, {"dir", names[i]}, {"files", files}});
    }
    index["runs"] = runs;
    // band edges of one guided band followed through the sweep
    if (sw.command == "defect" && std::all_of(outs.begin(), outs.end(), [](const CommandOutput& o) { return o.waveguide.has_value(); })) {
        std::vector<WaveguideBands> wbs;
        for (auto& o : outs) wbs.push_back(*o.waveguide);
        bool same_k = true;
        for (const auto& w : wbs) same_k = same_k && w.kx == wbs.front().kx;
        if (same_k) {
            json table = json::array();
            for (std::size_t k = 0; k < wbs.front().kx.size(); ++k) {
                json bands = json::array();
                bool all_inc = true;
                for (const auto& t : track_guided_bands(wbs, k)) {
                    bands.push_back({{"band_edge", t.frequency},
                                     {"localization", t.localization},
                                     {"guided", t.guided},
                                     {"complete", t.complete},
                                     {"strictly_increasing", t.strictly_increasing()}});
                    all_inc = all_inc && t.strictly_increasing();
                }
                json row = {{"kx", wbs.front().kx[k]}, {"tracks", bands}};
                row["all_strictly_increasing"] = all_inc && !bands.empty();
                table.push_back(row);
            }
            index["tracked_guided_bands"] = table;
        }
    }
    if (sw.command == "bands") {
        json conv = json::array();
        const auto& ref = *outs.back().bands;
        const std::size_t n = std::min<std::size_t>(10, ref.n_bands());
        for (std::size_t i = 0; i < outs.size(); ++i)
            conv.push_back({{"value", sw.values[i]}, {"max_relative_change_vs_last", max_relative_change(*outs[i].bands, ref, n)}});
        index["convergence"] = conv;
    }
    write_json(index, dir / "index.json");
    ctx.log("sweep: " + std::to_string(configs.size()) + " runs");
    CommandOutput out;
    out.files = {"index.json"};
    out.summary = index;
    return out;
}

/**
 * @brief Runs one subcommand with atomic output placement and exit-code mapping.
 *
 * Configuration and validation problems exit 1, numerical failures exit 2.
 * Nothing is left at out_dir unless the command succeeds.
 */
inline int run_cli(const std::string& cmd, const fs::path& config_path, const fs::path& out_dir, const std::string& domain_name,
                   bool quiet) {
    RunContext ctx{quiet};
    fs::path tmp;
    try {
        const RunConfig rc = load_config(config_path);
        const Domain domain = parse_domain(domain_name);
        const fs::path target = fs::absolute(out_dir).lexically_normal();
        const fs::path parent = target.has_parent_path() ? target.parent_path() : fs::current_path();
        fs::create_directories(parent);
        std::random_device rd;
        char suffix[32];
        std::snprintf(suffix, sizeof suffix, ".tmp-%08x", rd());
        tmp = parent / ("." + target.filename().string() + suffix);
        fs::create_directory(tmp);
        if (cmd == "sweep") cmd_sweep(rc, tmp, ctx);
        else run_command(cmd, rc, domain, tmp, ctx);
        cli_detail::write_json(rc.raw, tmp / "config.json");
        if (fs::exists(target)) fs::remove_all(target);
        fs::rename(tmp, target);
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        if (!tmp.empty()) fs::remove_all(tmp);
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        if (!tmp.empty()) fs::remove_all(tmp);
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        if (!tmp.empty()) fs::remove_all(tmp);
        return kExitNumerical;
    }
}

}  // namespace shamrock
