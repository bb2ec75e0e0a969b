#include "shamrock/config.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using shamrock::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("shamrock_cli_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run(const std::string& cmd, const json& cfg, const fs::path& dir, const std::string& domain = "photonic") {
    const fs::path cfg_file = dir / "in.json";
    std::ofstream(cfg_file) << cfg.dump(2);
    const std::string line = std::string(SHAMROCK_CLI_PATH) + " " + cmd + " --config " + cfg_file.string() + " --out " +
                             (dir / "out").string() + " --domain " + domain + " --quiet 2>" + (dir / "stderr.txt").string();
    const int st = std::system(line.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

// entries of dir other than the config and log files written by the test itself
std::vector<std::string> stray_entries(const fs::path& dir) {
    std::vector<std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto n = e.path().filename().string();
        if (n != "in.json" && n != "stderr.txt") out.push_back(n);
    }
    return out;
}

json small_bands() {
    return {{"geometry", {{"resolution", 48}}},
            {"photonic", json::object()},
            {"elastic", json::object()},
            {"solver", {{"cutoff", 3}, {"n_bands", 8}, {"samples_per_segment", 3}}}};
}

json small_guide(double W) {
    json c = small_bands();
    c["defect"] = {{"W", W}, {"n_transverse", 5}, {"cutoff", 3}, {"resolution", 32}, {"kx_samples", 3}};
    return c;
}

json cascade(double g13, double g23, double kappa, double gamma3) {
    return {{"cascade",
             {{"g12_GHz", 0.5}, {"g13_GHz", g13}, {"g23_GHz", g23}, {"kappa_eo_GHz", kappa}, {"kappa_em_GHz", kappa},
              {"kappa_io_GHz", 0.0}, {"kappa_im_GHz", 0.0}, {"gamma3_GHz", gamma3}, {"gamma2_GHz", 0.01},
              {"n_samples", 201}, {"beta_values", {1.0, 0.9, 0.8}}}}};
}

std::vector<std::vector<double>> csv_rows(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> r;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) r.push_back(std::stod(cell));
        rows.push_back(r);
    }
    return rows;
}

}  // namespace

TEST(Bands, PhotonicOutputsAndDeterminism) {
    const auto d1 = scratch("bands1"), d2 = scratch("bands2");
    ASSERT_EQ(run("bands", small_bands(), d1), 0) << slurp(d1 / "stderr.txt");
    ASSERT_EQ(run("bands", small_bands(), d2), 0);
    for (const char* f : {"bands.csv", "gaps.json", "bands.svg", "config.json"}) EXPECT_TRUE(fs::exists(d1 / "out" / f)) << f;
    const auto gaps = read_json(d1 / "out" / "gaps.json");
    EXPECT_GE(gaps["gaps"].size(), 1u);
    EXPECT_EQ(gaps["unit"], "THz");
    for (const char* f : {"bands.csv", "gaps.json", "config.json"})
        EXPECT_EQ(slurp(d1 / "out" / f), slurp(d2 / "out" / f)) << f;
    EXPECT_EQ(read_json(d1 / "out" / "config.json"), small_bands());
}

TEST(Bands, PhononicCompleteGapFieldAndFullZone) {
    const auto d = scratch("phon");
    json c = small_bands();
    c["solver"]["full_zone_grid"] = 4;
    ASSERT_EQ(run("bands", c, d, "phononic"), 0) << slurp(d / "stderr.txt");
    const auto gaps = read_json(d / "out" / "gaps.json");
    EXPECT_TRUE(gaps.contains("complete_gap"));
    EXPECT_TRUE(gaps["full_zone"].contains("complete_gap"));
    EXPECT_EQ(gaps["unit"], "GHz");
    EXPECT_EQ(gaps["path_images"], 3);
}

TEST(Errors, MissingGeometryWritesNothing) {
    const auto d = scratch("nogeo");
    json c = small_bands();
    c.erase("geometry");
    EXPECT_EQ(run("bands", c, d), 1);
    EXPECT_TRUE(stray_entries(d).empty());
    EXPECT_NE(slurp(d / "stderr.txt").find("geometry"), std::string::npos);
}

TEST(Errors, ConfigProblemsExitOne) {
    const auto d = scratch("bad");
    EXPECT_EQ(run("defect", small_guide(0.0), d), 1);
    json unknown = small_bands();
    unknown["solver"]["cutof"] = 3;
    EXPECT_EQ(run("bands", unknown, d), 1);
    json empty_sweep = small_guide(0.58);
    empty_sweep["sweep"] = {{"parameter", "defect.W"}, {"values", json::array()}};
    EXPECT_EQ(run("sweep", empty_sweep, d), 1);
    json bad_path = small_guide(0.58);
    bad_path["sweep"] = {{"parameter", "defect.width"}, {"values", {0.5}}};
    EXPECT_EQ(run("sweep", bad_path, d), 1);
    EXPECT_EQ(run("cascade", small_bands(), d), 1);
    EXPECT_TRUE(stray_entries(d).empty());
}

TEST(Errors, FailedRunKeepsPreviousOutput) {
    const auto d = scratch("keep");
    ASSERT_EQ(run("cascade", cascade(1.0, 1.0, 2.0, 0.0), d), 0);
    const std::string before = slurp(d / "out" / "regime.json");
    EXPECT_EQ(run("cascade", small_bands(), d), 1);
    EXPECT_EQ(slurp(d / "out" / "regime.json"), before);
    const auto entries = stray_entries(d);
    EXPECT_EQ(entries, std::vector<std::string>{"out"});
}

TEST(Defect, WaveguideFlagsInGapBands) {
    const auto d = scratch("guide");
    ASSERT_EQ(run("defect", small_guide(0.58), d), 0) << slurp(d / "stderr.txt");
    const auto rows = csv_rows(d / "out" / "guided_bands.csv");
    ASSERT_FALSE(rows.empty());
    EXPECT_EQ(rows.front().size(), 7u);
    int guided = 0;
    for (const auto& r : rows) guided += static_cast<int>(r[5]);
    EXPECT_GT(guided, 0);
    const auto s = read_json(d / "out" / "defect.json");
    EXPECT_GT(s["waveguide"]["guided_count"].get<int>(), 0);
}

TEST(Defect, CavityModeList) {
    const auto d = scratch("cavity");
    json c = small_bands();
    c["heterostructure"] = {{"mirror_periods", 3}, {"n_transverse", 5}, {"gmax_over_2pi", 3.0}, {"n_modes", 4}};
    ASSERT_EQ(run("defect", c, d), 0) << slurp(d / "stderr.txt");
    const auto modes = read_json(d / "out" / "modes.json");
    ASSERT_GE(modes["modes"].size(), 1u);
    for (const auto& m : modes["modes"]) {
        EXPECT_GT(m["localization"].get<double>(), 0.0);
        EXPECT_LE(m["localization"].get<double>(), 1.0);
        EXPECT_TRUE(fs::exists(d / "out" / m["profile"].get<std::string>()));
    }
}

TEST(Cascade, LosslessPeakAndBetaCurves) {
    const auto d = scratch("cascade");
    ASSERT_EQ(run("cascade", cascade(1.0, 1.0, 2.0, 0.0), d), 0) << slurp(d / "stderr.txt");
    const auto rep = read_json(d / "out" / "regime.json");
    EXPECT_EQ(rep["peak_p_success"].get<double>(), 1.0);
    double best = 0.0;
    for (const auto& r : csv_rows(d / "out" / "success_curve.csv")) best = std::max(best, r[1]);
    EXPECT_NEAR(best, 1.0, 1e-12);
    const double want[] = {1.0, 0.81, 0.64};
    ASSERT_EQ(rep["beta_curves"].size(), 3u);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(rep["beta_curves"][i]["peak_p_success"].get<double>(), want[i], 1e-12);
    std::map<double, double> peak;
    for (const auto& r : csv_rows(d / "out" / "beta_curves.csv")) peak[r[0]] = std::max(peak[r[0]], r[2]);
    ASSERT_EQ(peak.size(), 3u);
    for (const auto& [beta, p] : peak) EXPECT_NEAR(p, beta * beta, 1e-12) << beta;
    const std::string svg = slurp(d / "out" / "success_curves.svg");
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("beta = 0.90"), std::string::npos);
    EXPECT_EQ(rep["phonon_branch_efficiency"]["label"], "model extrapolation");
}

TEST(Cascade, RegimeViolationIsWarningOnly) {
    const auto d = scratch("regime");
    // cavity decay far below the coupling: not over-coupled, not bad-cavity
    ASSERT_EQ(run("cascade", cascade(1.0, 1.0, 0.1, 0.2), d), 0);
    const auto rep = read_json(d / "out" / "regime.json");
    EXPECT_FALSE(rep["regime"]["all_passed"].get<bool>());
    EXPECT_TRUE(fs::exists(d / "out" / "success_curve.csv"));
    EXPECT_NE(slurp(d / "stderr.txt").find("warning"), std::string::npos);
}

TEST(Cascade, WavepacketReport) {
    const auto d = scratch("packet");
    json c = cascade(1.0, 1.0, 2.0, 0.1);
    c["cascade"]["wavepacket"] = {{"shape", "lorentzian"}, {"center_GHz", 0.02}, {"width_GHz", 0.05}};
    ASSERT_EQ(run("cascade", c, d), 0) << slurp(d / "stderr.txt");
    const auto wp = read_json(d / "out" / "regime.json")["wavepacket"];
    EXPECT_NEAR(wp["p_success"].get<double>(), wp["closed_form"].get<double>(), 1e-8 * wp["closed_form"].get<double>());
    EXPECT_LT(wp["p_success"].get<double>(), wp["single_frequency_p_success"].get<double>());
}

TEST(Sweep, WidthSweepIndex) {
    const auto d1 = scratch("sweep1"), d2 = scratch("sweep2");
    json c = small_guide(0.58);
    c["sweep"] = {{"parameter", "defect.W"}, {"values", {0.58, 0.56, 0.54, 0.52}}, {"command", "defect"}};
    ASSERT_EQ(run("sweep", c, d1), 0) << slurp(d1 / "stderr.txt");
    ASSERT_EQ(run("sweep", c, d2), 0);
    const auto idx = read_json(d1 / "out" / "index.json");
    ASSERT_EQ(idx["runs"].size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& r = idx["runs"][i];
        EXPECT_EQ(r["value"].get<double>(), c["sweep"]["values"][i].get<double>());
        for (const auto& f : r["files"]) {
            EXPECT_TRUE(fs::exists(d1 / "out" / f.get<std::string>())) << f;
            if (f.get<std::string>().ends_with(".csv") || f.get<std::string>().ends_with(".json"))
                EXPECT_EQ(slurp(d1 / "out" / f.get<std::string>()), slurp(d2 / "out" / f.get<std::string>())) << f;
        }
        EXPECT_EQ(read_json(d1 / "out" / r["dir"].get<std::string>() / "config.json")["defect"]["W"].get<double>(),
                  r["value"].get<double>());
    }
    EXPECT_TRUE(idx.contains("tracked_guided_bands"));
    EXPECT_EQ(slurp(d1 / "out" / "index.json"), slurp(d2 / "out" / "index.json"));
}

TEST(Sweep, CutoffConvergenceTable) {
    const auto d = scratch("conv");
    json c = small_bands();
    c["sweep"] = {{"parameter", "solver.cutoff"}, {"values", {2, 3, 4}}, {"command", "bands"}};
    ASSERT_EQ(run("sweep", c, d), 0) << slurp(d / "stderr.txt");
    const auto conv = read_json(d / "out" / "index.json")["convergence"];
    ASSERT_EQ(conv.size(), 3u);
    EXPECT_EQ(conv[2]["max_relative_change_vs_last"].get<double>(), 0.0);
    EXPECT_GT(conv[0]["max_relative_change_vs_last"].get<double>(), conv[1]["max_relative_change_vs_last"].get<double>());
}

TEST(Sweep, IntegerParameterRejectsFraction) {
    const auto d = scratch("frac");
    json c = small_bands();
    c["sweep"] = {{"parameter", "solver.cutoff"}, {"values", {3.5}}, {"command", "bands"}};
    EXPECT_EQ(run("sweep", c, d), 1);
    EXPECT_TRUE(stray_entries(d).empty());
}
