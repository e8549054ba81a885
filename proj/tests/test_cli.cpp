#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "simboot/bootstrap.hpp"
#include "simboot/commands.hpp"
#include "simboot/config.hpp"
#include "simboot/csv.hpp"
#include "simboot/error.hpp"
#include "simboot/kernel.hpp"
#include "simboot/oracle.hpp"

using namespace simboot;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("simboot_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(SIMBOOT_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

RunConfig small(Family family = Family::LocalConstant) {
    return parse_config_text("n = 100\nk = 7\nb = 200\nm = 40\nthreads = 1\n",
                             {{"family", std::string(to_string(family))}});
}

}  // namespace

TEST_CASE("empty configuration gives the defaults") {
    const auto c = parse_config_text("");
    CHECK(c == RunConfig{});
    CHECK(c.n == 400);
    CHECK(c.k == 71);
    CHECK(c.b == 10000);
    CHECK(c.datasets_for(Command::Coverage) == 5000);
    CHECK(c.datasets_for(Command::Correction) == 10000);
    CHECK(c.alphas.size() == 10);
    CHECK(c.alphas.front() == 0.05);
    CHECK(c.alphas.back() == 0.5);
    CHECK(c.seed == 42);
    CHECK(load_config(std::nullopt) == c);
}

TEST_CASE("invalid entries name the key") {
    try {
        parse_config_text("n = 100\nalpha = 1.5\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "alpha");
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse_config_text("bogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("n = -4\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("h = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("b = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("just text\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("family = cubic\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("preset = huge\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("family = qt\ndgp = flat\n"), ConfigError);  // gauss multipliers
    CHECK_THROWS_AS(parse_config_text("family = qt\nscheme = exp\n"), ConfigError);  // non-constant mean
    CHECK_NOTHROW(parse_config_text("family = qt\nscheme = exp\ndgp = flat\n"));
    CHECK_THROWS_AS(parse_config_text("k = 3\ncenters = 0.1, 0.5\n"), ConfigError);
    CHECK_THROWS_AS(load_config(fs::path("/nonexistent/simboot.cfg")), ConfigError);
}

TEST_CASE("presets, file entries and overrides") {
    const auto desk = parse_config_text("preset = desk\n");
    CHECK(desk.b == 2000);
    CHECK(desk.datasets_for(Command::Coverage) == 500);
    CHECK(desk.datasets_for(Command::Correction) == 500);
    CHECK(desk.n == 400);
    CHECK(desk.k == 71);

    const auto mixed = parse_config_text("# comment\nm = 50  # trailing\npreset = desk\nh = 0.12\n",
                                         {{"h", "0.3"}, {"alpha", "0.1,0.2"}});
    CHECK(mixed.datasets_for(Command::Coverage) == 50);
    CHECK(mixed.h == 0.3);
    CHECK(mixed.alphas == std::vector<double>{0.1, 0.2});

    const auto flag_preset = parse_config_text("preset = desk\n", {{"preset", "paper"}});
    CHECK(flag_preset.b == 10000);
}

TEST_CASE("configuration round trip") {
    auto c = parse_config_text(
        "family = lq\nk = 3\ncenters = 0.1, 0.4, 0.9\nh = 0.123456789012345\nm = 77\n"
        "alpha = 0.05,0.333\nscheme = bern\nseed = 18446744073709551615\nthreads = 3\nout = /tmp/x\n"
        "noise_sd = 0.7\ndgp = flat\nreps = 9\nband_alpha = 0.2\n");
    CHECK(parse_config_text(format_config(c)) == c);
    const RunConfig d;
    CHECK(parse_config_text(format_config(d)) == d);
    const auto q = parse_config_text("family = qt\nscheme = exp\ndgp = flat\nk = 2\ntaus = 0.25,0.75\n");
    CHECK(parse_config_text(format_config(q)) == q);
}

TEST_CASE("csv formatting") {
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(format_number(123456789.123456789) == "123456789.123");
    CHECK(format_number(-2.5e-20) == "-2.5e-20");
    CHECK(format_number(std::nan("")) == "nan");
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> d(-10.0, 10.0);
    for (int i = 0; i < 2000; ++i) {
        const double v = std::pow(10.0, d(gen)) * (i % 2 ? 1.0 : -1.0);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g", v);
        const auto text = format_number(v);
        CHECK(text.find(',') == std::string::npos);
        CHECK(std::strtod(text.c_str(), nullptr) == std::strtod(buf, nullptr));
    }
    CsvTable t;
    t.header = {"a", "b"};
    t.add_row({1.0, 2.5});
    t.add_row({0.1, -3.0});
    CHECK(t.to_string() == "a,b\n1,2.5\n0.1,-3\n");
    CHECK_THROWS(t.add_row({1.0}));
}

TEST_CASE("two-column reader") {
    const auto dir = scratch("reader");
    {
        std::ofstream out(dir / "d.csv");
        out << "x,y\n# note\n0.1, 2\n0.2\t3.5\n\n0.3 4\n";
    }
    const auto rows = read_two_columns(dir / "d.csv");
    REQUIRE(rows.size() == 3);
    CHECK(rows[1] == std::pair<double, double>{0.2, 3.5});
    {
        std::ofstream out(dir / "bad.csv");
        out << "0.1,2\n0.2,oops\n";
    }
    CHECK_THROWS_AS(read_two_columns(dir / "bad.csv"), ConfigError);
}

TEST_CASE("band command") {
    auto c = small();
    c.noise_sd = 0.0;
    c.dgp = "flat";
    const auto flat = run_band(c);
    CHECK(flat.rows.size() == 7);
    for (const auto& r : flat.rows) {
        CHECK(r[2] <= r[5] + 1e-9);
        CHECK(r[5] <= r[3] + 1e-9);
    }

    for (auto family : {Family::LocalConstant, Family::LocalQuadratic}) {
        auto n = small(family);
        n.noise_sd = 0.0;
        for (const auto& r : run_band(n).rows) {
            CHECK(r[2] <= r[5] + 1e-9);
            CHECK(r[5] <= r[3] + 1e-9);
        }
    }

    auto one = small();
    one.k = 1;
    one.band_alpha = 0.1;
    const auto band = run_band(one);
    REQUIRE(band.rows.size() == 1);
    const auto data = sample_dataset(one.dgp_spec(), RngSpec{one.seed}, 0);
    const auto grid = one.grid();
    const auto lr = build_lr_matrix(data, grid, one.b, one.scheme,
                                    RngSpec{one.seed}.substream(kBootstrapStream).substream(0));
    const double z = marginal_quantile(lr.sorted_row(0), 0.1);
    double sw = 0.0;
    for (double w : local_weights(grid.centers[0], grid.kernel, data.x)) sw += w;
    CHECK(band.rows[0][4] == z);
    CHECK(band.rows[0][3] - band.rows[0][1] == doctest::Approx(z / std::sqrt(sw)).epsilon(1e-12));

    auto defaults = parse_config_text("");
    defaults.threads = 1;
    const auto full = run_band(defaults);
    CHECK(full.rows.size() == 71);
    CHECK(full.header == std::vector<std::string>{"center", "theta_hat", "lower", "upper", "critical_value",
                                                  "target_theta_star"});

    auto q = parse_config_text("family = qt\nscheme = exp\ndgp = flat\nk = 5\nb = 300\nn = 200\n");
    const auto qt = run_band(q);
    CHECK(qt.rows[2][0] == doctest::Approx(0.5));
    CHECK(qt.rows[2][5] == doctest::Approx(5.0));
}

TEST_CASE("band on a user data file") {
    const auto dir = scratch("userdata");
    {
        std::ofstream out(dir / "xy.txt");
        for (int i = 0; i < 60; ++i) out << i / 59.0 << ' ' << std::sin(6.0 * i / 59.0) << '\n';
    }
    auto c = small();
    c.data = (dir / "xy.txt").string();
    const auto t = run_band(c);
    CHECK(t.rows.size() == 7);
    CHECK(std::isnan(t.rows[0][5]));
    CHECK_THROWS_AS(run_coverage(c), ConfigError);
}

TEST_CASE("coverage and correction commands") {
    auto c = small();
    c.m = 1;
    for (const auto& r : run_coverage(c).rows) CHECK((r[1] == 0.0 || r[1] == 1.0));

    auto one = small();
    one.k = 1;
    one.m = 100;
    one.b = 100;
    one.reps = 2;
    one.alphas = {0.1, 0.3};
    const auto corr = run_correction(one);
    CHECK(corr.header == std::vector<std::string>{"alpha", "mc_corrected_level", "bootstrap_corrected_level"});
    CHECK(corr.rows[0][1] == doctest::Approx(0.9));
    CHECK(corr.rows[0][2] == doctest::Approx(0.9));
    CHECK(corr.rows[1][1] == doctest::Approx(0.7));
    CHECK(corr.rows[1][2] == doctest::Approx(0.7));
}

TEST_CASE("bias command") {
    auto flat = small();
    flat.dgp = "flat";
    for (const auto& r : run_bias(flat).rows) CHECK(r[1] < 1e-10);

    auto lc = parse_config_text("h = 0.12\nm = 2000\nb = 2000\nthreads = 1\n");
    const auto t = run_bias(lc);
    CHECK(t.header == std::vector<std::string>{"center", "bias_norm", "band_width_bootstrap", "band_width_mc"});
    for (const auto& r : t.rows) {
        const double c = r[0];
        const bool overlaps = c + 0.12 > 0.25 && c - 0.12 < 0.65;
        CHECK((r[1] > 0.0) == overlaps);
        if (!overlaps) CHECK(r[1] == 0.0);
        if (c >= 0.3 && c <= 0.6) CHECK(r[2] >= r[3]);
    }
    auto qt = parse_config_text("family = qt\nscheme = exp\ndgp = flat\n");
    CHECK_THROWS_AS(run_bias(qt), ConfigError);
}

TEST_CASE("outputs do not depend on the thread count") {
    std::string first;
    for (unsigned threads : {1u, 2u, 5u}) {
        auto c = small();
        c.threads = threads;
        c.out = scratch("threads" + std::to_string(threads)).string();
        const auto path = run_command(Command::Coverage, c);
        CHECK(path.filename() == "coverage.csv");
        const auto text = slurp(path);
        if (first.empty()) first = text;
        CHECK(text == first);
    }
}

TEST_CASE("command-line exit codes") {
    const auto dir = scratch("cli");
    const std::string base = " --n 100 --k 5 --b 100 --m 20 --threads 1 --out " + dir.string();
    CHECK(run_cli("band" + base) == 0);
    CHECK(fs::exists(dir / "band.csv"));
    CHECK(run_cli("coverage" + base + " --alpha 0.1 --alpha 0.5") == 0);
    CHECK(slurp(dir / "coverage.csv").rfind("alpha,coverage_frequency,mean_corrected_level_bootstrap\n0.1,", 0) == 0);
    CHECK(run_cli("band" + base + " --alpha 1.5") == 2);
    CHECK(run_cli("band" + base + " --family cubic") == 2);
    CHECK(run_cli("band" + base + " --bogus 3") == 2);
    CHECK(run_cli("band --config /nonexistent.cfg") == 2);
    CHECK(run_cli("") == 2);
    CHECK(run_cli("bias" + base + " --family lq --dgp flat --noise-sd 0") == 3);

    {
        std::ofstream cfg(dir / "run.cfg");
        cfg << "n = 100\nk = 3\nb = 100\nthreads = 1\nout = " << (dir / "fromfile").string() << "\n";
    }
    CHECK(run_cli("band --config " + (dir / "run.cfg").string()) == 0);
    CHECK(fs::exists(dir / "fromfile" / "band.csv"));
}
