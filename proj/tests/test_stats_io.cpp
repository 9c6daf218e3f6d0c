#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "doctest.h"
#include "stakelab/figures.hpp"
#include "stakelab/io.hpp"
#include "stakelab/stats.hpp"

using namespace stakelab;

namespace {

std::string read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_SUITE_BEGIN("stats_io");

TEST_CASE("kahan summation holds precision over long runs") {
    KahanSum s;
    for (int i = 0; i < 1000000; ++i) s.add(0.1);
    CHECK(s.value() == doctest::Approx(100000.0).epsilon(1e-14));
}

TEST_CASE("mean_var basics") {
    std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
    MeanVar mv = mean_var(xs);
    CHECK(mv.mean == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(mv.var == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
    CHECK(mv.se == doctest::Approx(std::sqrt(5.0 / 12.0)).epsilon(1e-15));
}

TEST_CASE("two-sample ks on identical samples is zero") {
    std::vector<double> a = {0.1, 0.5, 0.9};
    CHECK(ks_two_sample(a, a) == 0.0);
    std::vector<double> b = {10.0, 11.0};
    CHECK(ks_two_sample(a, b) == 1.0);
}

TEST_CASE("histogram bins, clamping and mass") {
    std::vector<double> xs = {0.0, 0.005, 0.5, 0.995, 1.0, -2.0, 3.0};
    Histogram h = make_histogram(xs, 0.0, 1.0, 100);
    CHECK(h.total == 7);
    CHECK(h.counts[0] == 3);   // 0.0, 0.005 and the clamped -2.0
    CHECK(h.counts[99] == 3);  // 0.995, 1.0 and the clamped 3.0
    CHECK(h.counts[50] == 1);
    double mass = 0.0;
    for (std::size_t b = 0; b < h.counts.size(); ++b) mass += h.mass(b);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("double formatting round-trips at 17 significant digits") {
    for (double x : {1.0 / 3.0, 0.1, 1e300, 5e-324, 123456789.123456789, -0.0}) {
        std::string s = format_double(x);
        CHECK(std::strtod(s.c_str(), nullptr) == x);
    }
}

TEST_CASE("csv writer emits CRLF rows and quotes reserved characters") {
    std::string path = (std::filesystem::temp_directory_path() / "stakelab_csv_test.csv").string();
    {
        CsvWriter w(path);
        w.header({"a", "b"});
        w.row({CsvWriter::cell(1.5), CsvWriter::cell(std::string("x,y"))});
    }
    std::string bytes = read_bytes(path);
    CHECK(bytes == "a,b\r\n1.5,\"x,y\"\r\n");
    std::filesystem::remove(path);
}

TEST_CASE("config hash tracks semantic content only") {
    nlohmann::json a = {{"x", 1}, {"y", 2.5}};
    nlohmann::json b = {{"y", 2.5}, {"x", 1}};  // same content, different order
    nlohmann::json c = {{"x", 1}, {"y", 2.50001}};
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("grid thinning keeps the endpoints") {
    std::vector<double> g = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<double> t = thin_grid(g, 0.3);
    REQUIRE(t.size() >= 2);
    CHECK(t.front() == 1);
    CHECK(t.back() == 10);
    CHECK(t.size() == 3);
    CHECK(thin_grid(g, 1.0) == g);
    CHECK(scale_replicates(10000, 0.01) == 100);
    CHECK(scale_replicates(100, 0.0001) == 16);  // floor
    CHECK(scale_replicates(100, 2.0) == 100);
}

TEST_CASE("figure runner is deterministic and thread-invariant") {
    namespace fs = std::filesystem;
    fs::path base = fs::temp_directory_path() / "stakelab_fig_test";
    fs::remove_all(base);
    FigureOverrides o;
    o.scale = 1.0;
    o.replicates = 64;
    o.seed = 99;

    o.out_dir = (base / "a").string();
#ifdef _OPENMP
    int old_threads = omp_get_max_threads();
    omp_set_num_threads(1);
#endif
    run_figure("fig9", o);
#ifdef _OPENMP
    omp_set_num_threads(2);
#endif
    o.out_dir = (base / "b").string();
    run_figure("fig9", o);
#ifdef _OPENMP
    omp_set_num_threads(old_threads);
#endif
    CHECK(read_bytes((base / "a" / "fig9.csv").string()) ==
          read_bytes((base / "b" / "fig9.csv").string()));
    CHECK(read_bytes((base / "a" / "fig9_summary.csv").string()) ==
          read_bytes((base / "b" / "fig9_summary.csv").string()));
    CHECK_THROWS_AS(run_figure("fig99", o), UnknownFigure);
    fs::remove_all(base);
}

TEST_SUITE_END();
