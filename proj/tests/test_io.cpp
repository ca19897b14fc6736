#include <cstdio>
#include <fstream>

#include "cvqkd/config.hpp"
#include "cvqkd/waveform_io.hpp"
#include "doctest.h"

using namespace cvqkd;

TEST_CASE("config parsing") {
    const char* path = "cfg_test.conf";
    {
        std::ofstream f(path);
        f << "# comment line\n"
          << "v_a = 0.29\n"
          << "eta=0.8   # trailing comment\n"
          << "convention = single\n"
          << "grid = 0.1, 0.2,0.3\n"
          << "n_symbols = 50000\n\n";
    }
    Config c = Config::from_file(path);
    CHECK(c.get_double("v_a") == 0.29);
    CHECK(c.get_double("eta") == 0.8);
    CHECK(c.get_string("convention", "") == "single");
    CHECK(c.get_int("n_symbols") == 50000);
    CHECK(c.get_double_list("grid") == std::vector<double>{0.1, 0.2, 0.3});
    CHECK(c.get_double("missing", 1.5) == 1.5);
    CHECK_THROWS_AS(c.get_double("missing"), std::domain_error);
    CHECK_THROWS_AS(c.get_double("convention"), std::domain_error);

    c.set("v_a=0.5");
    CHECK(c.get_double("v_a") == 0.5);
    c.set("eta", "0.9");
    CHECK(c.get_double("eta") == 0.9);
    CHECK_THROWS_AS(c.set("no_equals_sign"), std::runtime_error);
    std::remove(path);

    {
        std::ofstream f(path);
        f << "bad line without equals\n";
    }
    CHECK_THROWS_AS(Config::from_file(path), std::runtime_error);
    std::remove(path);
    CHECK_THROWS_AS(Config::from_file("no_such_file.conf"), std::runtime_error);
}

TEST_CASE("waveform binary round trip") {
    Waveform w{5e7, 1.25e-6, {0.0, -1.5, 3.25, 1e-300, 42.0}};
    const char* path = "wave_test.bin";
    write_waveform(w, path);
    const Waveform r = read_waveform(path);
    CHECK(r.sample_rate == w.sample_rate);
    CHECK(r.t0 == w.t0);
    REQUIRE(r.samples.size() == w.samples.size());
    for (std::size_t i = 0; i < w.samples.size(); ++i)
        CHECK(r.samples[i] == w.samples[i]);  // bit-exact
    std::remove(path);
    std::remove("wave_test.bin.json");
}

TEST_CASE("waveform CSV export") {
    Waveform w{2.0, 0.0, {1.0, 2.0}};
    const char* path = "wave_test.csv";
    write_waveform_csv(w, path);
    std::ifstream f(path);
    std::string line;
    std::getline(f, line);
    CHECK(line == "t,value");
    std::getline(f, line);
    CHECK(line == "0,1");
    std::getline(f, line);
    CHECK(line == "0.5,2");
    f.close();
    std::remove(path);
}
