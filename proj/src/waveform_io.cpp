#include "cvqkd/waveform_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace cvqkd {

namespace {

static_assert(sizeof(double) == 8);

void byteswap_if_big_endian(std::vector<double>& v) {
    if constexpr (std::endian::native == std::endian::big) {
        for (double& d : v) {
            std::uint64_t u;
            std::memcpy(&u, &d, 8);
            u = __builtin_bswap64(u);
            std::memcpy(&d, &u, 8);
        }
    }
}

}  // namespace

void write_waveform(const Waveform& w, const std::string& path) {
    w.validate();
    {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + path + " for writing");
        std::vector<double> buf = w.samples;
        byteswap_if_big_endian(buf);
        f.write(reinterpret_cast<const char*>(buf.data()),
                static_cast<std::streamsize>(buf.size() * 8));
        if (!f) throw std::runtime_error("write failed: " + path);
    }
    nlohmann::json j{{"sample_rate", w.sample_rate},
                     {"t0", w.t0},
                     {"n_samples", w.samples.size()},
                     {"format", "f64le"}};
    std::ofstream f(path + ".json");
    if (!f) throw std::runtime_error("cannot open " + path + ".json for writing");
    f << j.dump(2) << "\n";
}

Waveform read_waveform(const std::string& path) {
    nlohmann::json j;
    {
        std::ifstream f(path + ".json");
        if (!f) throw std::runtime_error("missing sidecar " + path + ".json");
        f >> j;
    }
    Waveform w;
    w.sample_rate = j.at("sample_rate").get<double>();
    w.t0 = j.at("t0").get<double>();
    const auto n = j.at("n_samples").get<std::size_t>();

    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    w.samples.resize(n);
    f.read(reinterpret_cast<char*>(w.samples.data()), static_cast<std::streamsize>(n * 8));
    if (static_cast<std::size_t>(f.gcount()) != n * 8)
        throw std::runtime_error("short read: " + path);
    byteswap_if_big_endian(w.samples);
    w.validate();
    return w;
}

void write_waveform_csv(const Waveform& w, const std::string& path) {
    w.validate();
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << "t,value\n";
    char line[64];
    for (std::size_t i = 0; i < w.samples.size(); ++i) {
        const double t = w.t0 + static_cast<double>(i) / w.sample_rate;
        std::snprintf(line, sizeof(line), "%.17g,%.17g\n", t, w.samples[i]);
        f << line;
    }
}

}  // namespace cvqkd
