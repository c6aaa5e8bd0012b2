#include "dyadlab/io.hpp"

#include <bit>
#include <charconv>
#include <fstream>

namespace dyadlab {

static_assert(std::endian::native == std::endian::little,
              "mesh files are little-endian; big-endian hosts are unsupported");

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    require(ec == std::errc(), "format_double failed");
    return std::string(buf, ptr);
}

nlohmann::json grid_to_json(const GridSpec& g) {
    nlohmann::json j;
    j["n"] = g.n();
    j["L"] = g.L();
    j["M"] = g.M();
    if (g.seed().has_value())
        j["seed"] = *g.seed();
    else
        j["seed"] = nullptr;
    return j;
}

GridPtr grid_from_json(const nlohmann::json& j) {
    require(j.is_object(), "grid: expected an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        require(key == "n" || key == "L" || key == "M" || key == "seed",
                "grid: unknown key '" + key + "'");
    }
    require(j.contains("n") && j.contains("L") && j.contains("M"),
            "grid: need n, L and M");
    std::optional<uint64_t> seed;
    if (j.contains("seed") && !j["seed"].is_null()) seed = j["seed"].get<uint64_t>();
    return make_grid(j["n"].get<int>(), j["L"].get<int>(), j["M"].get<int>(), seed);
}

void write_mesh(const std::string& base, const MeshFunction& f) {
    {
        std::ofstream out(base + ".f64", std::ios::binary);
        require(out.good(), "write_mesh: cannot open " + base + ".f64");
        out.write(reinterpret_cast<const char*>(f.values().data()),
                  static_cast<std::streamsize>(f.values().size() * sizeof(double)));
    }
    write_text(base + ".json", grid_to_json(*f.grid()).dump(2) + "\n");
}

MeshFunction read_mesh(const std::string& base) {
    std::ifstream meta(base + ".json");
    require(meta.good(), "read_mesh: cannot open " + base + ".json");
    nlohmann::json j;
    meta >> j;
    MeshFunction f(grid_from_json(j));
    std::ifstream in(base + ".f64", std::ios::binary);
    require(in.good(), "read_mesh: cannot open " + base + ".f64");
    in.read(reinterpret_cast<char*>(f.values().data()),
            static_cast<std::streamsize>(f.values().size() * sizeof(double)));
    require(in.gcount() ==
                static_cast<std::streamsize>(f.values().size() * sizeof(double)),
            "read_mesh: file too short");
    return f;
}

void write_mesh_csv(const std::string& path, const MeshFunction& f) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "write_mesh_csv: cannot open " + path);
    out << "index,value\n";
    for (int64_t i = 0; i < f.size(); ++i)
        out << i << "," << format_double(f[i]) << "\n";
}

void write_curve_csv(const std::string& path, const DecayCurve& curve) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "write_curve_csv: cannot open " + path);
    out << "x,value,envelope\n";
    const auto env = curve.monotone_envelope();
    for (std::size_t i = 0; i < curve.xs.size(); ++i)
        out << format_double(curve.xs[i]) << "," << format_double(curve.values[i]) << ","
            << format_double(env[i]) << "\n";
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "write_text: cannot open " + path);
    out << content;
}

}  // namespace dyadlab
