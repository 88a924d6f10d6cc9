#include "mgt/semilinear.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace mgt {

namespace {

using nlohmann::json;

std::filesystem::path with_suffix(const std::filesystem::path& stem, const char* ext) {
    return std::filesystem::path(stem.string() + ext);
}

void write_le(std::ofstream& out, const std::vector<double>& v) {
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(v.data()),
                  static_cast<std::streamsize>(v.size() * sizeof(double)));
    } else {
        for (double d : v) {
            auto bits = std::bit_cast<std::uint64_t>(d);
            unsigned char bytes[8];
            for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
            out.write(reinterpret_cast<const char*>(bytes), 8);
        }
    }
}

void read_le(std::ifstream& in, std::vector<double>& v) {
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    if constexpr (std::endian::native != std::endian::little) {
        for (double& d : v) {
            unsigned char bytes[8];
            std::memcpy(bytes, &d, 8);
            std::uint64_t bits = 0;
            for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
            d = std::bit_cast<double>(bits);
        }
    }
}

json solver_to_json(const SolverConfig& c) {
    json j{{"beta", c.beta},
           {"p", c.p},
           {"dt", c.dt},
           {"t_max", c.t_max},
           {"blowup_amplitude", c.blowup_amplitude},
           {"picard_tol", c.picard_tol},
           {"picard_max_iter", c.picard_max_iter},
           {"forcing", c.forcing},
           {"output_interval", c.output_interval}};
    j["dealias"] = c.dealias ? json(*c.dealias) : json(nullptr);
    return j;
}

SolverConfig solver_from_json(const json& j) {
    SolverConfig c;
    c.beta = j.at("beta").get<double>();
    c.p = j.at("p").get<double>();
    c.dt = j.at("dt").get<double>();
    c.t_max = j.at("t_max").get<double>();
    c.blowup_amplitude = j.at("blowup_amplitude").get<double>();
    c.picard_tol = j.at("picard_tol").get<double>();
    c.picard_max_iter = j.at("picard_max_iter").get<int>();
    c.forcing = j.at("forcing").get<bool>();
    c.output_interval = j.at("output_interval").get<double>();
    if (!j.at("dealias").is_null()) c.dealias = j.at("dealias").get<bool>();
    return c;
}

} // namespace

void save_trajectory(const Trajectory& traj, const std::filesystem::path& stem) {
    const auto bin = with_suffix(stem, ".bin"), side = with_suffix(stem, ".json");
    {
        std::ofstream out(bin, std::ios::binary);
        if (!out) throw std::runtime_error(bin.string() + ": cannot open for writing");
        for (const auto& s : traj.states) {
            write_le(out, s.u.values);
            write_le(out, s.ut.values);
            write_le(out, s.utt.values);
        }
        if (!out) throw std::runtime_error(bin.string() + ": write failed");
    }
    json j;
    j["format"] = "mgt-trajectory";
    j["version"] = 1;
    j["grid"] = {{"dim", traj.grid.dim()},
                 {"half_width", traj.grid.half_width()},
                 {"points_per_dim", traj.grid.points_per_dim()}};
    j["times"] = traj.times;
    j["fields"] = {"u", "ut", "utt"};
    j["dtype"] = "float64-le";
    j["layout"] = "state-major, then field, then row-major point";
    j["config"] = solver_to_json(traj.cfg);
    j["blowup"] = traj.blowup ? json{{"time", traj.blowup->time}, {"reason", to_string(traj.blowup->reason)}}
                              : json(nullptr);
    std::ofstream out(side);
    if (!out) throw std::runtime_error(side.string() + ": cannot open for writing");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error(side.string() + ": write failed");
}

Trajectory load_trajectory(const std::filesystem::path& stem) {
    const auto bin = with_suffix(stem, ".bin"), side = with_suffix(stem, ".json");
    std::ifstream jin(side);
    if (!jin) throw std::runtime_error(side.string() + ": cannot open");
    json j;
    try {
        jin >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error(side.string() + ": " + e.what());
    }
    if (j.value("format", "") != "mgt-trajectory" || j.value("version", 0) != 1)
        throw std::runtime_error(side.string() + ": not an mgt-trajectory v1 sidecar");

    Trajectory traj;
    const auto& gj = j.at("grid");
    traj.grid = make_grid(gj.at("dim").get<int>(), gj.at("half_width").get<double>(),
                          gj.at("points_per_dim").get<int>());
    traj.cfg = solver_from_json(j.at("config"));
    const auto times = j.at("times").get<std::vector<double>>();

    std::ifstream in(bin, std::ios::binary);
    if (!in) throw std::runtime_error(bin.string() + ": cannot open");
    for (double t : times) {
        EvolutionState s = EvolutionState::zero(traj.grid);
        s.t = t;
        read_le(in, s.u.values);
        read_le(in, s.ut.values);
        read_le(in, s.utt.values);
        if (!in) throw std::runtime_error(bin.string() + ": truncated data");
        traj.push_back(std::move(s));
    }
    if (!j.at("blowup").is_null())
        traj.blowup = Blowup{j["blowup"].at("time").get<double>(),
                             blowup_reason_from_string(j["blowup"].at("reason").get<std::string>())};
    return traj;
}

} // namespace mgt
