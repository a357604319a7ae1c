#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "xxgraph/constants.hpp"
#include "xxgraph/grape.hpp"

namespace xxgraph {

/// On-disk form of an optimized schedule.
struct ScheduleRecord {
    std::string mode;  // "ideal" | "rydberg"
    int sites = 0;
    ControlSchedule schedule;
    std::vector<double> phi_history;
    double final_population = 0.0;
    std::uint64_t seed = 0;
    std::string constants_version{kConstantsVersion};
};

inline nlohmann::json to_json(const ScheduleRecord& r) {
    return {
        {"mode", r.mode},
        {"N", r.sites},
        {"T", r.schedule.duration},
        {"n", r.schedule.slices()},
        {"amplitudes", r.schedule.amplitudes},
        {"phi_history", r.phi_history},
        {"final_population", r.final_population},
        {"seed", r.seed},
        {"constants_version", r.constants_version},
    };
}

inline ScheduleRecord schedule_record_from_json(const nlohmann::json& j) {
    ScheduleRecord r;
    try {
        r.mode = j.at("mode").get<std::string>();
        r.sites = j.at("N").get<int>();
        r.schedule.duration = j.at("T").get<double>();
        r.schedule.amplitudes = j.at("amplitudes").get<std::vector<double>>();
        r.phi_history = j.at("phi_history").get<std::vector<double>>();
        r.final_population = j.at("final_population").get<double>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.constants_version = j.at("constants_version").get<std::string>();
        if (j.at("n").get<int>() != r.schedule.slices()) throw Error("schedule record: n does not match amplitudes");
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("schedule record: ") + e.what());
    }
    if (r.mode != "ideal" && r.mode != "rydberg") throw Error("schedule record: unknown mode '" + r.mode + "'");
    r.schedule.validate();
    return r;
}

inline ScheduleRecord make_record(const std::string& mode, int sites, const GrapeResult& result) {
    return {mode, sites, result.schedule, result.phi_history, result.final_population, result.seed,
            std::string(kConstantsVersion)};
}

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("parse error in '" + path + "': " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
    if (!out) throw Error("write failed for '" + path + "'");
}

/// FNV-1a over the canonical JSON dump; stable across runs and platforms.
inline std::string config_hash(const nlohmann::json& config) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : config.dump()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << h;
    return os.str();
}

}  // namespace xxgraph
