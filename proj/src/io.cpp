#include "ubmlab/io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace ubmlab::io {

using nlohmann::json;

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

std::string read_text_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << content;
}

std::string iso_timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string RunManifest::to_json() const {
    json j;
    j["schema"] = "ubm-manifest/1";
    j["command"] = command;
    j["tool_version"] = tool_version;
    j["master_seed"] = master_seed;
    j["config"] = config;
    j["outputs"] = outputs;
    j["started_utc"] = started_utc;
    j["finished_utc"] = finished_utc;
    return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json_file(const std::string& path) {
    const json j = json::parse(read_text_file(path));
    if (j.value("schema", "") != "ubm-manifest/1")
        throw std::runtime_error("manifest: unexpected schema in " + path);
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.tool_version = j.value("tool_version", "");
    m.master_seed = j.at("master_seed").get<std::uint64_t>();
    m.config = j.at("config").get<std::map<std::string, std::string>>();
    m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
    m.started_utc = j.value("started_utc", "");
    m.finished_utc = j.value("finished_utc", "");
    return m;
}

void RunManifest::add_output(const std::string& dir, const std::string& name) {
    outputs[name] = fnv1a64_hex(read_text_file((std::filesystem::path(dir) / name).string()));
}

void RunManifest::write(const std::string& path) const { write_text_file(path, to_json()); }

} // namespace ubmlab::io
