#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ubmlab::io {

// 17 significant digits; enough to round-trip any double exactly.
std::string fmt17(double x);

std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

std::string iso_timestamp_utc();

// Record of one CLI invocation: resolved configuration, seed, and the hash
// inventory of every file the command wrote. Re-running the same manifest
// must reproduce the inventory bit for bit.
struct RunManifest {
    std::string command;
    std::string tool_version;
    std::uint64_t master_seed = 0;
    std::map<std::string, std::string> config;     // fully resolved, defaults included
    std::map<std::string, std::string> outputs;    // file name -> fnv1a64 hex
    std::string started_utc;
    std::string finished_utc;

    std::string to_json() const;
    static RunManifest from_json_file(const std::string& path);

    void add_output(const std::string& dir, const std::string& name);
    void write(const std::string& path) const;
};

} // namespace ubmlab::io
