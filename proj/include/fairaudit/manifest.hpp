#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fairaudit/errors.hpp"
#include "fairaudit/report_io.hpp"

// Run manifests: every CLI invocation records its command, inputs, the
// digest of the consumed schema config, parameter values and outputs, so a
// run can be replayed byte for byte.

namespace fairaudit {

inline constexpr const char* kToolVersion = "0.1.0";

/// FNV-1a 64-bit content digest, rendered as "fnv1a64:<hex>".
inline std::string content_digest(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path.string() + "' for digest");
    std::stringstream buf;
    buf << in.rdbuf();
    return content_digest(buf.str());
}

struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> inputs; // label -> path
    std::optional<std::string> schema_digest;
    std::vector<std::pair<std::string, std::string>> parameters; // name -> rendered value
    std::vector<std::string> outputs;

    void add_input(const std::string& label, const std::filesystem::path& path) {
        inputs.push_back({label, path.string()});
    }
    void add_parameter(const std::string& name, const std::string& value) {
        parameters.push_back({name, value});
    }
    void add_output(const std::filesystem::path& path) { outputs.push_back(path.string()); }
};

inline std::string to_json(const RunManifest& m) {
    std::string out = "{";
    out += "\"command\":" + detail::quoted(m.command);
    out += ",\"tool_version\":" + detail::quoted(kToolVersion);
    out += ",\"inputs\":{";
    for (std::size_t i = 0; i < m.inputs.size(); ++i) {
        if (i) out += ",";
        out += detail::quoted(m.inputs[i].first) + ":" + detail::quoted(m.inputs[i].second);
    }
    out += "}";
    out += ",\"schema_config_digest\":" +
           (m.schema_digest ? detail::quoted(*m.schema_digest) : std::string("null"));
    out += ",\"parameters\":{";
    for (std::size_t i = 0; i < m.parameters.size(); ++i) {
        if (i) out += ",";
        out += detail::quoted(m.parameters[i].first) + ":" + m.parameters[i].second;
    }
    out += "}";
    out += ",\"outputs\":[";
    for (std::size_t i = 0; i < m.outputs.size(); ++i) {
        if (i) out += ",";
        out += detail::quoted(m.outputs[i]);
    }
    out += "]}";
    return out;
}

inline void write_manifest(const RunManifest& m, const std::filesystem::path& path) {
    detail::write_whole_file(path, to_json(m) + "\n");
}

} // namespace fairaudit
