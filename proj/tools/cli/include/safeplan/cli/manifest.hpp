#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace safeplan::cli {

struct InputDigest {
    std::string role;
    std::string path;
    std::string sha256;
};

struct StageTiming {
    std::string stage;
    double ms = 0.0;
};

struct OutputFile {
    std::string role;
    std::string path;
};

/// Record of one command run. `config` is the canonical config text after
/// command-line overrides, so feeding it back with --config repeats the run.
struct RunManifest {
    std::string command;
    std::string config;
    std::uint64_t rng_seed = 0;
    std::vector<InputDigest> inputs;
    std::vector<StageTiming> timings;
    std::vector<OutputFile> outputs;

    /// Hashes the file now and records it. Throws std::runtime_error if unreadable.
    void add_input(const std::string& role, const std::string& path);
    std::string to_json() const;
};

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

}  // namespace safeplan::cli
