#include "safeplan/cli/manifest.hpp"

#include <array>
#include <fstream>
#include <memory>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

namespace safeplan::cli {

std::string sha256_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path);

    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                                 &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 init failed");

    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0)
            EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md.data(), &len);

    std::string hex;
    for (unsigned int i = 0; i < len; ++i)
        hex += fmt::format("{:02x}", md[i]);
    return hex;
}

void RunManifest::add_input(const std::string& role, const std::string& path)
{
    inputs.push_back({role, path, sha256_file(path)});
}

std::string RunManifest::to_json() const
{
    nlohmann::ordered_json j;
    j["command"] = command;
    j["rng_seed"] = rng_seed;
    j["config"] = config;
    j["inputs"] = nlohmann::ordered_json::array();
    for (const auto& in : inputs)
        j["inputs"].push_back({{"role", in.role}, {"path", in.path}, {"sha256", in.sha256}});
    j["timings_ms"] = nlohmann::ordered_json::array();
    for (const auto& t : timings)
        j["timings_ms"].push_back({{"stage", t.stage}, {"ms", t.ms}});
    j["outputs"] = nlohmann::ordered_json::array();
    for (const auto& o : outputs)
        j["outputs"].push_back({{"role", o.role}, {"path", o.path}});
    return j.dump(2) + "\n";
}

}  // namespace safeplan::cli
