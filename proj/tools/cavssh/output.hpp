#pragma once

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "config.hpp"

namespace cli {

inline std::string sha256_hex(std::string_view data) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    std::string hex;
    hex.reserve(2 * len);
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

/// Files are assembled in memory and only hit the disk in commit(), so a run that
/// fails validation leaves nothing behind.
class OutputSet {
public:
    void add(std::string name, std::string content) { files_.emplace_back(std::move(name), std::move(content)); }

    void converged(const std::string& key, bool ok) { convergence_[key] = ok; }
    void meta(const std::string& key, json value) { metadata_[key] = std::move(value); }

    [[nodiscard]] const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }
    [[nodiscard]] bool all_converged() const {
        for (const auto& [k, ok] : convergence_) {
            if (!ok) return false;
        }
        return true;
    }

    json manifest_entries() const {
        json out = json::array();
        for (const auto& [name, content] : files_) {
            out.push_back({{"file", name}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
        }
        return out;
    }
    [[nodiscard]] const std::map<std::string, bool>& convergence() const { return convergence_; }
    [[nodiscard]] const json& metadata() const { return metadata_; }

private:
    std::vector<std::pair<std::string, std::string>> files_;
    std::map<std::string, bool> convergence_;
    json metadata_ = json::object();
};

inline void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) throw IoError("failed writing " + path.string());
}

inline void prepare_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

}  // namespace cli
