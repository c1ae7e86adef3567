#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace testutil {

inline std::string asset_dir() {
    const char* dir = std::getenv("INFLUCITE_TEST_ASSETS");
    if (!dir) throw std::runtime_error("INFLUCITE_TEST_ASSETS is not set");
    return dir;
}

// Committed, read-only test assets (the stemmer oracle).
inline std::string asset_path(const std::string& name) {
    return asset_dir() + "/" + name;
}

// Scratch space for files tests generate at runtime.
inline std::string scratch_path(const std::string& name) {
    static std::filesystem::path dir = [] {
        auto d = std::filesystem::temp_directory_path() / "influcite_unit_scratch";
        std::filesystem::create_directories(d);
        return d;
    }();
    return (dir / name).string();
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

}  // namespace testutil
