#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "ensreg/types.hpp"

namespace ensreg::detail {

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw io_error("cannot open " + path.string() + " for reading");
    }
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

// Write-to-temp-then-rename: error paths never leave partial output files.
inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& data) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw io_error("cannot open " + tmp.string() + " for writing");
        }
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        if (!out) {
            throw io_error("short write to " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw io_error("cannot rename " + tmp.string() + " to " + path.string() +
                       ": " + ec.message());
    }
}

} // namespace ensreg::detail
