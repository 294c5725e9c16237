#pragma once

// Shared plumbing: error types, hashing/seed mixing, atomic file writes,
// NA-aware number formatting used by the text artifact formats.

#include <chrono>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hop {

using NodeId = std::int32_t;
using EdgeId = std::int64_t;

// Raised on malformed external input (text files, caches, configs).
// `where` carries file:line context when available.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
    ParseError(const std::string& file, std::size_t line, const std::string& msg)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + msg) {}
};

// Raised when a caller violates a documented precondition.
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised on I/O failures (missing files, short reads, rename failures).
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// splitmix64: statistically strong 64-bit mixer. Used to derive independent
// stream seeds from structured keys; never used as the sampling engine itself.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Order-sensitive combiner: mix_seed(a, b) != mix_seed(b, a) in general.
inline std::uint64_t mix_seed(std::uint64_t acc, std::uint64_t v) {
    return splitmix64(acc ^ (v + 0x9e3779b97f4a7c15ull + (acc << 6) + (acc >> 2)));
}

inline std::uint64_t double_bits(double d) {
    std::uint64_t u;
    static_assert(sizeof(u) == sizeof(d));
    std::memcpy(&u, &d, sizeof(u));
    return u;
}

// Writes `content` to `path` atomically: temp file in the same directory,
// flush, then rename. Readers never observe a partial artifact.
inline void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path dir = path.parent_path();
    if (dir.empty()) dir = ".";
    fs::path tmp = dir / (path.filename().string() + ".tmp." + std::to_string(splitmix64(
                              std::hash<std::string>{}(path.string()) ^
                              static_cast<std::uint64_t>(
                                  std::chrono::steady_clock::now().time_since_epoch().count()))));
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot open temp file for writing: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw IoError("short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw IoError("rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
    }
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Round-trip-exact double formatting for text artifacts.
inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Optional time offsets serialize as "NA" when absent.
inline std::string fmt_optional(const std::optional<double>& v) {
    return v ? fmt_double(*v) : std::string("NA");
}

inline std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace hop
