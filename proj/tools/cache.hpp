#pragma once

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

namespace hmiw::cache {

namespace fs = std::filesystem;

inline std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Advisory lock held for the lifetime of the object.
class FileLock {
  public:
    FileLock(const fs::path& p, bool exclusive) {
        fd_ = ::open(p.c_str(), O_RDWR | O_CREAT, 0644);
        if (fd_ >= 0) ::flock(fd_, exclusive ? LOCK_EX : LOCK_SH);
    }
    ~FileLock() {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }
    FileLock(const FileLock&) = delete;
    FileLock& operator=(const FileLock&) = delete;

  private:
    int fd_ = -1;
};

/// Entries live at <dir>/<command>/<hash>.json; the key text includes the code version,
/// so entries from other versions are never found.
class Store {
  public:
    explicit Store(fs::path dir) : dir_(std::move(dir)) {}

    std::optional<std::string> get(const std::string& command, const std::string& key) const {
        auto path = entry(command, key);
        if (!fs::exists(path)) return std::nullopt;
        FileLock lock(lockfile(), false);
        std::ifstream in(path, std::ios::binary);
        std::string stored_key;
        if (!std::getline(in, stored_key) || stored_key != key) return std::nullopt;
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    void put(const std::string& command, const std::string& key, const std::string& value) const {
        fs::create_directories(dir_ / command);
        FileLock lock(lockfile(), true);
        auto path = entry(command, key);
        auto tmp = path;
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary);
            out << key << '\n' << value;
        }
        fs::rename(tmp, path);
    }

  private:
    fs::path entry(const std::string& command, const std::string& key) const { return dir_ / command / (fnv1a_hex(key) + ".json"); }
    fs::path lockfile() const {
        fs::create_directories(dir_);
        return dir_ / ".lock";
    }
    fs::path dir_;
};

}  // namespace hmiw::cache
