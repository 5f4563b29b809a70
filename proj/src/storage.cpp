#include "stratum/storage.hpp"

#include "stratum/record.hpp"

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

namespace stratum {

namespace {

constexpr std::string_view kLogHeader = "stratumlog v1\n";
constexpr std::string_view kSnapMagic = "stratumsnap v1 ";

[[noreturn]] void throw_errno(const std::string& what, const std::string& path) {
    throw StorageError(what + " " + path + ": " + std::strerror(errno));
}

void write_all(int fd, const char* data, std::size_t size, const std::string& path) {
    std::size_t done = 0;
    while (done < size) {
        ssize_t n = ::write(fd, data + done, size - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw_errno("write failed on", path);
        }
        done += static_cast<std::size_t>(n);
    }
}

std::string encode_record(std::uint64_t seq, StoreTag tag, std::string_view body) {
    std::string line = "seq=" + std::to_string(seq);
    line += " tag=";
    line += to_string(tag);
    line += " crc=" + crc32_hex(body);
    line += " body=" + std::to_string(body.size()) + ":";
    line.append(body.data(), body.size());
    line += "\n";
    return line;
}

// Parser over the raw file image. Distinguishes "torn at end of file"
// (recoverable by truncation) from "malformed in the middle" (corruption).
struct LogParse {
    std::vector<LogRecord> records;
    std::size_t valid_end = 0; // byte offset just past the last whole record
};

bool parse_uint(const std::string& image, std::size_t& pos, std::uint64_t& out) {
    std::size_t start = pos;
    std::uint64_t value = 0;
    while (pos < image.size() && image[pos] >= '0' && image[pos] <= '9') {
        value = value * 10 + static_cast<std::uint64_t>(image[pos] - '0');
        ++pos;
    }
    if (pos == start) return false;
    out = value;
    return true;
}

bool parse_literal(const std::string& image, std::size_t& pos, std::string_view lit) {
    if (image.compare(pos, lit.size(), lit.data(), lit.size()) != 0) return false;
    pos += lit.size();
    return true;
}

LogParse parse_log(const std::string& image, const std::string& path) {
    LogParse out;
    if (image.size() < kLogHeader.size() ||
        image.compare(0, kLogHeader.size(), kLogHeader.data(), kLogHeader.size()) != 0) {
        throw StorageError("not a recognized log file (bad header): " + path);
    }
    std::size_t pos = kLogHeader.size();
    out.valid_end = pos;
    std::uint64_t expected_seq = 1;
    while (pos < image.size()) {
        std::size_t record_start = pos;
        LogRecord rec;
        std::string tag_word;
        std::uint64_t body_len = 0;
        // Any parse failure before the file ends is corruption; running out
        // of bytes is a torn append.
        bool torn = false;
        bool ok = [&] {
            if (!parse_literal(image, pos, "seq=")) return false;
            if (!parse_uint(image, pos, rec.seq)) return false;
            if (!parse_literal(image, pos, " tag=")) return false;
            std::size_t tag_start = pos;
            while (pos < image.size() && image[pos] >= 'a' && image[pos] <= 'z') ++pos;
            tag_word = image.substr(tag_start, pos - tag_start);
            if (tag_word.empty()) return false;
            if (!parse_literal(image, pos, " crc=")) return false;
            if (pos + 8 > image.size()) {
                torn = true;
                return false;
            }
            std::string crc_word = image.substr(pos, 8);
            pos += 8;
            if (!parse_literal(image, pos, " body=")) return false;
            if (!parse_uint(image, pos, body_len)) return false;
            if (!parse_literal(image, pos, ":")) return false;
            if (pos + body_len + 1 > image.size()) {
                torn = true;
                return false;
            }
            rec.body = image.substr(pos, body_len);
            pos += body_len;
            if (image[pos] != '\n') return false;
            ++pos;
            if (crc32_hex(rec.body) != crc_word) {
                throw StorageError("checksum mismatch at seq " +
                                   std::to_string(rec.seq) + " in " + path);
            }
            return true;
        }();
        if (!ok) {
            if (torn || pos >= image.size()) {
                // Ran out of file mid-record: crash artifact, drop the tail.
                out.valid_end = record_start;
                return out;
            }
            throw StorageError("malformed record after seq " +
                               std::to_string(expected_seq - 1) + " in " + path);
        }
        if (rec.seq != expected_seq) {
            throw StorageError("sequence gap in " + path + ": expected " +
                               std::to_string(expected_seq) + ", found " +
                               std::to_string(rec.seq));
        }
        rec.tag = store_tag_from(tag_word);
        ++expected_seq;
        out.valid_end = pos;
        out.records.push_back(std::move(rec));
    }
    return out;
}

} // namespace

std::string_view to_string(StoreTag tag) {
    switch (tag) {
        case StoreTag::knowledge: return "knowledge";
        case StoreTag::memory: return "memory";
        case StoreTag::wisdom: return "wisdom";
        case StoreTag::meta: return "meta";
    }
    throw StorageError("invalid store tag value");
}

StoreTag store_tag_from(std::string_view name) {
    if (name == "knowledge") return StoreTag::knowledge;
    if (name == "memory") return StoreTag::memory;
    if (name == "wisdom") return StoreTag::wisdom;
    if (name == "meta") return StoreTag::meta;
    throw StorageError("unknown store tag: " + std::string(name));
}

std::uint64_t MemorySink::append(StoreTag tag, std::string_view body) {
    std::uint64_t seq = records_.size() + 1;
    records_.push_back({seq, tag, std::string(body)});
    return seq;
}

FileLog::FileLog(int fd, std::string path, std::uint64_t last_seq)
    : fd_(fd), path_(std::move(path)), last_seq_(last_seq) {}

FileLog::~FileLog() {
    if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<FileLog> FileLog::create(const std::string& path) {
    int fd = ::open(path.c_str(), O_RDWR | O_CREAT | O_EXCL | O_CLOEXEC, 0644);
    if (fd < 0) throw_errno("cannot create log", path);
    auto log = std::unique_ptr<FileLog>(new FileLog(fd, path, 0));
    write_all(fd, kLogHeader.data(), kLogHeader.size(), path);
    if (::fsync(fd) != 0) throw_errno("fsync failed on", path);
    return log;
}

std::unique_ptr<FileLog> FileLog::open(
    const std::string& path,
    const std::function<void(const LogRecord&)>& on_record) {
    int fd = ::open(path.c_str(), O_RDWR | O_CLOEXEC);
    if (fd < 0) throw_errno("cannot open log", path);
    auto log = std::unique_ptr<FileLog>(new FileLog(fd, path, 0));

    std::string image;
    {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        image = buffer.str();
    }
    LogParse parsed = parse_log(image, path);
    if (parsed.valid_end < image.size()) {
        if (::ftruncate(fd, static_cast<off_t>(parsed.valid_end)) != 0) {
            throw_errno("cannot truncate torn record in", path);
        }
        if (::fsync(fd) != 0) throw_errno("fsync failed on", path);
    }
    if (::lseek(fd, 0, SEEK_END) < 0) throw_errno("seek failed on", path);

    for (const auto& rec : parsed.records) {
        log->last_seq_ = rec.seq;
        if (on_record) on_record(rec);
    }
    return log;
}

std::uint64_t FileLog::append(StoreTag tag, std::string_view body) {
    std::uint64_t seq = last_seq_ + 1;
    std::string line = encode_record(seq, tag, body);
    write_all(fd_, line.data(), line.size(), path_);
    if (::fsync(fd_) != 0) throw_errno("fsync failed on", path_);
    last_seq_ = seq;
    return seq;
}

void write_snapshot(const std::string& path, std::uint64_t as_of_seq,
                    std::string_view state) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out.is_open()) throw StorageError("cannot write snapshot: " + tmp);
        out << kSnapMagic << "as_of=" << as_of_seq << " hash=" << sha256_hex(state)
            << "\n";
        out.write(state.data(), static_cast<std::streamsize>(state.size()));
        out.flush();
        if (!out.good()) throw StorageError("snapshot write failed: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw StorageError("snapshot rename failed: " + path + ": " + ec.message());
}

SnapshotData read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) throw StorageError("cannot open snapshot: " + path);
    std::string header;
    if (!std::getline(in, header)) throw StorageError("empty snapshot: " + path);

    std::string image;
    {
        std::ostringstream buffer;
        buffer << in.rdbuf();
        image = buffer.str();
    }

    std::size_t pos = 0;
    std::uint64_t as_of = 0;
    auto expect = [&](std::string_view lit) {
        if (header.compare(pos, lit.size(), lit.data(), lit.size()) != 0)
            throw StorageError("not a recognized snapshot (bad header): " + path);
        pos += lit.size();
    };
    expect(kSnapMagic);
    expect("as_of=");
    {
        std::size_t start = pos;
        while (pos < header.size() && header[pos] >= '0' && header[pos] <= '9') {
            as_of = as_of * 10 + static_cast<std::uint64_t>(header[pos] - '0');
            ++pos;
        }
        if (pos == start) throw StorageError("snapshot header missing as_of: " + path);
    }
    expect(" hash=");
    std::string hash_word = header.substr(pos);
    if (hash_word.size() != 64)
        throw StorageError("snapshot header hash malformed: " + path);
    if (sha256_hex(image) != hash_word)
        throw StorageError("snapshot hash mismatch: " + path);
    return {as_of, std::move(image)};
}

std::optional<std::pair<std::uint64_t, std::string>> find_latest_snapshot(
    const std::string& dir) {
    std::optional<std::pair<std::uint64_t, std::string>> best;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
        std::string name = entry.path().filename().string();
        constexpr std::string_view prefix = "substrate.snap.";
        if (name.size() <= prefix.size() ||
            name.compare(0, prefix.size(), prefix.data(), prefix.size()) != 0) {
            continue;
        }
        std::string digits = name.substr(prefix.size());
        if (digits.empty() ||
            !std::all_of(digits.begin(), digits.end(),
                         [](char c) { return c >= '0' && c <= '9'; })) {
            continue;
        }
        std::uint64_t seq = std::stoull(digits);
        if (!best || seq > best->first) best = {{seq, entry.path().string()}};
    }
    if (ec) throw StorageError("cannot list directory " + dir + ": " + ec.message());
    return best;
}

DirectoryLock::DirectoryLock(const std::string& dir) {
    std::string path = dir + "/substrate.lock";
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw_errno("cannot open lock file", path);
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
        ::close(fd_);
        fd_ = -1;
        throw StorageError("substrate is locked by another process: " + path);
    }
}

DirectoryLock::~DirectoryLock() {
    if (fd_ >= 0) ::close(fd_);
}

} // namespace stratum
