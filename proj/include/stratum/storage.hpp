#pragma once
// Durable substrate: one interleaved append-only event log for all stores
// (a single total order — the consolidation cycle's multi-store commit
// depends on it), plus snapshot files and a per-directory advisory lock.
//
// Log file format (`substrate.log`), line-oriented:
//
//     stratumlog v1\n
//     seq=<n> tag=<store> crc=<8 hex> body=<len>:<bytes>\n
//     ...
//
// seq is dense and strictly increasing from 1. tag is one of knowledge,
// memory, wisdom, meta. crc is the CRC-32 of the body bytes. The body is
// length-prefixed so it may contain any byte. A torn trailing record
// (crash mid-append) is detected and truncated on open; a corrupt record
// anywhere else is an error, never silently skipped.
//
// Snapshot file format (`substrate.snap.<seq>`):
//
//     stratumsnap v1 as_of=<seq> hash=<64 hex>\n
//     <canonical state bytes>
//
// hash is the SHA-256 of the state bytes and is verified on load.

#include "stratum/errors.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stratum {

enum class StoreTag {
    knowledge,
    memory,
    wisdom,
    meta,
};

std::string_view to_string(StoreTag tag);
StoreTag store_tag_from(std::string_view name);

struct LogRecord {
    std::uint64_t seq = 0;
    StoreTag tag = StoreTag::meta;
    std::string body;
};

// Where committed events go. append is durable before it returns (for the
// file-backed sink; the in-memory sink is for tests and ephemeral engines).
class EventSink {
public:
    virtual ~EventSink() = default;
    virtual std::uint64_t append(StoreTag tag, std::string_view body) = 0;
    virtual std::uint64_t last_seq() const = 0;
};

// Retains every record; replayable. Used by in-memory engines and tests.
class MemorySink final : public EventSink {
public:
    std::uint64_t append(StoreTag tag, std::string_view body) override;
    std::uint64_t last_seq() const override { return records_.size(); }
    const std::vector<LogRecord>& records() const { return records_; }

private:
    std::vector<LogRecord> records_;
};

// File-backed log. Every append is written, flushed, and fsynced before
// the sequence number is returned.
class FileLog final : public EventSink {
public:
    ~FileLog() override;
    FileLog(const FileLog&) = delete;
    FileLog& operator=(const FileLog&) = delete;

    // Create a fresh log (fails if the file exists).
    static std::unique_ptr<FileLog> create(const std::string& path);

    // Open an existing log, streaming every whole record to on_record in
    // order. A torn trailing record is truncated away; a bad CRC, a
    // non-dense sequence, or an unknown format version is StorageError.
    static std::unique_ptr<FileLog> open(
        const std::string& path,
        const std::function<void(const LogRecord&)>& on_record);

    std::uint64_t append(StoreTag tag, std::string_view body) override;
    std::uint64_t last_seq() const override { return last_seq_; }

private:
    FileLog(int fd, std::string path, std::uint64_t last_seq);

    int fd_ = -1;
    std::string path_;
    std::uint64_t last_seq_ = 0;
};

// Snapshot I/O. write_snapshot is atomic (temp file + rename).
void write_snapshot(const std::string& path, std::uint64_t as_of_seq,
                    std::string_view state);
struct SnapshotData {
    std::uint64_t as_of_seq = 0;
    std::string state;
};
SnapshotData read_snapshot(const std::string& path);

// Newest `substrate.snap.<seq>` in dir, if any.
std::optional<std::pair<std::uint64_t, std::string>> find_latest_snapshot(
    const std::string& dir);

// Non-blocking flock on `<dir>/substrate.lock`, held for the object's
// lifetime. A second writer on the same directory fails fast instead of
// interleaving appends.
class DirectoryLock {
public:
    explicit DirectoryLock(const std::string& dir);
    ~DirectoryLock();
    DirectoryLock(const DirectoryLock&) = delete;
    DirectoryLock& operator=(const DirectoryLock&) = delete;

private:
    int fd_ = -1;
};

} // namespace stratum
