#pragma once
// Canonical record encoding: one record per line, fields in fixed order.
//
// Grammar (byte-exact; UTF-8 throughout):
//   record  := field (' ' field)* '\n'
//   field   := key '=' value
//   key     := [a-z_][a-z0-9_]*
//   value   := text | scalar
//   text    := <len> ':' <len raw bytes>      -- len is the decimal byte count
//   scalar  := run of bytes with no space/newline, not starting digits+':'
//
// Scalars carry integers (decimal), reals (printf "%.17g"), enum words, and
// hex digests. Text values are length-prefixed so arbitrary content (spaces,
// '=', newlines) round-trips; a digit run followed by ':' always means text.
// Machine-generated id lists are comma-joined inside a text value; lists of
// arbitrary text use a count field plus one text field per item.

#include "stratum/chrono.hpp"
#include "stratum/errors.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stratum {

class RecordWriter {
public:
    RecordWriter& scalar(std::string_view key, std::string_view value);
    RecordWriter& integer(std::string_view key, std::int64_t value);
    RecordWriter& unsigned_integer(std::string_view key, std::uint64_t value);
    RecordWriter& real(std::string_view key, double value);
    RecordWriter& text(std::string_view key, std::string_view value);
    // Optional text: '_' when absent (a text value is never mistaken for it —
    // text always starts with a digit run and ':').
    RecordWriter& opt_text(std::string_view key, const std::optional<std::string>& value);
    RecordWriter& id_list(std::string_view key, const std::vector<std::string>& ids);
    RecordWriter& time(std::string_view key, Timestamp t);
    // Optional timestamp: '_' when absent.
    RecordWriter& opt_time(std::string_view key, const std::optional<Timestamp>& t);
    RecordWriter& opt_real(std::string_view key, const std::optional<double>& v);
    RecordWriter& flag(std::string_view key, bool value);

    // The record body, without a trailing newline.
    std::string str() const { return out_; }

private:
    void key_prefix(std::string_view key);
    std::string out_;
};

struct Field {
    std::string key;
    std::string value;
    bool is_text = false;
};

// Parsed record with typed accessors. Accessors throw StorageError on a
// missing key or a malformed value.
class Record {
public:
    static Record parse(std::string_view line);

    bool has(std::string_view key) const;
    const std::string& raw(std::string_view key) const;

    std::string_view scalar(std::string_view key) const;
    std::int64_t integer(std::string_view key) const;
    std::uint64_t unsigned_integer(std::string_view key) const;
    double real(std::string_view key) const;
    const std::string& text(std::string_view key) const;
    std::optional<std::string> opt_text(std::string_view key) const;
    std::vector<std::string> id_list(std::string_view key) const;
    Timestamp time(std::string_view key) const;
    std::optional<Timestamp> opt_time(std::string_view key) const;
    std::optional<double> opt_real(std::string_view key) const;
    bool flag(std::string_view key) const;

    const std::vector<Field>& fields() const { return fields_; }

private:
    const Field* find(std::string_view key) const;
    const Field& require(std::string_view key) const;
    std::vector<Field> fields_;
};

std::string format_real(double value);

// CRC-32 (IEEE) of a byte string, as 8 lowercase hex digits.
std::string crc32_hex(std::string_view bytes);

// SHA-256 of a byte string, as 64 lowercase hex digits.
std::string sha256_hex(std::string_view bytes);

} // namespace stratum
