#include "stratum/record.hpp"

#include <openssl/evp.h>
#include <zlib.h>

#include <cctype>
#include <charconv>
#include <cstdio>

namespace stratum {

namespace {

bool valid_key(std::string_view key) {
    if (key.empty()) return false;
    if (!(std::islower(static_cast<unsigned char>(key[0])) || key[0] == '_')) return false;
    for (char c : key) {
        const auto u = static_cast<unsigned char>(c);
        if (!(std::islower(u) || std::isdigit(u) || c == '_')) return false;
    }
    return true;
}

std::string to_hex(const unsigned char* data, std::size_t n) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(n * 2);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(kHex[(data[i] >> 4) & 0x0F]);
        out.push_back(kHex[data[i] & 0x0F]);
    }
    return out;
}

} // namespace

void RecordWriter::key_prefix(std::string_view key) {
    if (!valid_key(key)) throw StorageError("record: bad field key '" + std::string(key) + "'");
    if (!out_.empty()) out_.push_back(' ');
    out_.append(key);
    out_.push_back('=');
}

RecordWriter& RecordWriter::scalar(std::string_view key, std::string_view value) {
    if (value.empty()) throw StorageError("record: empty scalar for '" + std::string(key) + "'");
    for (char c : value) {
        if (c == ' ' || c == '\n')
            throw StorageError("record: scalar contains separator for '" + std::string(key) + "'");
    }
    // A leading digit run followed by ':' would parse as text.
    std::size_t i = 0;
    while (i < value.size() && std::isdigit(static_cast<unsigned char>(value[i]))) ++i;
    if (i > 0 && i < value.size() && value[i] == ':')
        throw StorageError("record: scalar mimics text prefix for '" + std::string(key) + "'");
    key_prefix(key);
    out_.append(value);
    return *this;
}

RecordWriter& RecordWriter::integer(std::string_view key, std::int64_t value) {
    return scalar(key, std::to_string(value));
}

RecordWriter& RecordWriter::unsigned_integer(std::string_view key, std::uint64_t value) {
    return scalar(key, std::to_string(value));
}

std::string format_real(double value) {
    // Shortest representation that parses back to the same double, so the
    // encoding is byte-stable and human-readable ("0.05", not a 17-digit tail).
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

RecordWriter& RecordWriter::real(std::string_view key, double value) {
    return scalar(key, format_real(value));
}

RecordWriter& RecordWriter::text(std::string_view key, std::string_view value) {
    key_prefix(key);
    out_.append(std::to_string(value.size()));
    out_.push_back(':');
    out_.append(value);
    return *this;
}

RecordWriter& RecordWriter::opt_text(std::string_view key,
                                     const std::optional<std::string>& value) {
    return value ? text(key, *value) : scalar(key, "_");
}

RecordWriter& RecordWriter::id_list(std::string_view key, const std::vector<std::string>& ids) {
    std::string joined;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i].find(',') != std::string::npos)
            throw StorageError("record: id contains comma");
        if (i) joined.push_back(',');
        joined.append(ids[i]);
    }
    return text(key, joined);
}

RecordWriter& RecordWriter::time(std::string_view key, Timestamp t) {
    return integer(key, t.ms);
}

RecordWriter& RecordWriter::opt_time(std::string_view key, const std::optional<Timestamp>& t) {
    return t ? integer(key, t->ms) : scalar(key, "_");
}

RecordWriter& RecordWriter::opt_real(std::string_view key, const std::optional<double>& v) {
    return v ? real(key, *v) : scalar(key, "_");
}

RecordWriter& RecordWriter::flag(std::string_view key, bool value) {
    return scalar(key, value ? "1" : "0");
}

Record Record::parse(std::string_view line) {
    if (line.empty()) throw StorageError("record: empty record");
    Record rec;
    std::size_t pos = 0;
    const std::size_t n = line.size();
    while (pos < n) {
        const std::size_t eq = line.find('=', pos);
        if (eq == std::string_view::npos)
            throw StorageError("record: field without '='");
        Field f;
        f.key = std::string(line.substr(pos, eq - pos));
        if (!valid_key(f.key)) throw StorageError("record: bad key '" + f.key + "'");
        pos = eq + 1;

        std::size_t digits = pos;
        while (digits < n && std::isdigit(static_cast<unsigned char>(line[digits]))) ++digits;
        if (digits > pos && digits < n && line[digits] == ':') {
            std::size_t len = 0;
            const auto res =
                std::from_chars(line.data() + pos, line.data() + digits, len);
            if (res.ec != std::errc())
                throw StorageError("record: bad text length");
            const std::size_t start = digits + 1;
            if (start + len > n) throw StorageError("record: truncated text value");
            f.value = std::string(line.substr(start, len));
            f.is_text = true;
            pos = start + len;
        } else {
            std::size_t end = pos;
            while (end < n && line[end] != ' ') ++end;
            if (end == pos) throw StorageError("record: empty value for '" + f.key + "'");
            f.value = std::string(line.substr(pos, end - pos));
            pos = end;
        }
        for (const auto& existing : rec.fields_)
            if (existing.key == f.key)
                throw StorageError("record: duplicate key '" + f.key + "'");
        rec.fields_.push_back(std::move(f));
        if (pos < n) {
            if (line[pos] != ' ') throw StorageError("record: expected field separator");
            ++pos;
            if (pos == n) throw StorageError("record: trailing separator");
        }
    }
    return rec;
}

const Field* Record::find(std::string_view key) const {
    for (const auto& f : fields_)
        if (f.key == key) return &f;
    return nullptr;
}

const Field& Record::require(std::string_view key) const {
    const Field* f = find(key);
    if (!f) throw StorageError("record: missing field '" + std::string(key) + "'");
    return *f;
}

bool Record::has(std::string_view key) const { return find(key) != nullptr; }

const std::string& Record::raw(std::string_view key) const { return require(key).value; }

std::string_view Record::scalar(std::string_view key) const {
    const Field& f = require(key);
    if (f.is_text) throw StorageError("record: expected scalar for '" + std::string(key) + "'");
    return f.value;
}

std::int64_t Record::integer(std::string_view key) const {
    const auto v = scalar(key);
    std::int64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw StorageError("record: bad integer for '" + std::string(key) + "'");
    return out;
}

std::uint64_t Record::unsigned_integer(std::string_view key) const {
    const auto v = scalar(key);
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw StorageError("record: bad unsigned for '" + std::string(key) + "'");
    return out;
}

double Record::real(std::string_view key) const {
    const auto v = std::string(scalar(key));
    char* end = nullptr;
    const double out = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size())
        throw StorageError("record: bad real for '" + std::string(key) + "'");
    return out;
}

const std::string& Record::text(std::string_view key) const {
    const Field& f = require(key);
    if (!f.is_text) throw StorageError("record: expected text for '" + std::string(key) + "'");
    return f.value;
}

std::optional<std::string> Record::opt_text(std::string_view key) const {
    const Field& f = require(key);
    if (!f.is_text) {
        if (f.value == "_") return std::nullopt;
        throw StorageError("record: expected optional text for '" + std::string(key) + "'");
    }
    return f.value;
}

std::vector<std::string> Record::id_list(std::string_view key) const {
    const std::string& joined = text(key);
    std::vector<std::string> out;
    if (joined.empty()) return out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = joined.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(joined.substr(start));
            break;
        }
        out.push_back(joined.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

Timestamp Record::time(std::string_view key) const { return Timestamp{integer(key)}; }

std::optional<Timestamp> Record::opt_time(std::string_view key) const {
    if (scalar(key) == "_") return std::nullopt;
    return Timestamp{integer(key)};
}

std::optional<double> Record::opt_real(std::string_view key) const {
    if (scalar(key) == "_") return std::nullopt;
    return real(key);
}

bool Record::flag(std::string_view key) const {
    const auto v = scalar(key);
    if (v == "1") return true;
    if (v == "0") return false;
    throw StorageError("record: bad flag for '" + std::string(key) + "'");
}

std::string crc32_hex(std::string_view bytes) {
    const auto crc = ::crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()),
                             static_cast<uInt>(bytes.size()));
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%08lx", static_cast<unsigned long>(crc));
    return buf;
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw StorageError("sha256 failed");
    return to_hex(digest, len);
}

} // namespace stratum
