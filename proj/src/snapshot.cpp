#include "electorate/snapshot.hpp"

#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace electorate::snap {
namespace {

constexpr char kMagic[4] = {'E', 'L', 'S', 'S'};
constexpr std::uint16_t kVersion = 1;

void put_bytes(std::string& out, const void* p, std::size_t n) {
    out.append(static_cast<const char*>(p), n);
}

template <typename T>
void put_le(std::string& out, T v) {
    std::array<unsigned char, sizeof(T)> b{};
    for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
    put_bytes(out, b.data(), b.size());
}

void put_varint(std::string& out, std::uint64_t v) {
    while (v >= 0x80) {
        out.push_back(static_cast<char>((v & 0x7F) | 0x80));
        v >>= 7;
    }
    out.push_back(static_cast<char>(v));
}

struct Reader {
    const unsigned char* p;
    const unsigned char* end;

    void need(std::size_t n, const char* what) const {
        if (static_cast<std::size_t>(end - p) < n)
            throw std::runtime_error(std::string("snapshot load: truncated ") + what);
    }
    template <typename T>
    T get_le(const char* what) {
        need(sizeof(T), what);
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(p[i]) << (8 * i);
        p += sizeof(T);
        return v;
    }
    std::uint64_t get_varint(const char* what) {
        std::uint64_t v = 0;
        int shift = 0;
        for (;;) {
            need(1, what);
            const unsigned char byte = *p++;
            if (shift == 63 && (byte & 0x7E))
                throw std::runtime_error("snapshot load: varint overflow");
            v |= static_cast<std::uint64_t>(byte & 0x7F) << shift;
            if (!(byte & 0x80)) return v;
            shift += 7;
            if (shift > 63) throw std::runtime_error("snapshot load: varint overflow");
        }
    }
};

}  // namespace

bool is_strictly_sorted(const std::vector<UserId>& ids) noexcept {
    for (std::size_t i = 1; i < ids.size(); ++i)
        if (ids[i] <= ids[i - 1]) return false;
    return true;
}

void validate(const Snapshot& s) {
    if (!is_strictly_sorted(s.ids))
        throw std::invalid_argument("snapshot: ids must be strictly increasing");
}

DiffResult diff(const Snapshot& older, const Snapshot& newer) {
    if (older.candidate != newer.candidate)
        throw std::invalid_argument("diff: candidate mismatch ('" + older.candidate + "' vs '" +
                                    newer.candidate + "')");
    if (older.captured_at >= newer.captured_at)
        throw std::invalid_argument("diff: snapshots must have strictly increasing timestamps");

    DiffResult r;
    const auto& a = older.ids;
    const auto& b = newer.ids;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) {
            r.unfollowers.push_back(a[i++]);
        } else if (b[j] < a[i]) {
            r.new_followers.push_back(b[j++]);
        } else {
            ++i;
            ++j;
        }
    }
    r.unfollowers.insert(r.unfollowers.end(), a.begin() + i, a.end());
    r.new_followers.insert(r.new_followers.end(), b.begin() + j, b.end());
    r.net_gain = static_cast<std::int64_t>(r.new_followers.size()) -
                 static_cast<std::int64_t>(r.unfollowers.size());
    return r;
}

void save(const Snapshot& s, const std::filesystem::path& path) {
    validate(s);
    std::string buf;
    buf.reserve(32 + s.candidate.size() + s.ids.size() * 2);
    put_bytes(buf, kMagic, sizeof(kMagic));
    put_le<std::uint16_t>(buf, kVersion);
    put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(s.candidate.size()));
    put_bytes(buf, s.candidate.data(), s.candidate.size());
    put_le<std::uint64_t>(buf, static_cast<std::uint64_t>(s.captured_at));
    put_le<std::uint64_t>(buf, s.ids.size());
    UserId prev = 0;
    for (std::size_t i = 0; i < s.ids.size(); ++i) {
        put_varint(buf, s.ids[i] - prev);  // first delta is the raw id
        prev = s.ids[i];
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("snapshot save: cannot open " + path.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::runtime_error("snapshot save: write failed for " + path.string());
}

Snapshot load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("snapshot load: cannot open " + path.string());
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    Reader r{reinterpret_cast<const unsigned char*>(buf.data()),
             reinterpret_cast<const unsigned char*>(buf.data()) + buf.size()};
    r.need(sizeof(kMagic), "header");
    if (std::memcmp(r.p, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("snapshot load: corrupt header (bad magic) in " + path.string());
    r.p += sizeof(kMagic);
    const auto version = r.get_le<std::uint16_t>("version");
    if (version != kVersion)
        throw std::runtime_error("snapshot load: unsupported version " + std::to_string(version));

    Snapshot s;
    const auto label_len = r.get_le<std::uint32_t>("label length");
    r.need(label_len, "label");
    s.candidate.assign(reinterpret_cast<const char*>(r.p), label_len);
    r.p += label_len;
    s.captured_at = static_cast<std::int64_t>(r.get_le<std::uint64_t>("timestamp"));
    const auto count = r.get_le<std::uint64_t>("count");

    s.ids.reserve(count);
    UserId prev = 0;
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint64_t delta = r.get_varint("id stream");
        if (i > 0 && delta == 0)
            throw std::runtime_error("snapshot load: unsorted payload in " + path.string());
        const UserId id = prev + delta;
        if (i > 0 && id <= prev)
            throw std::runtime_error("snapshot load: unsorted payload in " + path.string());
        s.ids.push_back(id);
        prev = id;
    }
    if (r.p != r.end) throw std::runtime_error("snapshot load: trailing bytes in " + path.string());
    return s;
}

void export_csv(const Snapshot& s, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("snapshot export: cannot open " + path.string());
    char tmp[24];
    std::string buf;
    buf.reserve(s.ids.size() * 12);
    for (UserId id : s.ids) {
        auto [end, ec] = std::to_chars(tmp, tmp + sizeof(tmp), id);
        buf.append(tmp, end);
        buf.push_back('\n');
        if (buf.size() > (1u << 20)) {
            out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
            buf.clear();
        }
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::runtime_error("snapshot export: write failed for " + path.string());
}

}  // namespace electorate::snap
