#include "gbkmv/persist.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace gbkmv {

namespace {

constexpr char kMagic[4] = {'G', 'B', 'K', 'M'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
    char b[4];
    b[0] = static_cast<char>(v & 0xFF);
    b[1] = static_cast<char>((v >> 8) & 0xFF);
    b[2] = static_cast<char>((v >> 16) & 0xFF);
    b[3] = static_cast<char>((v >> 24) & 0xFF);
    out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    put_u32(out, static_cast<std::uint32_t>(v & 0xFFFFFFFFull));
    put_u32(out, static_cast<std::uint32_t>(v >> 32));
}

void put_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    put_u64(out, bits);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4))
        throw std::runtime_error("index file truncated");
    return static_cast<std::uint32_t>(b[0]) |
           (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint64_t get_u64(std::istream& in) {
    const std::uint64_t lo = get_u32(in);
    const std::uint64_t hi = get_u32(in);
    return lo | (hi << 32);
}

double get_f64(std::istream& in) {
    const std::uint64_t bits = get_u64(in);
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
}

void put_string(std::ostream& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
    const std::uint32_t len = get_u32(in);
    std::string s(len, '\0');
    if (len > 0 && !in.read(s.data(), len))
        throw std::runtime_error("index file truncated");
    return s;
}

} // namespace

void save_index(const GbkmvIndex& index, std::ostream& out) {
    out.write(kMagic, 4);
    put_u32(out, kVersion);
    put_u64(out, index.seed);
    put_u32(out, index.hash.is_fixture() ? 1u : 0u);
    put_u32(out, static_cast<std::uint32_t>(index.record_count()));
    put_u32(out, static_cast<std::uint32_t>(index.buffer_rank.size()));
    put_u32(out, static_cast<std::uint32_t>(index.tokens.size()));
    put_u32(out, index.r);
    put_f64(out, index.tau);
    put_f64(out, index.budget);

    put_u32(out, static_cast<std::uint32_t>(index.top_elements.size()));
    for (ElementId e : index.top_elements) put_u32(out, e);

    for (const auto& tok : index.tokens) put_string(out, tok);

    if (index.hash.is_fixture()) {
        // Fixture entries in ascending id order so the byte stream is a
        // function of the index contents alone.
        std::vector<std::pair<ElementId, double>> entries(
            index.hash.table().begin(), index.hash.table().end());
        std::sort(entries.begin(), entries.end());
        put_u32(out, static_cast<std::uint32_t>(entries.size()));
        for (const auto& [e, v] : entries) {
            put_u32(out, e);
            put_f64(out, v);
        }
    }

    for (std::size_t rid = 0; rid < index.record_count(); ++rid) {
        const auto& s = index.sketches[rid];
        put_u32(out, index.record_sizes[rid]);
        for (std::uint32_t w : s.buffer.words) put_u32(out, w);
        put_u32(out, static_cast<std::uint32_t>(s.tail.size()));
        for (const auto& entry : s.tail.entries) {
            put_u32(out, entry.element);
            put_f64(out, entry.hash);
        }
    }
    if (!out) throw std::runtime_error("index write failed");
}

void save_index_file(const GbkmvIndex& index, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    save_index(index, out);
}

GbkmvIndex load_index(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4)) throw std::runtime_error("index file truncated");
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("bad index magic");
    const std::uint32_t version = get_u32(in);
    if (version != kVersion)
        throw std::runtime_error("unsupported index version " + std::to_string(version));

    GbkmvIndex idx;
    idx.seed = get_u64(in);
    const std::uint32_t hash_mode = get_u32(in);
    const std::uint32_t m = get_u32(in);
    const std::uint32_t universe = get_u32(in);
    const std::uint32_t n_tokens = get_u32(in);
    idx.r = get_u32(in);
    idx.tau = get_f64(in);
    idx.budget = get_f64(in);

    const std::uint32_t top_count = get_u32(in);
    idx.top_elements.resize(top_count);
    for (auto& e : idx.top_elements) e = get_u32(in);
    idx.buffer_rank.assign(universe, -1);
    for (std::uint32_t i = 0; i < top_count; ++i) {
        if (idx.top_elements[i] >= universe)
            throw std::runtime_error("index file corrupt: buffer element outside universe");
        idx.buffer_rank[idx.top_elements[i]] = static_cast<std::int32_t>(i);
    }

    idx.tokens.resize(n_tokens);
    for (auto& tok : idx.tokens) tok = get_string(in);

    if (hash_mode == 1) {
        const std::uint32_t count = get_u32(in);
        std::unordered_map<ElementId, double> table;
        table.reserve(count);
        for (std::uint32_t i = 0; i < count; ++i) {
            const ElementId e = get_u32(in);
            table[e] = get_f64(in);
        }
        idx.hash = HashSource::fixture(idx.seed, std::move(table));
    } else if (hash_mode == 0) {
        idx.hash = HashSource::computed(idx.seed);
    } else {
        throw std::runtime_error("index file corrupt: unknown hash mode");
    }

    const std::size_t words = (idx.r + 31) / 32;
    idx.sketches.resize(m);
    idx.record_sizes.resize(m);
    for (std::uint32_t rid = 0; rid < m; ++rid) {
        idx.record_sizes[rid] = get_u32(in);
        auto& s = idx.sketches[rid];
        s.buffer.resize(idx.r);
        for (std::size_t w = 0; w < words; ++w) s.buffer.words[w] = get_u32(in);
        s.tail.mode = KmvSketch::Mode::Threshold;
        s.tail.tau = idx.tau;
        s.tail.saturated = (idx.tau == 1.0);
        const std::uint32_t tail_len = get_u32(in);
        s.tail.entries.resize(tail_len);
        for (auto& entry : s.tail.entries) {
            entry.element = get_u32(in);
            entry.hash = get_f64(in);
        }
    }
    return idx;
}

GbkmvIndex load_index_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return load_index(in);
}

} // namespace gbkmv
