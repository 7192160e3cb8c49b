#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "trifit/error.hpp"

namespace trifit {

// Binary embedding store. Byte layout (all integers little-endian):
//   magic "TFES" | version u32 | modality u8 | dim u32 | count u64 |
//   count records of: id_len u16 | id bytes (UTF-8) | position u32 |
//                     wt u8 | mut u8 | dim x f32
inline constexpr char kStoreMagic[4] = {'T', 'F', 'E', 'S'};
inline constexpr std::uint32_t kStoreVersion = 1;

enum class Modality : std::uint8_t {
    sequence = 1,
    structure = 2,
    dynamics = 3,
    context = 4,      // masked-position h_i vectors from a real encoder
    token_table = 5,  // 20 x dim residue token embeddings
};

struct EmbeddingKey {
    std::string protein_id;
    std::uint32_t position = 0;
    char wt = 'A';
    char mut = 'A';

    friend bool operator==(const EmbeddingKey& a, const EmbeddingKey& b) {
        return a.position == b.position && a.wt == b.wt && a.mut == b.mut &&
               a.protein_id == b.protein_id;
    }
    friend auto operator<=>(const EmbeddingKey& a, const EmbeddingKey& b) {
        return std::tie(a.protein_id, a.position, a.wt, a.mut) <=>
               std::tie(b.protein_id, b.position, b.wt, b.mut);
    }
};

struct EmbeddingKeyHash {
    std::size_t operator()(const EmbeddingKey& key) const {
        std::size_t h = std::hash<std::string>{}(key.protein_id);
        h ^= std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(key.position) << 16) |
                                        (static_cast<std::uint64_t>(key.wt) << 8) |
                                        static_cast<std::uint64_t>(key.mut)) +
             0x9e3779b9 + (h << 6) + (h >> 2);
        return h;
    }
};

struct EmbeddingStore {
    Modality modality = Modality::sequence;
    std::uint32_t dim = 0;
    std::vector<std::pair<EmbeddingKey, std::vector<float>>> entries;

    std::unordered_map<EmbeddingKey, const std::vector<float>*, EmbeddingKeyHash> index() const {
        std::unordered_map<EmbeddingKey, const std::vector<float>*, EmbeddingKeyHash> map;
        map.reserve(entries.size());
        for (const auto& [key, vec] : entries) map.emplace(key, &vec);
        return map;
    }
};

namespace detail {

inline void append_u16(std::string& out, std::uint16_t value) {
    out.push_back(static_cast<char>(value & 0xff));
    out.push_back(static_cast<char>((value >> 8) & 0xff));
}

inline void append_u32(std::string& out, std::uint32_t value) {
    for (int shift = 0; shift < 32; shift += 8)
        out.push_back(static_cast<char>((value >> shift) & 0xff));
}

inline void append_u64(std::string& out, std::uint64_t value) {
    for (int shift = 0; shift < 64; shift += 8)
        out.push_back(static_cast<char>((value >> shift) & 0xff));
}

inline void append_f32(std::string& out, float value) {
    const auto bits = std::bit_cast<std::uint32_t>(value);
    append_u32(out, bits);
}

inline void append_f64(std::string& out, double value) {
    const auto bits = std::bit_cast<std::uint64_t>(value);
    append_u64(out, bits);
}

class ByteReader {
public:
    ByteReader(std::string_view bytes, std::string what)
        : bytes_(bytes), what_(std::move(what)) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }

    std::uint16_t u16() {
        const auto raw = take(2);
        return static_cast<std::uint16_t>(static_cast<unsigned char>(raw[0]) |
                                          (static_cast<unsigned char>(raw[1]) << 8));
    }

    std::uint32_t u32() {
        const auto raw = take(4);
        std::uint32_t value = 0;
        for (int i = 0; i < 4; ++i)
            value |= static_cast<std::uint32_t>(static_cast<unsigned char>(raw[i])) << (8 * i);
        return value;
    }

    std::uint64_t u64() {
        const auto raw = take(8);
        std::uint64_t value = 0;
        for (int i = 0; i < 8; ++i)
            value |= static_cast<std::uint64_t>(static_cast<unsigned char>(raw[i])) << (8 * i);
        return value;
    }

    float f32() { return std::bit_cast<float>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }

    std::string_view take(std::size_t n) {
        if (offset_ + n > bytes_.size()) throw Error("truncated " + what_);
        const auto view = bytes_.substr(offset_, n);
        offset_ += n;
        return view;
    }

    bool at_end() const { return offset_ == bytes_.size(); }

private:
    std::string_view bytes_;
    std::string what_;
    std::size_t offset_ = 0;
};

}  // namespace detail

inline std::string store_to_bytes(const EmbeddingStore& store) {
    for (const auto& [key, vec] : store.entries)
        if (vec.size() != store.dim)
            throw Error("embedding for " + key.protein_id + " has dim " +
                        std::to_string(vec.size()) + ", store dim is " +
                        std::to_string(store.dim));
    std::string out;
    out.append(kStoreMagic, 4);
    detail::append_u32(out, kStoreVersion);
    out.push_back(static_cast<char>(store.modality));
    detail::append_u32(out, store.dim);
    detail::append_u64(out, store.entries.size());
    for (const auto& [key, vec] : store.entries) {
        if (key.protein_id.size() > 0xffff) throw Error("protein id too long");
        detail::append_u16(out, static_cast<std::uint16_t>(key.protein_id.size()));
        out.append(key.protein_id);
        detail::append_u32(out, key.position);
        out.push_back(key.wt);
        out.push_back(key.mut);
        for (const float value : vec) detail::append_f32(out, value);
    }
    return out;
}

inline EmbeddingStore store_from_bytes(std::string_view bytes) {
    detail::ByteReader reader(bytes, "embedding store");
    const auto magic = reader.take(4);
    if (std::memcmp(magic.data(), kStoreMagic, 4) != 0) throw Error("not an embedding store");
    const std::uint32_t version = reader.u32();
    if (version != kStoreVersion)
        throw Error("unsupported embedding store version " + std::to_string(version));

    EmbeddingStore store;
    store.modality = static_cast<Modality>(reader.u8());
    store.dim = reader.u32();
    const std::uint64_t count = reader.u64();
    store.entries.reserve(count);

    std::unordered_map<EmbeddingKey, bool, EmbeddingKeyHash> seen;
    seen.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        EmbeddingKey key;
        const std::uint16_t id_len = reader.u16();
        key.protein_id = std::string(reader.take(id_len));
        key.position = reader.u32();
        key.wt = static_cast<char>(reader.u8());
        key.mut = static_cast<char>(reader.u8());
        if (!seen.emplace(key, true).second)
            throw Error("duplicate key " + key.protein_id + " " + key.wt +
                        std::to_string(key.position) + key.mut);
        std::vector<float> vec(store.dim);
        for (std::uint32_t d = 0; d < store.dim; ++d) vec[d] = reader.f32();
        store.entries.emplace_back(std::move(key), std::move(vec));
    }
    if (!reader.at_end()) throw Error("trailing bytes after embedding store payload");
    return store;
}

inline void write_file(const std::string& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write failed for " + path);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return bytes;
}

inline void store_write(const std::string& path, const EmbeddingStore& store) {
    write_file(path, store_to_bytes(store));
}

inline EmbeddingStore store_read(const std::string& path) {
    return store_from_bytes(read_file(path));
}

}  // namespace trifit
