#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "cinekit/common.hpp"
#include "cinekit/sequences.hpp"
#include "cinekit/tensor.hpp"

namespace ck {

/// On-disk element types of the CKT tensor container.
enum class CktDtype : std::uint8_t {
    f32 = 0,   // real float32
    cf32 = 1,  // complex float32, interleaved re/im
    u8 = 2,    // byte mask
};

/// One decoded container: dtype, dims, raw little-endian payload bytes.
/// Payloads round-trip bit-identically because they are never reparsed.
struct CktRecord {
    CktDtype dtype = CktDtype::f32;
    std::vector<std::uint32_t> dims;
    std::vector<std::uint8_t> payload;

    std::uint64_t element_count() const {
        std::uint64_t n = 1;
        for (std::uint32_t d : dims) n *= d;
        return n;
    }
};

/// Archive entry: name plus record. Entries keep file order.
using CktArchive = std::vector<std::pair<std::string, CktRecord>>;

namespace detail {

inline constexpr char kCktMagic[4] = {'C', 'K', 'T', '1'};
inline constexpr std::uint8_t kCktVersion = 1;

inline std::size_t ckt_element_size(CktDtype d) {
    switch (d) {
        case CktDtype::f32: return 4;
        case CktDtype::cf32: return 8;
        case CktDtype::u8: return 1;
    }
    throw std::invalid_argument("unknown container dtype");
}

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

/// Cursor over an in-memory byte buffer; all reads report the absolute
/// offset of the field that failed.
struct ByteReader {
    const std::uint8_t* data;
    std::uint64_t size;
    std::uint64_t pos = 0;

    bool done() const { return pos >= size; }

    void need(std::uint64_t n, const char* field) const {
        if (pos + n > size)
            throw ParseError(field, pos, "unexpected end of data (need " + std::to_string(n) +
                                             " bytes, have " + std::to_string(size - pos) + ")");
    }

    std::uint8_t u8(const char* field) {
        need(1, field);
        return data[pos++];
    }

    std::uint16_t u16(const char* field) {
        need(2, field);
        const std::uint16_t v = static_cast<std::uint16_t>(data[pos]) |
                                static_cast<std::uint16_t>(data[pos + 1]) << 8;
        pos += 2;
        return v;
    }

    std::uint32_t u32(const char* field) {
        need(4, field);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
};

}  // namespace detail

inline void encode_ckt(const CktRecord& rec, std::vector<std::uint8_t>& out) {
    check_arg(!rec.dims.empty() && rec.dims.size() <= 255, "container needs 1..255 dims");
    for (std::uint32_t d : rec.dims) check_arg(d > 0, "container dims must be positive");
    const std::uint64_t expect = rec.element_count() * detail::ckt_element_size(rec.dtype);
    check_arg(rec.payload.size() == expect, "container payload size does not match dims");
    out.insert(out.end(), detail::kCktMagic, detail::kCktMagic + 4);
    out.push_back(detail::kCktVersion);
    out.push_back(static_cast<std::uint8_t>(rec.dtype));
    out.push_back(static_cast<std::uint8_t>(rec.dims.size()));
    out.push_back(0);  // reserved
    for (std::uint32_t d : rec.dims) detail::put_u32(out, d);
    out.insert(out.end(), rec.payload.begin(), rec.payload.end());
}

inline CktRecord decode_ckt(detail::ByteReader& r) {
    const std::uint64_t start = r.pos;
    r.need(4, "magic");
    if (std::memcmp(r.data + r.pos, detail::kCktMagic, 4) != 0)
        throw ParseError("magic", start, "expected \"CKT1\"");
    r.pos += 4;
    const std::uint8_t version = r.u8("version");
    if (version != detail::kCktVersion)
        throw ParseError("version", r.pos - 1,
                         "unsupported version " + std::to_string(version));
    const std::uint8_t dtype_raw = r.u8("dtype");
    if (dtype_raw > 2)
        throw ParseError("dtype", r.pos - 1, "unknown dtype " + std::to_string(dtype_raw));
    const std::uint8_t ndim = r.u8("ndim");
    if (ndim == 0) throw ParseError("ndim", r.pos - 1, "rank must be >= 1");
    const std::uint8_t reserved = r.u8("reserved");
    if (reserved != 0)
        throw ParseError("reserved", r.pos - 1, "reserved byte must be zero");
    CktRecord rec;
    rec.dtype = static_cast<CktDtype>(dtype_raw);
    rec.dims.resize(ndim);
    for (int i = 0; i < ndim; ++i) {
        rec.dims[static_cast<std::size_t>(i)] = r.u32("dims");
        if (rec.dims[static_cast<std::size_t>(i)] == 0)
            throw ParseError("dims", r.pos - 4, "dimension extent must be positive");
    }
    const std::uint64_t bytes = rec.element_count() * detail::ckt_element_size(rec.dtype);
    r.need(bytes, "payload");
    rec.payload.assign(r.data + r.pos, r.data + r.pos + bytes);
    r.pos += bytes;
    return rec;
}

inline void encode_archive(const CktArchive& archive, std::vector<std::uint8_t>& out) {
    for (const auto& [name, rec] : archive) {
        check_arg(!name.empty() && name.size() <= 0xffff, "archive entry name length invalid");
        detail::put_u16(out, static_cast<std::uint16_t>(name.size()));
        out.insert(out.end(), name.begin(), name.end());
        encode_ckt(rec, out);
    }
}

inline CktArchive decode_archive(const std::uint8_t* data, std::uint64_t size) {
    detail::ByteReader r{data, size};
    CktArchive archive;
    while (!r.done()) {
        const std::uint16_t name_len = r.u16("name_length");
        if (name_len == 0) throw ParseError("name_length", r.pos - 2, "entry name must be non-empty");
        r.need(name_len, "name");
        std::string name(reinterpret_cast<const char*>(r.data + r.pos), name_len);
        r.pos += name_len;
        archive.emplace_back(std::move(name), decode_ckt(r));
    }
    return archive;
}

// ----- file io -----

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    in.seekg(0, std::ios::end);
    const std::streamoff n = in.tellg();
    in.seekg(0, std::ios::beg);
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(n));
    if (n > 0) in.read(reinterpret_cast<char*>(bytes.data()), n);
    if (!in) throw IoError("cannot read " + path.string());
    return bytes;
}

inline void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("cannot write " + path.string());
}

inline void write_ckt_file(const std::filesystem::path& path, const CktRecord& rec) {
    std::vector<std::uint8_t> bytes;
    encode_ckt(rec, bytes);
    write_file_bytes(path, bytes);
}

inline CktRecord read_ckt_file(const std::filesystem::path& path) {
    const std::vector<std::uint8_t> bytes = read_file_bytes(path);
    detail::ByteReader r{bytes.data(), bytes.size()};
    CktRecord rec = decode_ckt(r);
    if (!r.done()) throw ParseError("trailing", r.pos, "trailing bytes after container");
    return rec;
}

inline void write_archive_file(const std::filesystem::path& path, const CktArchive& archive) {
    std::vector<std::uint8_t> bytes;
    encode_archive(archive, bytes);
    write_file_bytes(path, bytes);
}

inline CktArchive read_archive_file(const std::filesystem::path& path) {
    const std::vector<std::uint8_t> bytes = read_file_bytes(path);
    return decode_archive(bytes.data(), bytes.size());
}

inline const CktRecord& archive_get(const CktArchive& archive, const std::string& name) {
    for (const auto& [n, rec] : archive)
        if (n == name) return rec;
    throw ParseError("name", 0, "archive has no entry \"" + name + "\"");
}

inline bool archive_has(const CktArchive& archive, const std::string& name) {
    for (const auto& [n, rec] : archive)
        if (n == name) return true;
    return false;
}

// ----- typed conversions (float32 on disk, double in memory) -----

namespace detail {

inline void push_f32(std::vector<std::uint8_t>& out, double v) {
    const float f = static_cast<float>(v);
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_u32(out, bits);
}

inline double pull_f32(const std::uint8_t* p) {
    std::uint32_t bits = 0;
    for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    float f;
    std::memcpy(&f, &bits, 4);
    return static_cast<double>(f);
}

}  // namespace detail

inline CktRecord to_record(const CineSequence& seq) {
    CktRecord rec;
    rec.dtype = CktDtype::f32;
    rec.dims = {static_cast<std::uint32_t>(seq.t), static_cast<std::uint32_t>(seq.h),
                static_cast<std::uint32_t>(seq.w)};
    rec.payload.reserve(static_cast<std::size_t>(seq.size()) * 4);
    for (double v : seq.data) detail::push_f32(rec.payload, v);
    return rec;
}

inline CktRecord to_record(const KSpaceSequence& ks) {
    CktRecord rec;
    rec.dtype = CktDtype::cf32;
    rec.dims = {static_cast<std::uint32_t>(ks.t), static_cast<std::uint32_t>(ks.h),
                static_cast<std::uint32_t>(ks.w)};
    rec.payload.reserve(static_cast<std::size_t>(ks.size()) * 8);
    for (const std::complex<double>& v : ks.data) {
        detail::push_f32(rec.payload, v.real());
        detail::push_f32(rec.payload, v.imag());
    }
    return rec;
}

inline CktRecord to_record(const LineMask& mask) {
    CktRecord rec;
    rec.dtype = CktDtype::u8;
    rec.dims = {static_cast<std::uint32_t>(mask.t), static_cast<std::uint32_t>(mask.h)};
    rec.payload = mask.data;
    return rec;
}

inline CktRecord to_record(const Tensor& t) {
    CktRecord rec;
    rec.dtype = CktDtype::f32;
    for (int d : t.shape()) rec.dims.push_back(static_cast<std::uint32_t>(d));
    rec.payload.reserve(static_cast<std::size_t>(t.size()) * 4);
    for (std::int64_t i = 0; i < t.size(); ++i) detail::push_f32(rec.payload, t[i]);
    return rec;
}

inline CineSequence to_cine(const CktRecord& rec) {
    check_arg(rec.dtype == CktDtype::f32, "record is not a real image sequence");
    check_arg(rec.dims.size() == 3, "image sequence record must be rank 3");
    CineSequence seq(static_cast<int>(rec.dims[0]), static_cast<int>(rec.dims[1]),
                     static_cast<int>(rec.dims[2]));
    for (std::int64_t i = 0; i < seq.size(); ++i)
        seq.data[static_cast<std::size_t>(i)] =
            detail::pull_f32(rec.payload.data() + static_cast<std::size_t>(i) * 4);
    return seq;
}

inline KSpaceSequence to_kspace_seq(const CktRecord& rec) {
    check_arg(rec.dtype == CktDtype::cf32, "record is not a complex k-space sequence");
    check_arg(rec.dims.size() == 3, "k-space record must be rank 3");
    KSpaceSequence ks(static_cast<int>(rec.dims[0]), static_cast<int>(rec.dims[1]),
                      static_cast<int>(rec.dims[2]));
    for (std::int64_t i = 0; i < ks.size(); ++i) {
        const std::uint8_t* p = rec.payload.data() + static_cast<std::size_t>(i) * 8;
        ks.data[static_cast<std::size_t>(i)] = {detail::pull_f32(p), detail::pull_f32(p + 4)};
    }
    return ks;
}

inline LineMask to_line_mask(const CktRecord& rec) {
    check_arg(rec.dtype == CktDtype::u8, "record is not a mask");
    check_arg(rec.dims.size() == 2, "mask record must be rank 2");
    LineMask mask(static_cast<int>(rec.dims[0]), static_cast<int>(rec.dims[1]));
    mask.data = rec.payload;
    return mask;
}

inline Tensor to_tensor(const CktRecord& rec) {
    check_arg(rec.dtype == CktDtype::f32, "record is not a real tensor");
    std::vector<int> shape;
    for (std::uint32_t d : rec.dims) shape.push_back(static_cast<int>(d));
    Tensor t(shape);
    for (std::int64_t i = 0; i < t.size(); ++i)
        t[i] = detail::pull_f32(rec.payload.data() + static_cast<std::size_t>(i) * 4);
    return t;
}

}  // namespace ck
