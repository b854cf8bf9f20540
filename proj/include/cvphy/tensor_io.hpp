#ifndef CVPHY_TENSOR_IO_HPP
#define CVPHY_TENSOR_IO_HPP

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvphy {

/**
 * Flat named-tensor container, byte-exact layout (all integers and floats
 * little-endian):
 *
 *   magic   "CVWT"                     4 bytes
 *   version u32 = 1
 *   count   u32                        number of tensors
 *   then per tensor:
 *     name_len u32, name bytes (no terminator)
 *     ndim     u32, dims u64[ndim]
 *     data     f64[prod(dims)]         row-major
 */
struct NamedTensor {
    std::vector<std::uint64_t> dims;
    std::vector<double> data;
};

using NamedTensorMap = std::map<std::string, NamedTensor>;

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_f64(std::string& out, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof(bits));
    put_u64(out, bits);
}

struct ByteReader {
    const unsigned char* p;
    std::size_t n;
    std::size_t pos = 0;

    void need(std::size_t k) const {
        if (pos + k > n) throw std::runtime_error("tensor file: truncated");
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[pos + i]) << (8 * i);
        pos += 8;
        return v;
    }
    double f64() {
        const std::uint64_t bits = u64();
        double d;
        std::memcpy(&d, &bits, sizeof(d));
        return d;
    }
    std::string bytes(std::size_t k) {
        need(k);
        std::string s(reinterpret_cast<const char*>(p + pos), k);
        pos += k;
        return s;
    }
};

} // namespace detail

inline std::string encode_tensors(const NamedTensorMap& tensors) {
    std::string out = "CVWT";
    detail::put_u32(out, 1u);
    detail::put_u32(out, static_cast<std::uint32_t>(tensors.size()));
    for (const auto& [name, t] : tensors) {
        detail::put_u32(out, static_cast<std::uint32_t>(name.size()));
        out += name;
        detail::put_u32(out, static_cast<std::uint32_t>(t.dims.size()));
        std::uint64_t count = 1;
        for (std::uint64_t d : t.dims) {
            detail::put_u64(out, d);
            count *= d;
        }
        if (count != t.data.size())
            throw std::invalid_argument("encode_tensors: dims do not match data size for " + name);
        for (double d : t.data) detail::put_f64(out, d);
    }
    return out;
}

inline NamedTensorMap decode_tensors(const std::string& bytes) {
    detail::ByteReader r{reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()};
    if (r.bytes(4) != "CVWT") throw std::runtime_error("tensor file: bad magic");
    if (r.u32() != 1u) throw std::runtime_error("tensor file: unsupported version");
    const std::uint32_t count = r.u32();
    NamedTensorMap out;
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::string name = r.bytes(r.u32());
        NamedTensor t;
        const std::uint32_t ndim = r.u32();
        std::uint64_t total = 1;
        for (std::uint32_t d = 0; d < ndim; ++d) {
            t.dims.push_back(r.u64());
            total *= t.dims.back();
        }
        t.data.resize(total);
        for (std::uint64_t k = 0; k < total; ++k) t.data[k] = r.f64();
        out[name] = std::move(t);
    }
    return out;
}

inline void save_tensors(const NamedTensorMap& tensors, const std::string& path) {
    const std::string bytes = encode_tensors(tensors);
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("save_tensors: cannot open " + path);
    std::fwrite(bytes.data(), 1, bytes.size(), f);
    std::fclose(f);
}

inline NamedTensorMap load_tensors(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("load_tensors: cannot open " + path);
    std::string bytes;
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof(buf), f)) > 0) bytes.append(buf, got);
    std::fclose(f);
    return decode_tensors(bytes);
}

} // namespace cvphy

#endif
