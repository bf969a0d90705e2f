#pragma once

// ============================================================================
// VFC1: on-disk container for a variable-to-fixed encoded stream.
//
// Layout (all integers little-endian, all bit streams packed LSB-first within
// each byte, final partial byte zero-padded):
//
//   offset len
//   0      4    magic "VFC1"
//   4      4    M: u32, number of dictionary phrases
//   8      1    ell: u8, codeword width in bits (2^ell >= M)
//   9      8    p: f64, probability of bit 1 for the source that built the
//               dictionary (informational; decoding never needs it)
//   17     ...  phrase table: M records, each {u16 bit length, packed bits}
//   ...    ...  codeword stream: ell-bit codewords, packed back to back
//   end-8  8    N: u64, exact number of source bits represented
//
// No codeword count is stored: a reader consumes codewords until the decoded
// phrases cover N bits (N = 0 means zero codewords), then truncates to N.
// ============================================================================

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "codes.hpp"

namespace trielab {
namespace vfc {

inline constexpr std::array<uint8_t, 4> magic = {'V', 'F', 'C', '1'};

namespace detail {

class bit_writer {
public:
    explicit bit_writer(std::vector<uint8_t>& out) : out_(out) {}
    void put(uint64_t value, uint32_t width) {
        for (uint32_t i = 0; i < width; ++i) {
            if (fill_ == 0) out_.push_back(0);
            out_.back() |= static_cast<uint8_t>(((value >> i) & 1u) << fill_);
            fill_ = (fill_ + 1) & 7;
        }
    }
    void align() { fill_ = 0; }

private:
    std::vector<uint8_t>& out_;
    uint32_t fill_ = 0;
};

class bit_reader {
public:
    bit_reader(const uint8_t* data, size_t size) : data_(data), bits_(size * 8) {}
    [[nodiscard]] uint64_t get(uint32_t width) {
        uint64_t v = 0;
        for (uint32_t i = 0; i < width; ++i) {
            if (pos_ >= bits_) throw std::runtime_error("vfc: bit stream exhausted");
            v |= static_cast<uint64_t>((data_[pos_ >> 3] >> (pos_ & 7)) & 1u) << i;
            ++pos_;
        }
        return v;
    }
    [[nodiscard]] size_t bits_left() const noexcept { return bits_ - pos_; }

private:
    const uint8_t* data_;
    size_t bits_;
    size_t pos_ = 0;
};

inline void put_u16(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v & 0xff));
    out.push_back(static_cast<uint8_t>(v >> 8));
}

inline void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xff));
}

inline void put_u64(std::vector<uint8_t>& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xff));
}

inline void put_f64(std::vector<uint8_t>& out, double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    put_u64(out, bits);
}

struct cursor {
    const uint8_t* data;
    size_t size;
    size_t pos = 0;
    void need(size_t n) const {
        if (pos + n > size) throw std::runtime_error("vfc: truncated container");
    }
    uint16_t u16() {
        need(2);
        const uint16_t v = static_cast<uint16_t>(data[pos] | (data[pos + 1] << 8));
        pos += 2;
        return v;
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(data[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    uint64_t u64_at(size_t where) const {
        if (where + 8 > size) throw std::runtime_error("vfc: truncated container");
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(data[where + i]) << (8 * i);
        return v;
    }
    double f64() {
        need(8);
        uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= static_cast<uint64_t>(data[pos + i]) << (8 * i);
        pos += 8;
        double v;
        std::memcpy(&v, &bits, sizeof v);
        return v;
    }
};

}  // namespace detail

// Serializes a dictionary plus an already-encoded codeword sequence covering
// exactly `source_bits` source letters.
[[nodiscard]] inline std::vector<uint8_t> serialize(const dictionary& dict,
                                                    const std::vector<uint32_t>& codewords,
                                                    uint64_t source_bits) {
    std::vector<uint8_t> out;
    out.insert(out.end(), magic.begin(), magic.end());
    detail::put_u32(out, static_cast<uint32_t>(dict.size()));
    const uint32_t ell = dict.codeword_bits();
    out.push_back(static_cast<uint8_t>(ell));
    detail::put_f64(out, dict.source().p());
    for (const auto& w : dict.phrases()) {
        if (w.size() > 0xffff) throw std::invalid_argument("vfc: phrase longer than 65535 bits");
        detail::put_u16(out, static_cast<uint16_t>(w.size()));
        detail::bit_writer bw(out);
        for (uint8_t bit : w) bw.put(bit ? 1 : 0, 1);
    }
    {
        detail::bit_writer bw(out);
        for (uint32_t cw : codewords) {
            if (cw >= dict.size()) throw std::invalid_argument("vfc: codeword out of range");
            bw.put(cw, ell);
        }
    }
    detail::put_u64(out, source_bits);
    return out;
}

struct decoded_stream {
    double p = 0.5;                              // source parameter as recorded
    std::vector<std::vector<uint8_t>> phrases;   // the dictionary, lex order
    std::vector<uint32_t> codewords;             // as many as needed to cover n
    std::vector<uint8_t> bits;                   // exactly n source bits
};

// Parses a container and reconstructs the first-N-bits payload.
[[nodiscard]] inline decoded_stream deserialize(const std::vector<uint8_t>& buf) {
    if (buf.size() < 4 + 4 + 1 + 8 + 8) throw std::runtime_error("vfc: container too small");
    if (!std::equal(magic.begin(), magic.end(), buf.begin()))
        throw std::runtime_error("vfc: bad magic");
    detail::cursor cur{buf.data(), buf.size(), 4};
    const uint32_t m = cur.u32();
    cur.need(1);
    const uint32_t ell = buf[cur.pos++];
    const double p = cur.f64();
    if (m < 2) throw std::runtime_error("vfc: dictionary must have at least 2 phrases");
    if (ell < 1 || ell > 32 || (uint64_t{1} << ell) < m)
        throw std::runtime_error("vfc: invalid codeword width");
    if (!(p > 0.0 && p < 1.0)) throw std::runtime_error("vfc: invalid source parameter");

    decoded_stream out;
    out.p = p;
    out.phrases.reserve(m);
    for (uint32_t i = 0; i < m; ++i) {
        const uint16_t len = cur.u16();
        if (len == 0) throw std::runtime_error("vfc: empty phrase");
        const size_t bytes = (static_cast<size_t>(len) + 7) / 8;
        cur.need(bytes);
        detail::bit_reader br(buf.data() + cur.pos, bytes);
        std::vector<uint8_t> w(len);
        for (uint16_t k = 0; k < len; ++k) w[k] = static_cast<uint8_t>(br.get(1));
        cur.pos += bytes;
        out.phrases.push_back(std::move(w));
    }

    const uint64_t n = cur.u64_at(buf.size() - 8);
    if (cur.pos > buf.size() - 8) throw std::runtime_error("vfc: truncated container");
    detail::bit_reader br(buf.data() + cur.pos, buf.size() - 8 - cur.pos);

    // Rebuild the parse structure to validate and to know phrase lengths.
    const dictionary dict = dictionary::from_phrases(source_params(p), out.phrases);

    uint64_t covered = 0;
    while (covered < n) {
        if (br.bits_left() < ell) throw std::runtime_error("vfc: codeword stream exhausted");
        const uint32_t cw = static_cast<uint32_t>(br.get(ell));
        if (cw >= m) throw std::runtime_error("vfc: codeword out of range");
        out.codewords.push_back(cw);
        covered += dict.phrases()[cw].size();
    }
    out.bits = dict.decode_bits(out.codewords, n);
    return out;
}

}  // namespace vfc
}  // namespace trielab
