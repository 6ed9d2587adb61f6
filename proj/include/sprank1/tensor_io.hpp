#pragma once

// .dten tensor files.
//
// Text layout:
//   line 1: order d
//   line 2: n_1 ... n_d
//   then prod(n_j) whitespace-separated values, column-major, 17 significant digits.
//
// Binary layout (little-endian):
//   bytes 0..7   magic "SPR1DTEN"
//   bytes 8..15  u64 format version (1)
//   u64 d, then d x u64 dims, then f64 payload in column-major order.

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "sprank1/errors.hpp"
#include "sprank1/tensor.hpp"

namespace sprank1 {

inline constexpr std::array<char, 8> kBinaryMagic{'S', 'P', 'R', '1', 'D', 'T', 'E', 'N'};
inline constexpr std::uint64_t kBinaryVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "binary .dten I/O assumes a little-endian host");

inline std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                   std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

inline void write_dten_text(std::ostream& os, const DenseTensor& t) {
    os << t.order() << '\n' << shape_to_string(t.shape(), ' ') << '\n';
    const auto data = t.data();
    const std::size_t per_line = t.dim(0);
    for (std::size_t k = 0; k < data.size(); ++k) {
        os << format_double(data[k]) << ((k + 1) % per_line == 0 ? '\n' : ' ');
    }
    if (!os) throw io_error("write_dten_text: stream failure");
}

inline void write_dten_binary(std::ostream& os, const DenseTensor& t) {
    auto put_u64 = [&os](std::uint64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); };
    os.write(kBinaryMagic.data(), kBinaryMagic.size());
    put_u64(kBinaryVersion);
    put_u64(t.order());
    for (std::size_t n : t.shape()) put_u64(n);
    const auto data = t.data();
    os.write(reinterpret_cast<const char*>(data.data()),
             static_cast<std::streamsize>(data.size() * sizeof(double)));
    if (!os) throw io_error("write_dten_binary: stream failure");
}

namespace detail {

class TokenReader {
public:
    explicit TokenReader(std::string text) : text_(std::move(text)) {}

    std::string_view next(const char* what) {
        while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
        if (pos_ >= text_.size()) throw io_error(std::string("dten: unexpected end of input reading ") + what);
        const std::size_t start = pos_;
        while (pos_ < text_.size() && !is_space(text_[pos_])) ++pos_;
        return std::string_view(text_).substr(start, pos_ - start);
    }

    bool at_end() {
        while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
        return pos_ >= text_.size();
    }

    template <class T>
    T parse(const char* what) {
        const auto tok = next(what);
        T value{};
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
            throw io_error("dten: cannot parse " + std::string(what) + " from '" + std::string(tok) + "'");
        }
        return value;
    }

private:
    static bool is_space(char c) { return c == ' ' || c == '\n' || c == '\t' || c == '\r'; }

    std::string text_;
    std::size_t pos_ = 0;
};

inline DenseTensor parse_text(std::string text) {
    TokenReader in(std::move(text));
    const auto d = in.parse<std::size_t>("order");
    if (d == 0) throw io_error("dten: order must be positive");
    Shape shape(d);
    for (auto& n : shape) {
        n = in.parse<std::size_t>("dimension");
        if (n == 0) throw io_error("dten: dimensions must be positive");
    }
    Vector data(shape_product(shape));
    for (double& v : data) v = in.parse<double>("value");
    if (!in.at_end()) throw io_error("dten: trailing data after last value");
    return DenseTensor(std::move(shape), std::move(data));
}

inline DenseTensor parse_binary(const std::string& bytes) {
    std::size_t pos = kBinaryMagic.size();
    auto get_u64 = [&]() {
        if (pos + 8 > bytes.size()) throw io_error("dten: truncated binary header");
        std::uint64_t v;
        std::memcpy(&v, bytes.data() + pos, 8);
        pos += 8;
        return v;
    };
    if (get_u64() != kBinaryVersion) throw io_error("dten: unsupported binary version");
    const std::uint64_t d = get_u64();
    if (d == 0 || d > 64) throw io_error("dten: bad order in binary header");
    Shape shape(d);
    for (auto& n : shape) {
        n = get_u64();
        if (n == 0) throw io_error("dten: dimensions must be positive");
    }
    const std::size_t count = shape_product(shape);
    if (bytes.size() - pos != count * sizeof(double)) throw io_error("dten: binary payload size mismatch");
    Vector data(count);
    std::memcpy(data.data(), bytes.data() + pos, count * sizeof(double));
    return DenseTensor(std::move(shape), std::move(data));
}

}  // namespace detail

/// Reads either variant; the binary one is recognised by its magic.
inline DenseTensor read_dten(std::istream& is) {
    std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (bytes.size() >= kBinaryMagic.size() &&
        std::memcmp(bytes.data(), kBinaryMagic.data(), kBinaryMagic.size()) == 0) {
        return detail::parse_binary(bytes);
    }
    return detail::parse_text(std::move(bytes));
}

inline DenseTensor read_dten_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path + "' for reading");
    return read_dten(in);
}

inline void write_dten_file(const std::string& path, const DenseTensor& t, bool binary = false) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    if (binary) {
        write_dten_binary(out, t);
    } else {
        write_dten_text(out, t);
    }
}

}  // namespace sprank1
