#pragma once

// Little-endian encoding helpers shared by the SRCM and RCDS formats.

#include "seqrc/error.hpp"
#include "seqrc/series.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace seqrc::detail {

std::uint32_t crc32_of(const std::uint8_t* data, std::size_t size);

class ByteWriter {
public:
    void bytes(const void* data, std::size_t size)
    {
        const auto* p = static_cast<const std::uint8_t*>(data);
        buffer_.insert(buffer_.end(), p, p + size);
    }
    void magic(std::string_view tag) { bytes(tag.data(), tag.size()); }
    template <typename T>
    void integer(T value)
    {
        using U = std::make_unsigned_t<T>;
        auto u = static_cast<U>(value);
        for (std::size_t i = 0; i < sizeof(T); ++i) buffer_.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
    }
    void u8(std::uint8_t v) { integer(v); }
    void u16(std::uint16_t v) { integer(v); }
    void u32(std::uint32_t v) { integer(v); }
    void u64(std::uint64_t v) { integer(v); }
    void f64(double v) { integer(std::bit_cast<std::uint64_t>(v)); }
    void string(std::string_view s)
    {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }
    /// Row-major payload regardless of the matrix storage order.
    template <typename Derived>
    void matrix(const Eigen::MatrixBase<Derived>& m)
    {
        u64(static_cast<std::uint64_t>(m.rows()));
        u64(static_cast<std::uint64_t>(m.cols()));
        raw_values(m);
    }
    template <typename Derived>
    void raw_values(const Eigen::MatrixBase<Derived>& m)
    {
        buffer_.reserve(buffer_.size() + static_cast<std::size_t>(m.size()) * 8);
        for (Index r = 0; r < m.rows(); ++r)
            for (Index c = 0; c < m.cols(); ++c) f64(m(r, c));
    }
    /// Appends the CRC-32 of everything written so far.
    void seal() { u32(crc32_of(buffer_.data(), buffer_.size())); }

    const std::vector<std::uint8_t>& buffer() const noexcept { return buffer_; }

private:
    std::vector<std::uint8_t> buffer_;
};

class ByteReader {
public:
    ByteReader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

    void bytes(void* out, std::size_t n)
    {
        need(n);
        std::memcpy(out, data_ + pos_, n);
        pos_ += n;
    }
    template <typename T>
    T integer()
    {
        need(sizeof(T));
        std::make_unsigned_t<T> u = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i)
            u |= static_cast<std::make_unsigned_t<T>>(static_cast<std::make_unsigned_t<T>>(data_[pos_ + i]) << (8 * i));
        pos_ += sizeof(T);
        return static_cast<T>(u);
    }
    std::uint8_t u8() { return integer<std::uint8_t>(); }
    std::uint16_t u16() { return integer<std::uint16_t>(); }
    std::uint32_t u32() { return integer<std::uint32_t>(); }
    std::uint64_t u64() { return integer<std::uint64_t>(); }
    double f64() { return std::bit_cast<double>(integer<std::uint64_t>()); }
    std::string string()
    {
        const auto n = u32();
        need(n);
        std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
        pos_ += n;
        return s;
    }
    Matrix matrix()
    {
        const auto rows = static_cast<Index>(u64());
        const auto cols = static_cast<Index>(u64());
        if (rows < 0 || cols < 0 || (cols > 0 && static_cast<std::size_t>(rows) > remaining() / 8 / static_cast<std::size_t>(cols)))
            throw Error(ErrorCode::FormatVersionMismatch, "matrix header exceeds file size");
        Matrix m(rows, cols);
        for (Index r = 0; r < rows; ++r)
            for (Index c = 0; c < cols; ++c) m(r, c) = f64();
        return m;
    }

    std::size_t position() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return size_ - pos_; }

private:
    void need(std::size_t n) const
    {
        if (n > size_ - pos_) throw Error(ErrorCode::FormatVersionMismatch, "unexpected end of record");
    }

    const std::uint8_t* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

/// Checks magic, version and trailing CRC-32; returns a reader positioned
/// after the version field and limited to the body (footer excluded).
ByteReader open_sealed(const std::vector<std::uint8_t>& file, std::string_view magic, std::uint16_t version,
                       const std::string& what);

}  // namespace seqrc::detail
