#include "binary_io.hpp"

#include <zlib.h>

#include <fstream>
#include <iterator>

namespace seqrc::detail {

std::uint32_t crc32_of(const std::uint8_t* data, std::size_t size)
{
    uLong crc = crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; feed large buffers in pieces
    constexpr std::size_t kChunk = 1u << 30;
    while (size > 0) {
        const std::size_t n = std::min(size, kChunk);
        crc = crc32(crc, data, static_cast<uInt>(n));
        data += n;
        size -= n;
    }
    return static_cast<std::uint32_t>(crc);
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& buffer_)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(buffer_.data()), static_cast<std::streamsize>(buffer_.size()));
    if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw Error(ErrorCode::IoError, "failed reading " + path.string());
    return data;
}

ByteReader open_sealed(const std::vector<std::uint8_t>& file, std::string_view magic, std::uint16_t version,
                       const std::string& what)
{
    const std::size_t header = magic.size() + 2;
    if (file.size() < magic.size() || std::memcmp(file.data(), magic.data(), magic.size()) != 0)
        throw Error(ErrorCode::FormatVersionMismatch, what + " does not start with magic '" + std::string(magic) + "'");
    if (file.size() < header + 4) throw Error(ErrorCode::ChecksumMismatch, what + " is truncated");
    ByteReader head(file.data() + magic.size(), 2);
    const auto found = head.u16();
    if (found != version)
        throw Error(ErrorCode::FormatVersionMismatch,
                    what + " has format version " + std::to_string(found) + ", expected " + std::to_string(version));
    const std::size_t body = file.size() - 4;
    ByteReader footer(file.data() + body, 4);
    if (footer.u32() != crc32_of(file.data(), body))
        throw Error(ErrorCode::ChecksumMismatch, what + " failed its CRC-32 check (truncated or corrupted)");
    ByteReader reader(file.data(), body);
    std::uint8_t skip[16];
    reader.bytes(skip, header);
    return reader;
}

}  // namespace seqrc::detail
