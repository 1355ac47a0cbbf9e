#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "dunet/datasets.hpp"

namespace dunet {

// Container layout: "PLM1", u16 version=1, u16 reserved=0, u32 L, u32 D,
// u16 id byte-length + UTF-8 id, then L*D little-endian f32 row-major.
// All integers little-endian.

namespace {

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f32(std::string& out, float f) {
    std::uint32_t bits = std::bit_cast<std::uint32_t>(f);
    put_u32(out, bits);
}

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;
    const std::string where;

    void need(std::size_t n, const char* what) const {
        if (pos + n > buf.size())
            raise(ErrorCategory::format,
                  where + ": truncated at byte " + std::to_string(pos) +
                      " while reading " + what);
    }
    std::uint16_t u16(const char* what) {
        need(2, what);
        std::uint16_t v = static_cast<std::uint8_t>(buf[pos]) |
                          (static_cast<std::uint16_t>(static_cast<std::uint8_t>(buf[pos + 1])) << 8);
        pos += 2;
        return v;
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(buf[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    float f32(const char* what) {
        std::uint32_t bits = u32(what);
        return std::bit_cast<float>(bits);
    }
    std::string bytes(std::size_t n, const char* what) {
        need(n, what);
        std::string s = buf.substr(pos, n);
        pos += n;
        return s;
    }
};

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        raise(ErrorCategory::io, "cannot open " + path.string());
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return buf;
}

}  // namespace

EmbeddingMatrix read_embedding(const std::filesystem::path& path) {
    const std::string buf = slurp(path);
    Reader r{buf, 0, path.string()};

    const std::string magic = r.bytes(4, "magic");
    if (magic != "PLM1")
        raise(ErrorCategory::format, path.string() + ": bad magic (expected PLM1)");
    const std::uint16_t version = r.u16("version");
    if (version != 1)
        raise(ErrorCategory::format,
              path.string() + ": unsupported version " + std::to_string(version));
    const std::uint16_t reserved = r.u16("reserved");
    if (reserved != 0)
        raise(ErrorCategory::format, path.string() + ": nonzero reserved field");
    const std::uint32_t L = r.u32("residue count");
    const std::uint32_t D = r.u32("feature dimension");
    if (L == 0 || D == 0)
        raise(ErrorCategory::format, path.string() + ": zero-sized matrix in header");
    const std::uint16_t id_len = r.u16("id length");
    EmbeddingMatrix emb;
    emb.id = r.bytes(id_len, "id");
    emb.rows = static_cast<int>(L);
    emb.cols = static_cast<int>(D);

    const std::size_t payload = static_cast<std::size_t>(L) * D * 4;
    if (buf.size() - r.pos != payload)
        raise(ErrorCategory::format,
              path.string() + ": payload size mismatch: header implies " +
                  std::to_string(payload) + " bytes, file holds " +
                  std::to_string(buf.size() - r.pos));

    emb.values.resize(static_cast<std::size_t>(L) * D);
    for (std::size_t i = 0; i < emb.values.size(); ++i) {
        const float f = r.f32("payload");
        if (!std::isfinite(f))
            raise(ErrorCategory::validation,
                  path.string() + ": non-finite value at flat index " + std::to_string(i));
        emb.values[i] = static_cast<double>(f);
    }
    return emb;
}

void write_embedding(const EmbeddingMatrix& emb, const std::filesystem::path& path) {
    if (emb.rows <= 0 || emb.cols <= 0 ||
        emb.values.size() != static_cast<std::size_t>(emb.rows) * emb.cols)
        raise(ErrorCategory::validation, "write_embedding: inconsistent matrix shape");
    if (emb.id.size() > 0xFFFF)
        raise(ErrorCategory::validation, "write_embedding: id longer than 65535 bytes");
    std::string out;
    out.reserve(16 + emb.id.size() + emb.values.size() * 4);
    out += "PLM1";
    put_u16(out, 1);
    put_u16(out, 0);
    put_u32(out, static_cast<std::uint32_t>(emb.rows));
    put_u32(out, static_cast<std::uint32_t>(emb.cols));
    put_u16(out, static_cast<std::uint16_t>(emb.id.size()));
    out += emb.id;
    for (double v : emb.values) put_f32(out, static_cast<float>(v));

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        raise(ErrorCategory::io, "cannot write " + path.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f)
        raise(ErrorCategory::io, "short write to " + path.string());
}

}  // namespace dunet
