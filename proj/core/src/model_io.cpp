#include <bit>
#include <cstring>
#include <fstream>

#include "dunet/model.hpp"

namespace dunet {

// Checkpoint layout: "DUNL", u16 format version, tagged config fields
// terminated by tag 0, u32 tensor count, then per tensor: u16 name length,
// name bytes, u32 ndims, ndims x u32 sizes, f64 little-endian payload.
// Model tensors come first in layout order; the standardizer rides along as
// two extra tensors named standardizer.mean / standardizer.std.

namespace {

constexpr std::uint16_t kVersion = 1;

enum ConfigTag : std::uint16_t {
    tag_end = 0,
    tag_input_dim = 1,
    tag_levels = 2,
    tag_filters = 3,
    tag_kernel_len = 4,
    tag_dropout_rate = 5,
    tag_use_onehot = 6,
    tag_num_classes = 7,
    tag_max_len = 8,
    tag_up_kernel_len = 9,
    tag_gate_half_width = 10,
    tag_dedicated_bottleneck = 11,
};

struct Writer {
    std::string out;
    void u8(std::uint8_t v) { out.push_back(static_cast<char>(v)); }
    void u16(std::uint16_t v) {
        for (int i = 0; i < 2; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    void f64(double d) {
        const std::uint64_t bits = std::bit_cast<std::uint64_t>(d);
        for (int i = 0; i < 8; ++i)
            out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
    }
    void bytes(const std::string& s) { out += s; }
};

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;
    const std::string where;

    void need(std::size_t n, const char* what) const {
        if (pos + n > buf.size())
            raise(ErrorCategory::format, where + ": truncated at byte " +
                                             std::to_string(pos) + " while reading " + what);
    }
    std::uint8_t u8(const char* what) {
        need(1, what);
        return static_cast<std::uint8_t>(buf[pos++]);
    }
    std::uint16_t u16(const char* what) {
        need(2, what);
        std::uint16_t v = 0;
        for (int i = 0; i < 2; ++i)
            v |= static_cast<std::uint16_t>(static_cast<std::uint8_t>(buf[pos + i])) << (8 * i);
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
    double f64(const char* what) {
        need(8, what);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(buf[pos + i])) << (8 * i);
        pos += 8;
        return std::bit_cast<double>(v);
    }
    std::string bytes(std::size_t n, const char* what) {
        need(n, what);
        std::string s = buf.substr(pos, n);
        pos += n;
        return s;
    }
};

void write_config(Writer& w, const ModelConfig& c) {
    w.u16(tag_input_dim);   w.u32(static_cast<std::uint32_t>(c.input_dim));
    w.u16(tag_levels);      w.u32(static_cast<std::uint32_t>(c.levels));
    w.u16(tag_filters);
    w.u32(static_cast<std::uint32_t>(c.filters_per_level.size()));
    for (int f : c.filters_per_level) w.u32(static_cast<std::uint32_t>(f));
    w.u16(tag_kernel_len);  w.u32(static_cast<std::uint32_t>(c.kernel_len));
    w.u16(tag_dropout_rate); w.f64(c.dropout_rate);
    w.u16(tag_use_onehot);  w.u8(c.use_onehot_input ? 1 : 0);
    w.u16(tag_num_classes); w.u32(static_cast<std::uint32_t>(c.num_classes));
    w.u16(tag_max_len);     w.u32(static_cast<std::uint32_t>(c.max_len));
    w.u16(tag_up_kernel_len); w.u32(static_cast<std::uint32_t>(c.up_kernel_len));
    w.u16(tag_gate_half_width); w.u8(c.gate_half_width ? 1 : 0);
    w.u16(tag_dedicated_bottleneck); w.u8(c.dedicated_bottleneck ? 1 : 0);
    w.u16(tag_end);
}

ModelConfig read_config(Reader& r) {
    ModelConfig c;
    while (true) {
        const std::uint16_t tag = r.u16("config tag");
        if (tag == tag_end) break;
        switch (tag) {
            case tag_input_dim: c.input_dim = static_cast<int>(r.u32("input_dim")); break;
            case tag_levels: c.levels = static_cast<int>(r.u32("levels")); break;
            case tag_filters: {
                const std::uint32_t n = r.u32("filter count");
                c.filters_per_level.clear();
                for (std::uint32_t i = 0; i < n; ++i)
                    c.filters_per_level.push_back(static_cast<int>(r.u32("filter width")));
                break;
            }
            case tag_kernel_len: c.kernel_len = static_cast<int>(r.u32("kernel_len")); break;
            case tag_dropout_rate: c.dropout_rate = r.f64("dropout_rate"); break;
            case tag_use_onehot: c.use_onehot_input = r.u8("use_onehot") != 0; break;
            case tag_num_classes: c.num_classes = static_cast<int>(r.u32("num_classes")); break;
            case tag_max_len: c.max_len = static_cast<int>(r.u32("max_len")); break;
            case tag_up_kernel_len: c.up_kernel_len = static_cast<int>(r.u32("up_kernel_len")); break;
            case tag_gate_half_width: c.gate_half_width = r.u8("gate_half_width") != 0; break;
            case tag_dedicated_bottleneck:
                c.dedicated_bottleneck = r.u8("dedicated_bottleneck") != 0;
                break;
            default:
                raise(ErrorCategory::format,
                      r.where + ": unknown config tag " + std::to_string(tag) +
                          " at byte " + std::to_string(r.pos - 2));
        }
    }
    return c;
}

void write_tensor(Writer& w, const std::string& name, const std::vector<int>& dims,
                  const std::vector<double>& values) {
    w.u16(static_cast<std::uint16_t>(name.size()));
    w.bytes(name);
    w.u32(static_cast<std::uint32_t>(dims.size()));
    std::size_t n = 1;
    for (int d : dims) {
        w.u32(static_cast<std::uint32_t>(d));
        n *= static_cast<std::size_t>(d);
    }
    if (n != values.size())
        raise(ErrorCategory::validation, "write_tensor: size mismatch for " + name);
    for (double v : values) w.f64(v);
}

struct RawTensor {
    std::string name;
    std::vector<int> dims;
    std::vector<double> values;
};

RawTensor read_tensor(Reader& r) {
    RawTensor t;
    const std::uint16_t name_len = r.u16("tensor name length");
    t.name = r.bytes(name_len, "tensor name");
    const std::uint32_t ndims = r.u32("tensor rank");
    std::size_t n = 1;
    for (std::uint32_t i = 0; i < ndims; ++i) {
        const std::uint32_t d = r.u32("tensor dim");
        t.dims.push_back(static_cast<int>(d));
        n *= d;
    }
    t.values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) t.values.push_back(r.f64("tensor payload"));
    return t;
}

}  // namespace

void save_params(const Checkpoint& ckpt, const std::filesystem::path& path) {
    validate_config(ckpt.config);
    const auto specs = model_layout(ckpt.config);
    if (ckpt.params.tensors.size() != specs.size())
        raise(ErrorCategory::validation, "save_params: params do not match config layout");

    Writer w;
    w.bytes("DUNL");
    w.u16(kVersion);
    write_config(w, ckpt.config);

    const Standardizer& s = ckpt.standardizer.fitted()
                                ? ckpt.standardizer
                                : Standardizer::identity(ckpt.config.input_dim);
    w.u32(static_cast<std::uint32_t>(ckpt.params.tensors.size() + 2));
    for (const auto& t : ckpt.params.tensors)
        write_tensor(w, t.spec.name, t.spec.dims, t.values);
    write_tensor(w, "standardizer.mean", {static_cast<int>(s.mean.size())}, s.mean);
    write_tensor(w, "standardizer.std", {static_cast<int>(s.std_dev.size())}, s.std_dev);

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) raise(ErrorCategory::io, "cannot write " + path.string());
    f.write(w.out.data(), static_cast<std::streamsize>(w.out.size()));
    if (!f) raise(ErrorCategory::io, "short write to " + path.string());
}

Checkpoint load_params(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCategory::io, "cannot open " + path.string());
    const std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Reader r{buf, 0, path.string()};

    if (r.bytes(4, "magic") != "DUNL")
        raise(ErrorCategory::format, path.string() + ": bad magic (expected DUNL)");
    const std::uint16_t version = r.u16("format version");
    if (version != kVersion)
        raise(ErrorCategory::format,
              path.string() + ": unsupported format version " + std::to_string(version));

    Checkpoint ckpt;
    ckpt.config = read_config(r);
    validate_config(ckpt.config);

    const std::uint32_t count = r.u32("tensor count");
    std::vector<RawTensor> raw;
    raw.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) raw.push_back(read_tensor(r));
    if (r.pos != buf.size())
        raise(ErrorCategory::format,
              path.string() + ": trailing garbage after byte " + std::to_string(r.pos));

    const auto specs = model_layout(ckpt.config);
    if (raw.size() != specs.size() + 2)
        raise(ErrorCategory::format,
              path.string() + ": expected " + std::to_string(specs.size() + 2) +
                  " tensors, found " + std::to_string(raw.size()));
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (raw[i].name != specs[i].name || raw[i].dims != specs[i].dims)
            raise(ErrorCategory::format,
                  path.string() + ": tensor " + std::to_string(i) + " is " + raw[i].name +
                      ", layout expects " + specs[i].name);
        ParamTensor t;
        t.spec = specs[i];
        t.values = std::move(raw[i].values);
        ckpt.params.tensors.push_back(std::move(t));
    }
    RawTensor& mean = raw[specs.size()];
    RawTensor& sd = raw[specs.size() + 1];
    if (mean.name != "standardizer.mean" || sd.name != "standardizer.std")
        raise(ErrorCategory::format, path.string() + ": standardizer tensors missing");
    if (mean.values.size() != sd.values.size())
        raise(ErrorCategory::format, path.string() + ": standardizer shape mismatch");
    ckpt.standardizer.mean = std::move(mean.values);
    ckpt.standardizer.std_dev = std::move(sd.values);
    return ckpt;
}

}  // namespace dunet
