#include <cctype>
#include <charconv>
#include <cmath>
#include <map>

#include "dunet/datasets.hpp"

namespace dunet {

std::vector<std::string> read_lines(const std::filesystem::path& path);

int binarize_chezod(double z) {
    if (!std::isfinite(z))
        raise(ErrorCategory::validation, "binarize_chezod: non-finite z-score");
    return z > 8.0 ? 0 : 1;
}

namespace {
std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

bool parse_double(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto res = std::from_chars(b, e, out);
    return res.ec == std::errc{} && res.ptr == e;
}

bool parse_int(const std::string& s, long& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto res = std::from_chars(b, e, out);
    return res.ec == std::errc{} && res.ptr == e;
}
}  // namespace

std::vector<SequenceRecord> parse_chezod(const std::filesystem::path& path) {
    const auto lines = read_lines(path);

    struct Row { long pos; char residue; double z; };
    std::vector<std::string> id_order;
    std::map<std::string, std::vector<Row>> by_id;

    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        const std::string& line = lines[ln];
        if (line.empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(ln + 1);
        const auto f = split_tabs(line);
        if (f.size() != 4)
            raise(ErrorCategory::format, where + ": expected 4 tab-separated fields, got " +
                                             std::to_string(f.size()));
        double z;
        if (!parse_double(f[3], z)) {
            if (ln == 0) continue;  // header line, detected by non-numeric 4th field
            raise(ErrorCategory::format, where + ": non-numeric z-score '" + f[3] + "'");
        }
        long pos;
        if (!parse_int(f[1], pos) || pos < 1)
            raise(ErrorCategory::format, where + ": bad 1-based position '" + f[1] + "'");
        if (f[2].size() != 1 || !is_valid_residue(f[2][0]))
            raise(ErrorCategory::format, where + ": bad residue field '" + f[2] + "'");
        if (!std::isfinite(z))
            raise(ErrorCategory::validation, where + ": non-finite z-score");
        if (f[0].empty())
            raise(ErrorCategory::format, where + ": empty id");
        auto it = by_id.find(f[0]);
        if (it == by_id.end()) {
            id_order.push_back(f[0]);
            it = by_id.emplace(f[0], std::vector<Row>{}).first;
        }
        const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(f[2][0])));
        it->second.push_back({pos, up, z});
    }

    std::vector<SequenceRecord> records;
    for (const std::string& id : id_order) {
        auto& rows = by_id[id];
        long max_pos = 0;
        for (const Row& r : rows) max_pos = std::max(max_pos, r.pos);
        SequenceRecord rec;
        rec.id = id;
        rec.sequence.assign(static_cast<std::size_t>(max_pos), 'X');
        LabelTrack labels(static_cast<std::size_t>(max_pos), Label::unknown);
        std::vector<bool> seen(static_cast<std::size_t>(max_pos), false);
        for (const Row& r : rows) {
            const std::size_t i = static_cast<std::size_t>(r.pos - 1);
            if (seen[i])
                raise(ErrorCategory::format,
                      path.string() + ": duplicate position " + std::to_string(r.pos) +
                          " for id " + id);
            seen[i] = true;
            rec.sequence[i] = r.residue;
            labels[i] = binarize_chezod(r.z) == 1 ? Label::disordered : Label::ordered;
        }
        rec.labels = std::move(labels);
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace dunet
