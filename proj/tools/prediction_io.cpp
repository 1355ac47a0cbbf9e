#include "prediction_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

#include "dunet/common.hpp"

namespace dunet::cli {

void write_prediction(const std::filesystem::path& path, const std::string& id,
                      const std::string& sequence, const PredictionProfile& profile) {
    if (sequence.size() != profile.scores.size() ||
        sequence.size() != profile.classes.size())
        raise(ErrorCategory::validation,
              "write_prediction: profile length mismatch for " + id);
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCategory::io, "cannot write " + path.string());
    out << '>' << id << '\n';
    char buf[64];
    for (std::size_t i = 0; i < sequence.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu\t%c\t%.3f\t%d\n", i + 1, sequence[i],
                      profile.scores[i], profile.classes[i]);
        out << buf;
    }
    if (!out) raise(ErrorCategory::io, "short write to " + path.string());
}

Prediction read_prediction(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCategory::io, "cannot open " + path.string());
    Prediction p;
    std::string line;
    std::size_t ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(ln);
        if (ln == 1) {
            if (line[0] != '>')
                raise(ErrorCategory::format, where + ": expected '>' header line");
            p.id = line.substr(1);
            const std::size_t sp = p.id.find_first_of(" \t");
            if (sp != std::string::npos) p.id = p.id.substr(0, sp);
            if (p.id.empty()) raise(ErrorCategory::format, where + ": empty id");
            continue;
        }
        // position TAB residue TAB score TAB class
        std::vector<std::string> f;
        std::size_t start = 0;
        while (true) {
            const std::size_t tab = line.find('\t', start);
            if (tab == std::string::npos) {
                f.push_back(line.substr(start));
                break;
            }
            f.push_back(line.substr(start, tab - start));
            start = tab + 1;
        }
        if (f.size() != 4)
            raise(ErrorCategory::format,
                  where + ": expected 4 tab-separated fields, got " + std::to_string(f.size()));
        long pos = 0;
        auto pr = std::from_chars(f[0].data(), f[0].data() + f[0].size(), pos);
        if (pr.ec != std::errc{} || pr.ptr != f[0].data() + f[0].size() ||
            pos != static_cast<long>(p.residues.size()) + 1)
            raise(ErrorCategory::format,
                  where + ": bad or non-contiguous position '" + f[0] + "'");
        if (f[1].size() != 1)
            raise(ErrorCategory::format, where + ": bad residue field '" + f[1] + "'");
        double score = 0.0;
        auto sr = std::from_chars(f[2].data(), f[2].data() + f[2].size(), score);
        if (sr.ec != std::errc{} || sr.ptr != f[2].data() + f[2].size() ||
            !(score >= 0.0 && score <= 1.0))
            raise(ErrorCategory::format, where + ": bad score '" + f[2] + "'");
        if (f[3] != "0" && f[3] != "1")
            raise(ErrorCategory::format, where + ": bad class '" + f[3] + "'");
        p.residues.push_back(f[1][0]);
        p.scores.push_back(score);
        p.classes.push_back(f[3] == "1" ? 1 : 0);
    }
    if (p.id.empty())
        raise(ErrorCategory::format, path.string() + ": empty prediction file");
    if (p.residues.empty())
        raise(ErrorCategory::format, path.string() + ": prediction holds no residues");
    return p;
}

void write_profile_csv(const Prediction& pred, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCategory::io, "cannot write " + path.string());
    out << "position,residue,score,class\n";
    char buf[64];
    for (std::size_t i = 0; i < pred.residues.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%c,%.3f,%d\n", i + 1, pred.residues[i],
                      pred.scores[i], pred.classes[i]);
        out << buf;
    }
}

}  // namespace dunet::cli
