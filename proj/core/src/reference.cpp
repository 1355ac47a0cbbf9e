#include <cctype>
#include <fstream>

#include "dunet/datasets.hpp"

namespace dunet {

std::vector<std::string> read_lines(const std::filesystem::path& path);

namespace {
Label parse_label_char(char c, const std::string& where) {
    switch (c) {
        case '0': return Label::ordered;
        case '1': return Label::disordered;
        case '-': return Label::unknown;
        default:
            raise(ErrorCategory::format,
                  where + ": illegal label character '" + std::string(1, c) + "'");
    }
}

char label_char(Label l) {
    switch (l) {
        case Label::ordered: return '0';
        case Label::disordered: return '1';
        case Label::unknown: return '-';
    }
    return '-';
}
}  // namespace

std::vector<SequenceRecord> parse_reference(const std::filesystem::path& path) {
    auto lines = read_lines(path);
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    std::vector<SequenceRecord> records;
    for (std::size_t ln = 0; ln < lines.size(); ln += 3) {
        const std::string& header = lines[ln];
        if (header.empty() || header[0] != '>')
            raise(ErrorCategory::format,
                  path.string() + ":" + std::to_string(ln + 1) +
                      ": expected '>' header line");
        if (ln + 2 >= lines.size())
            raise(ErrorCategory::format,
                  path.string() + ":" + std::to_string(ln + 1) +
                      ": truncated record (need header, sequence, labels)");
        std::string id = header.substr(1);
        const std::size_t sp = id.find_first_of(" \t");
        if (sp != std::string::npos) id = id.substr(0, sp);
        if (id.empty())
            raise(ErrorCategory::format,
                  path.string() + ":" + std::to_string(ln + 1) + ": empty record id");

        SequenceRecord rec;
        rec.id = id;
        for (char ch : lines[ln + 1]) {
            const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
            if (!is_valid_residue(up))
                raise(ErrorCategory::format,
                      path.string() + ":" + std::to_string(ln + 2) +
                          ": illegal residue character '" + std::string(1, ch) + "'");
            rec.sequence.push_back(up);
        }
        if (rec.sequence.empty())
            raise(ErrorCategory::format,
                  path.string() + ":" + std::to_string(ln + 2) + ": empty sequence for " + id);

        LabelTrack labels;
        const std::string where = path.string() + ":" + std::to_string(ln + 3);
        for (char ch : lines[ln + 2]) labels.push_back(parse_label_char(ch, where));
        if (labels.size() != rec.sequence.size())
            raise(ErrorCategory::format,
                  "record " + id + ": label track length " + std::to_string(labels.size()) +
                      " does not match sequence length " + std::to_string(rec.sequence.size()));
        rec.labels = std::move(labels);
        records.push_back(std::move(rec));
    }
    return records;
}

void write_reference(std::span<const SequenceRecord> records,
                     const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        raise(ErrorCategory::io, "cannot write " + path.string());
    for (const auto& rec : records) {
        if (!rec.labels || rec.labels->size() != rec.sequence.size())
            raise(ErrorCategory::validation,
                  "write_reference: record " + rec.id + " lacks a full label track");
        out << '>' << rec.id << '\n' << rec.sequence << '\n';
        for (Label l : *rec.labels) out << label_char(l);
        out << '\n';
    }
}

}  // namespace dunet
