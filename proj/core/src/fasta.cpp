#include <cctype>
#include <fstream>

#include "dunet/datasets.hpp"

namespace dunet {

namespace {
const std::string kAlphabet = "ACDEFGHIKLMNPQRSTVWYXBZU";
}

bool is_valid_residue(char c) {
    return kAlphabet.find(static_cast<char>(std::toupper(static_cast<unsigned char>(c)))) !=
           std::string::npos;
}

std::vector<std::string> read_lines(const std::filesystem::path& path);

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        raise(ErrorCategory::io, "cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

std::vector<SequenceRecord> parse_fasta(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    std::vector<SequenceRecord> records;
    bool in_record = false;
    std::size_t header_line = 0;

    auto flush = [&](std::size_t at_line) {
        if (!in_record) return;
        if (records.back().sequence.empty())
            raise(ErrorCategory::format,
                  path.string() + ":" + std::to_string(header_line) +
                      ": empty sequence for record " + records.back().id);
        (void)at_line;
    };

    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        const std::string& line = lines[ln];
        if (line.empty()) continue;
        if (line[0] == '>') {
            flush(ln + 1);
            std::string header = line.substr(1);
            const std::size_t sp = header.find_first_of(" \t");
            std::string id = sp == std::string::npos ? header : header.substr(0, sp);
            if (id.empty())
                raise(ErrorCategory::format,
                      path.string() + ":" + std::to_string(ln + 1) + ": empty record id");
            records.push_back({id, "", std::nullopt});
            in_record = true;
            header_line = ln + 1;
            continue;
        }
        if (!in_record)
            raise(ErrorCategory::format,
                  path.string() + ":" + std::to_string(ln + 1) +
                      ": sequence data before first '>' header");
        for (char ch : line) {
            if (std::isspace(static_cast<unsigned char>(ch))) continue;
            const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
            if (kAlphabet.find(up) == std::string::npos)
                raise(ErrorCategory::format,
                      path.string() + ":" + std::to_string(ln + 1) +
                          ": illegal residue character '" + std::string(1, ch) + "'");
            records.back().sequence.push_back(up);
        }
    }
    flush(lines.size());
    return records;
}

}  // namespace dunet
