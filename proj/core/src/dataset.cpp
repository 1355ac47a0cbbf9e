#include <fstream>
#include <unordered_set>

#include "dunet/datasets.hpp"

namespace dunet {

std::vector<std::string> read_lines(const std::filesystem::path& path);

std::set<std::string> read_id_list(const std::filesystem::path& path) {
    std::set<std::string> ids;
    for (const std::string& raw : read_lines(path)) {
        std::string line = raw;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const std::size_t b = line.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const std::size_t e = line.find_last_not_of(" \t");
        ids.insert(line.substr(b, e - b + 1));
    }
    return ids;
}

Dataset assemble_dataset(std::span<const std::vector<SequenceRecord>> sources,
                         const std::filesystem::path& embedding_dir,
                         const std::set<std::string>& exclusion_ids,
                         std::vector<std::string>* warnings) {
    std::vector<SequenceRecord> merged;
    std::unordered_set<std::string> seen;
    for (const auto& source : sources) {
        for (const auto& rec : source) {
            if (!seen.insert(rec.id).second) {
                if (warnings)
                    warnings->push_back("duplicate id " + rec.id + ": keeping first occurrence");
                continue;
            }
            merged.push_back(rec);
        }
    }
    if (!exclusion_ids.empty()) {
        std::vector<SequenceRecord> kept;
        kept.reserve(merged.size());
        for (auto& rec : merged)
            if (!exclusion_ids.count(rec.id)) kept.push_back(std::move(rec));
        merged = std::move(kept);
    }

    std::vector<std::string> missing;
    Dataset ds;
    ds.items.reserve(merged.size());
    for (auto& rec : merged) {
        const auto path = embedding_dir / (rec.id + ".plm");
        if (!std::filesystem::exists(path)) {
            missing.push_back(rec.id);
            continue;
        }
        if (missing.empty()) {
            EmbeddingMatrix emb = read_embedding(path);
            if (emb.rows != static_cast<int>(rec.sequence.size()))
                raise(ErrorCategory::validation,
                      "embedding for " + rec.id + " has " + std::to_string(emb.rows) +
                          " rows but sequence has " + std::to_string(rec.sequence.size()) +
                          " residues");
            ds.items.push_back({std::move(rec), std::move(emb)});
        }
    }
    if (!missing.empty()) {
        std::string msg = "missing embeddings for " + std::to_string(missing.size()) + " id(s):";
        for (const auto& id : missing) msg += " " + id;
        raise(ErrorCategory::io, msg);
    }
    return ds;
}

Tensor2 onehot_encode(const std::string& sequence) {
    static const std::string kCanonical = "ACDEFGHIKLMNPQRSTVWY";
    Tensor2 t(static_cast<int>(sequence.size()), 20);
    for (std::size_t i = 0; i < sequence.size(); ++i) {
        const std::size_t pos = kCanonical.find(sequence[i]);
        if (pos != std::string::npos) t.at(static_cast<int>(i), static_cast<int>(pos)) = 1.0;
        // X/B/Z/U stay all-zero
    }
    return t;
}

}  // namespace dunet
