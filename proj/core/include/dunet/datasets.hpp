#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dunet/metrics.hpp"  // Label / LabelTrack
#include "dunet/tensor.hpp"

namespace dunet {

// Accepted residue alphabet: the 20 standard amino acids plus X/B/Z/U.
bool is_valid_residue(char c);

struct SequenceRecord {
    std::string id;  // first whitespace-delimited header token
    std::string sequence;
    std::optional<LabelTrack> labels;
};

struct EmbeddingMatrix {
    std::string id;
    int rows = 0;  // residues (L)
    int cols = 0;  // features (D)
    std::vector<double> values;  // row-major by residue; serialized as f32

    double at(int i, int d) const { return values[static_cast<std::size_t>(i) * cols + d]; }
};

// --- FASTA ------------------------------------------------------------

std::vector<SequenceRecord> parse_fasta(const std::filesystem::path& path);

// --- Reference (3-line records: >id / sequence / labels in {0,1,-}) ----

std::vector<SequenceRecord> parse_reference(const std::filesystem::path& path);
void write_reference(std::span<const SequenceRecord> records,
                     const std::filesystem::path& path);

// --- CheZOD -----------------------------------------------------------

// Ordered iff z > 8; everything else (including exactly 8) is disordered.
int binarize_chezod(double z);

// Tab-separated id / 1-based position / residue / zscore. An optional
// header line is detected by a non-numeric 4th field. Positions missing
// from a sequence become X residues with unknown labels.
std::vector<SequenceRecord> parse_chezod(const std::filesystem::path& path);

// --- Embedding container (PLM1) ----------------------------------------

EmbeddingMatrix read_embedding(const std::filesystem::path& path);
void write_embedding(const EmbeddingMatrix& emb, const std::filesystem::path& path);

// --- Standardizer -------------------------------------------------------

struct Standardizer {
    std::vector<double> mean;
    std::vector<double> std_dev;  // each floored at epsilon

    static constexpr double epsilon = 1e-8;
    bool fitted() const { return !mean.empty(); }
    // Identity transform for a given width (mean 0, std 1).
    static Standardizer identity(int dim);
};

// Population (1/N) standard deviation over all residues of the stream;
// requires at least 2 residues total.
Standardizer fit_standardizer(std::span<const EmbeddingMatrix> training);
EmbeddingMatrix apply_standardizer(const Standardizer& s, const EmbeddingMatrix& emb);

// --- Dataset assembly ----------------------------------------------------

struct DataItem {
    SequenceRecord record;
    EmbeddingMatrix embedding;
};

struct Dataset {
    std::vector<DataItem> items;
    bool empty() const { return items.empty(); }
    std::size_t size() const { return items.size(); }
};

// Joins records (first-wins across sources on duplicate ids, warning
// recorded) with embeddings found as <dir>/<id>.plm, drops exclusion ids,
// and validates embedding length against sequence length.
Dataset assemble_dataset(std::span<const std::vector<SequenceRecord>> sources,
                         const std::filesystem::path& embedding_dir,
                         const std::set<std::string>& exclusion_ids = {},
                         std::vector<std::string>* warnings = nullptr);

// One id per line; blank lines and #-comments skipped.
std::set<std::string> read_id_list(const std::filesystem::path& path);

// 20-column one-hot encoding; X/B/Z/U map to all-zero rows.
Tensor2 onehot_encode(const std::string& sequence);

}  // namespace dunet
