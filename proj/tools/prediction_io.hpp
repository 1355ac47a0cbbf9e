#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dunet/trainer.hpp"

namespace dunet::cli {

// CAID-style per-sequence prediction file:
//   >id
//   position<TAB>residue<TAB>score(3 decimals)<TAB>class{0,1}
// Positions are 1-based. The class column is binarized from the unrounded
// score before the 3-decimal rounding is applied to the score column.
void write_prediction(const std::filesystem::path& path, const std::string& id,
                      const std::string& sequence, const PredictionProfile& profile);

struct Prediction {
    std::string id;
    std::string residues;
    std::vector<double> scores;
    std::vector<int> classes;
};

Prediction read_prediction(const std::filesystem::path& path);

// Per-residue plot data: position,residue,score,class (one header row).
void write_profile_csv(const Prediction& pred, const std::filesystem::path& path);

}  // namespace dunet::cli
