#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dunet::cli {

struct ModelOptions {
    int input_dim = 1024;
    int levels = 4;
    std::string filters = "32,64,64,64";
    int kernel_len = 7;
    int up_kernel_len = 2;
    bool gate_half_width = false;
    bool no_bottleneck = false;
    double dropout = 0.25;
    bool use_onehot = false;
    int max_len = 7168;
};

struct TrainOptions {
    std::string config_file;
    std::string reference;
    std::string embeddings;
    std::string out;
    std::string val_reference;
    std::string folds_file;
    int fold = -1;
    double val_fraction = 0.1;
    std::string exclude;
    ModelOptions model;
    int batch_size = 8;
    double lr0 = 0.001;
    double lr_decay = 10.0;
    int plateau_patience = 1;
    int early_stop_patience = 5;
    int max_epochs = 100;
    std::uint64_t seed = 1;
    bool mcc_per_sequence = false;
};

struct PredictOptions {
    std::string config_file;
    std::vector<std::string> checkpoints;
    std::string fasta;
    std::string embeddings;
    std::string out;
};

struct EvaluateOptions {
    std::string config_file;
    std::string predictions;
    std::string reference;
    std::string mode = "pdb";  // pdb | nox
    std::string exclude;
    std::string out;
};

struct ProfileOptions {
    std::string predictions;
    std::string ids;  // comma separated
    std::string out;
};

struct FoldsOptions {
    std::string config_file;
    std::vector<std::string> references;
    int k = 10;
    std::uint64_t seed = 1;
    std::string out;  // fold assignment CSV path
};

struct ArchSearchOptions {
    long long target = 628710;
    int top = 10;
};

struct SynthOptionsCli {
    std::string out;
    int n = 200;
    int length = 64;
    int dim = 16;
    std::uint64_t seed = 7;
    std::string prefix = "SYN";
};

int cmd_train(const TrainOptions& opt);
int cmd_predict(const PredictOptions& opt);
int cmd_evaluate(const EvaluateOptions& opt);
int cmd_profile(const ProfileOptions& opt);
int cmd_folds(const FoldsOptions& opt);
int cmd_arch_search(const ArchSearchOptions& opt);
int cmd_synth(const SynthOptionsCli& opt);

}  // namespace dunet::cli
