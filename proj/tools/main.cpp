#include <algorithm>
#include <cstdio>

#include <CLI11.hpp>

#include "cli_util.hpp"
#include "commands.hpp"
#include "dunet/common.hpp"
#include "dunet/version.hpp"

using namespace dunet;
using namespace dunet::cli;

namespace {

// Config-file entries are injected before user flags, so "last wins" gives
// the command line precedence. Repeatable options keep their default
// accumulate policy.
void take_last(CLI::App* sub, const std::vector<std::string>& keep_all = {}) {
    for (CLI::Option* opt : sub->get_options()) {
        bool skip = false;
        for (const auto& name : keep_all)
            if (opt->check_name(name)) skip = true;
        if (!skip) opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DisorderUnetLM-style per-residue protein disorder prediction"};
    app.set_version_flag("--version", std::string(kToolName) + " " + kVersion);
    app.require_subcommand(1);

    TrainOptions train_opt;
    auto* train = app.add_subcommand("train", "Train a model from a labeled reference set");
    train->add_option("--config", train_opt.config_file,
                      "Config file with key = value lines (# comments)");
    train->add_option("--reference", train_opt.reference,
                      "3-line reference file (>id / sequence / labels)");
    train->add_option("--embeddings", train_opt.embeddings, "Directory of <id>.plm files");
    train->add_option("--out", train_opt.out, "Output directory");
    train->add_option("--val-reference", train_opt.val_reference,
                      "Explicit validation reference file");
    train->add_option("--folds", train_opt.folds_file, "Fold assignment CSV (id,fold)");
    train->add_option("--fold", train_opt.fold, "Validation fold index (with --folds)");
    train->add_option("--val-fraction", train_opt.val_fraction,
                      "Random validation fraction when no folds/val file is given");
    train->add_option("--exclude", train_opt.exclude, "File with ids to drop (one per line)");
    train->add_option("--input-dim", train_opt.model.input_dim, "Embedding feature count");
    train->add_option("--levels", train_opt.model.levels, "U-Net depth");
    train->add_option("--filters", train_opt.model.filters, "Comma list, one width per level");
    train->add_option("--kernel-len", train_opt.model.kernel_len, "Block conv kernel length");
    train->add_option("--up-kernel-len", train_opt.model.up_kernel_len,
                      "Up-path conv kernel length");
    train->add_flag("--gate-half-width", train_opt.model.gate_half_width,
                    "Halve the attention gate width");
    train->add_flag("--no-bottleneck", train_opt.model.no_bottleneck,
                    "Give every level a skip connection");
    train->add_option("--dropout", train_opt.model.dropout, "Dropout rate");
    train->add_flag("--use-onehot", train_opt.model.use_onehot,
                    "Concatenate a 20-channel one-hot track");
    train->add_option("--max-len", train_opt.model.max_len, "Sequence length limit");
    train->add_option("--batch-size", train_opt.batch_size, "Sequences per batch");
    train->add_option("--lr0", train_opt.lr0, "Initial learning rate");
    train->add_option("--lr-decay", train_opt.lr_decay, "Plateau decay factor");
    train->add_option("--plateau-patience", train_opt.plateau_patience,
                      "Non-improving epochs before an LR drop");
    train->add_option("--early-stop-patience", train_opt.early_stop_patience,
                      "Non-improving epochs before stopping");
    train->add_option("--max-epochs", train_opt.max_epochs, "Hard epoch cap");
    train->add_option("--seed", train_opt.seed, "Run seed");
    train->add_flag("--mcc-per-sequence", train_opt.mcc_per_sequence,
                    "Average MCC per sequence instead of pooling the batch");
    take_last(train);

    PredictOptions predict_opt;
    auto* predict = app.add_subcommand("predict", "Write per-sequence prediction files");
    predict->add_option("--config", predict_opt.config_file,
                        "Config file with key = value lines");
    predict->add_option("--checkpoint", predict_opt.checkpoints,
                        "Checkpoint file (repeat for an ensemble)");
    predict->add_option("--fasta", predict_opt.fasta, "Input FASTA");
    predict->add_option("--embeddings", predict_opt.embeddings, "Directory of <id>.plm files");
    predict->add_option("--out", predict_opt.out, "Output directory");
    take_last(predict, {"--checkpoint"});

    EvaluateOptions eval_opt;
    auto* evaluate = app.add_subcommand("evaluate", "Score predictions against a reference");
    evaluate->add_option("--config", eval_opt.config_file,
                         "Config file with key = value lines");
    evaluate->add_option("--predictions", eval_opt.predictions, "Directory of <id>.pred files");
    evaluate->add_option("--reference", eval_opt.reference, "Reference file");
    evaluate->add_option("--mode", eval_opt.mode, "pdb (unknowns excluded) or nox");
    evaluate->add_option("--exclude", eval_opt.exclude, "File with ids to drop");
    evaluate->add_option("--out", eval_opt.out, "Output directory");
    take_last(evaluate);

    ProfileOptions profile_opt;
    auto* profile = app.add_subcommand("profile", "Emit per-residue CSV plot data");
    profile->add_option("--predictions", profile_opt.predictions,
                        "Directory of <id>.pred files");
    profile->add_option("--ids", profile_opt.ids, "Comma-separated sequence ids");
    profile->add_option("--out", profile_opt.out, "Output directory");
    take_last(profile);

    FoldsOptions folds_opt;
    auto* folds = app.add_subcommand("folds", "Assign stratified cross-validation folds");
    folds->add_option("--config", folds_opt.config_file,
                      "Config file with key = value lines");
    folds->add_option("--reference", folds_opt.references, "Reference file (repeatable)");
    folds->add_option("--k", folds_opt.k, "Fold count");
    folds->add_option("--seed", folds_opt.seed, "Shuffle seed");
    folds->add_option("--out", folds_opt.out, "Fold assignment CSV path");
    take_last(folds, {"--reference"});

    ArchSearchOptions arch_opt;
    auto* arch = app.add_subcommand("arch-search",
                                    "Enumerate architecture candidates by parameter count");
    arch->add_option("--target", arch_opt.target, "Target trainable parameter count");
    arch->add_option("--top", arch_opt.top, "Rows to print");

    SynthOptionsCli synth_opt;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic separable dataset");
    synth->add_option("--out", synth_opt.out, "Output directory");
    synth->add_option("--n", synth_opt.n, "Sequence count");
    synth->add_option("--length", synth_opt.length, "Residues per sequence");
    synth->add_option("--dim", synth_opt.dim, "Embedding feature count");
    synth->add_option("--seed", synth_opt.seed, "Generator seed");
    synth->add_option("--prefix", synth_opt.prefix, "Sequence id prefix");

    try {
        std::vector<std::string> args = expand_config_args(argc, argv);
        std::reverse(args.begin(), args.end());  // CLI11 wants reversed tokens
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "%s: error: usage: %s\n", kToolName, e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "%s: error: %s: %s\n", kToolName, category_name(e.category()),
                     e.what());
        return e.exit_code();
    }

    try {
        if (train->parsed()) return cmd_train(train_opt);
        if (predict->parsed()) return cmd_predict(predict_opt);
        if (evaluate->parsed()) return cmd_evaluate(eval_opt);
        if (profile->parsed()) return cmd_profile(profile_opt);
        if (folds->parsed()) return cmd_folds(folds_opt);
        if (arch->parsed()) return cmd_arch_search(arch_opt);
        if (synth->parsed()) return cmd_synth(synth_opt);
    } catch (const Error& e) {
        std::fprintf(stderr, "%s: error: %s: %s\n", kToolName, category_name(e.category()),
                     e.what());
        return e.exit_code();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s: error: validation: %s\n", kToolName, e.what());
        return 5;
    }
    return 2;
}
