#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "cli_util.hpp"
#include "dunet/datasets.hpp"
#include "dunet/metrics.hpp"
#include "dunet/model.hpp"
#include "dunet/trainer.hpp"
#include "prediction_io.hpp"

namespace dunet::cli {

namespace fs = std::filesystem;

namespace {

std::vector<int> parse_filters(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        int v = 0;
        auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (r.ec != std::errc{} || r.ptr != tok.data() + tok.size() || v < 1)
            raise(ErrorCategory::usage, "bad filter list entry '" + tok + "'");
        out.push_back(v);
    }
    if (out.empty()) raise(ErrorCategory::usage, "empty filter list");
    return out;
}

ModelConfig to_model_config(const ModelOptions& m) {
    ModelConfig cfg;
    cfg.input_dim = m.input_dim;
    cfg.levels = m.levels;
    cfg.filters_per_level = parse_filters(m.filters);
    cfg.kernel_len = m.kernel_len;
    cfg.up_kernel_len = m.up_kernel_len;
    cfg.gate_half_width = m.gate_half_width;
    cfg.dedicated_bottleneck = !m.no_bottleneck;
    cfg.dropout_rate = m.dropout;
    cfg.use_onehot_input = m.use_onehot;
    cfg.max_len = m.max_len;
    validate_config(cfg);
    return cfg;
}

void ensure_out_dir(const std::string& out) {
    if (out.empty()) raise(ErrorCategory::usage, "--out is required");
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) raise(ErrorCategory::io, "cannot create output directory " + out);
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::map<std::string, int> read_folds_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCategory::io, "cannot open " + path.string());
    std::map<std::string, int> folds;
    std::string line;
    std::size_t ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (ln == 1 && line == "id,fold") continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            raise(ErrorCategory::format,
                  path.string() + ":" + std::to_string(ln) + ": expected id,fold");
        const std::string id = line.substr(0, comma);
        const std::string fs_ = line.substr(comma + 1);
        int f = -1;
        auto r = std::from_chars(fs_.data(), fs_.data() + fs_.size(), f);
        if (r.ec != std::errc{} || r.ptr != fs_.data() + fs_.size() || f < 0)
            raise(ErrorCategory::format,
                  path.string() + ":" + std::to_string(ln) + ": bad fold index '" + fs_ + "'");
        folds[id] = f;
    }
    if (folds.empty())
        raise(ErrorCategory::format, path.string() + ": empty fold assignment");
    return folds;
}

std::set<std::string> load_exclusions(const std::string& path) {
    if (path.empty()) return {};
    return read_id_list(path);
}

Dataset standardized(const Dataset& ds, const Standardizer& s) {
    Dataset out;
    out.items.reserve(ds.size());
    for (const auto& item : ds.items) {
        DataItem copy;
        copy.record = item.record;
        copy.embedding = apply_standardizer(s, item.embedding);
        out.items.push_back(std::move(copy));
    }
    return out;
}

std::vector<const EmbeddingMatrix*> embeddings_of(const Dataset& ds) {
    std::vector<const EmbeddingMatrix*> out;
    out.reserve(ds.size());
    for (const auto& item : ds.items) out.push_back(&item.embedding);
    return out;
}

}  // namespace

int cmd_train(const TrainOptions& opt) {
    Manifest manifest;
    manifest.command = "train";
    manifest.config_file = opt.config_file;
    manifest.started_at = iso_timestamp_utc();
    ensure_out_dir(opt.out);

    const ModelConfig mc = to_model_config(opt.model);
    TrainConfig tc;
    tc.batch_size = opt.batch_size;
    tc.lr0 = opt.lr0;
    tc.lr_decay_factor = opt.lr_decay;
    tc.plateau_patience = opt.plateau_patience;
    tc.early_stop_patience = opt.early_stop_patience;
    tc.max_epochs = opt.max_epochs;
    tc.seed = opt.seed;
    validate_train_config(tc);
    ObjectiveOptions obj;
    obj.mcc_per_sequence = opt.mcc_per_sequence;

    if (opt.reference.empty()) raise(ErrorCategory::usage, "--reference is required");
    if (opt.embeddings.empty()) raise(ErrorCategory::usage, "--embeddings is required");

    const auto exclusions = load_exclusions(opt.exclude);
    const auto records = parse_reference(opt.reference);

    std::vector<SequenceRecord> train_recs, val_recs;
    if (!opt.folds_file.empty() && opt.fold >= 0) {
        const auto folds = read_folds_csv(opt.folds_file);
        for (const auto& rec : records) {
            const auto it = folds.find(rec.id);
            if (it == folds.end())
                raise(ErrorCategory::validation,
                      "record " + rec.id + " is missing from the fold assignment");
            (it->second == opt.fold ? val_recs : train_recs).push_back(rec);
        }
        if (val_recs.empty())
            raise(ErrorCategory::validation,
                  "fold " + std::to_string(opt.fold) + " selects no validation records");
    } else if (!opt.val_reference.empty()) {
        train_recs = records;
        val_recs = parse_reference(opt.val_reference);
    } else {
        // seeded random split
        std::vector<int> order(records.size());
        std::iota(order.begin(), order.end(), 0);
        Rng rng = Rng::derive(opt.seed, 0x5AA17ULL);
        rng.shuffle(order);
        const std::size_t n_val = std::max<std::size_t>(
            1, static_cast<std::size_t>(opt.val_fraction * static_cast<double>(records.size())));
        if (n_val >= records.size())
            raise(ErrorCategory::validation, "validation fraction leaves no training data");
        for (std::size_t i = 0; i < order.size(); ++i)
            (i < n_val ? val_recs : train_recs)
                .push_back(records[static_cast<std::size_t>(order[i])]);
    }

    std::vector<std::string> warnings;
    const std::vector<std::vector<SequenceRecord>> train_src = {train_recs};
    const std::vector<std::vector<SequenceRecord>> val_src = {val_recs};
    const Dataset train_raw = assemble_dataset(train_src, opt.embeddings, exclusions, &warnings);
    const Dataset val_raw = assemble_dataset(val_src, opt.embeddings, exclusions, &warnings);
    for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    if (train_raw.empty() || val_raw.empty())
        raise(ErrorCategory::validation, "train/validation split left an empty set");

    // leak-free: statistics come from the training residues only
    std::vector<EmbeddingMatrix> train_embs;
    train_embs.reserve(train_raw.size());
    for (const auto* e : embeddings_of(train_raw)) train_embs.push_back(*e);
    const Standardizer std_ = fit_standardizer(train_embs);

    const Dataset train_set = standardized(train_raw, std_);
    const Dataset val_set = standardized(val_raw, std_);

    const TrainResult result = train(mc, tc, train_set, val_set, obj);

    Checkpoint ckpt;
    ckpt.config = mc;
    ckpt.params = result.best_params;
    ckpt.standardizer = std_;
    const fs::path ckpt_path = fs::path(opt.out) / "checkpoint.dunl";
    const fs::path hist_path = fs::path(opt.out) / "history.csv";
    save_params(ckpt, ckpt_path);
    write_history_csv(result.history, hist_path);

    manifest.parameters = {
        {"reference", opt.reference},
        {"embeddings", opt.embeddings},
        {"val_reference", opt.val_reference},
        {"folds_file", opt.folds_file},
        {"fold", std::to_string(opt.fold)},
        {"val_fraction", fmt(opt.val_fraction)},
        {"exclude", opt.exclude},
        {"input_dim", std::to_string(mc.input_dim)},
        {"levels", std::to_string(mc.levels)},
        {"filters", opt.model.filters},
        {"kernel_len", std::to_string(mc.kernel_len)},
        {"up_kernel_len", std::to_string(mc.up_kernel_len)},
        {"gate_half_width", mc.gate_half_width ? "true" : "false"},
        {"dedicated_bottleneck", mc.dedicated_bottleneck ? "true" : "false"},
        {"dropout", fmt(mc.dropout_rate)},
        {"use_onehot", mc.use_onehot_input ? "true" : "false"},
        {"max_len", std::to_string(mc.max_len)},
        {"batch_size", std::to_string(tc.batch_size)},
        {"lr0", fmt(tc.lr0)},
        {"lr_decay", fmt(tc.lr_decay_factor)},
        {"plateau_patience", std::to_string(tc.plateau_patience)},
        {"early_stop_patience", std::to_string(tc.early_stop_patience)},
        {"max_epochs", std::to_string(tc.max_epochs)},
        {"seed", std::to_string(tc.seed)},
        {"mcc_per_sequence", obj.mcc_per_sequence ? "true" : "false"},
        {"param_count", std::to_string(param_count(mc))},
        {"best_epoch", std::to_string(result.history.best_epoch)},
        {"best_val_loss", fmt(result.history.best_val_loss)},
    };
    manifest.inputs = {opt.reference, opt.embeddings};
    manifest.outputs = {ckpt_path.string(), hist_path.string()};
    manifest.finished_at = iso_timestamp_utc();
    write_manifest(manifest, fs::path(opt.out) / "manifest.json");
    return 0;
}

int cmd_predict(const PredictOptions& opt) {
    Manifest manifest;
    manifest.command = "predict";
    manifest.config_file = opt.config_file;
    manifest.started_at = iso_timestamp_utc();

    if (opt.checkpoints.empty()) raise(ErrorCategory::usage, "--checkpoint is required");
    if (opt.fasta.empty()) raise(ErrorCategory::usage, "--fasta is required");
    if (opt.embeddings.empty()) raise(ErrorCategory::usage, "--embeddings is required");
    ensure_out_dir(opt.out);

    std::vector<Checkpoint> members;
    members.reserve(opt.checkpoints.size());
    for (const auto& p : opt.checkpoints) members.push_back(load_params(p));

    const auto records = parse_fasta(opt.fasta);
    if (records.empty()) raise(ErrorCategory::validation, "no sequences in " + opt.fasta);

    // abort before writing anything if an embedding is missing
    std::vector<std::string> missing;
    for (const auto& rec : records)
        if (!fs::exists(fs::path(opt.embeddings) / (rec.id + ".plm")))
            missing.push_back(rec.id);
    if (!missing.empty()) {
        std::string msg = "missing embeddings for " + std::to_string(missing.size()) + " id(s):";
        for (const auto& id : missing) msg += " " + id;
        raise(ErrorCategory::io, msg);
    }

    std::vector<std::string> outputs(records.size());
    parallel_for(records.size(), thread_count_from_env(), [&](std::size_t i) {
        const auto& rec = records[i];
        const EmbeddingMatrix emb =
            read_embedding(fs::path(opt.embeddings) / (rec.id + ".plm"));
        if (emb.rows != static_cast<int>(rec.sequence.size()))
            raise(ErrorCategory::validation,
                  "embedding for " + rec.id + " has " + std::to_string(emb.rows) +
                      " rows but sequence has " + std::to_string(rec.sequence.size()));
        const PredictionProfile profile = ensemble_predict(members, emb, rec.sequence);
        const fs::path out_path = fs::path(opt.out) / (rec.id + ".pred");
        write_prediction(out_path, rec.id, rec.sequence, profile);
        outputs[i] = out_path.string();
    });

    manifest.parameters = {
        {"fasta", opt.fasta},
        {"embeddings", opt.embeddings},
        {"n_checkpoints", std::to_string(opt.checkpoints.size())},
        {"n_sequences", std::to_string(records.size())},
        {"threads", std::to_string(thread_count_from_env())},
    };
    manifest.inputs = opt.checkpoints;
    manifest.inputs.push_back(opt.fasta);
    manifest.inputs.push_back(opt.embeddings);
    manifest.outputs = outputs;
    manifest.finished_at = iso_timestamp_utc();
    write_manifest(manifest, fs::path(opt.out) / "manifest.json");
    return 0;
}

namespace {

struct TargetOutcome {
    bool skipped = false;
    std::string reason;
    ScoredResidues scored;
    MetricReport report;
};

std::string metric_or_na(const std::optional<double>& v) {
    if (!v) return "NA";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", *v);
    return buf;
}

std::string fixed6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

int cmd_evaluate(const EvaluateOptions& opt) {
    Manifest manifest;
    manifest.command = "evaluate";
    manifest.config_file = opt.config_file;
    manifest.started_at = iso_timestamp_utc();

    if (opt.predictions.empty()) raise(ErrorCategory::usage, "--predictions is required");
    if (opt.reference.empty()) raise(ErrorCategory::usage, "--reference is required");
    if (opt.mode != "pdb" && opt.mode != "nox")
        raise(ErrorCategory::usage, "--mode must be pdb or nox");
    ensure_out_dir(opt.out);

    const auto exclusions = load_exclusions(opt.exclude);
    auto records = parse_reference(opt.reference);
    if (!exclusions.empty()) {
        std::vector<SequenceRecord> kept;
        for (auto& r : records)
            if (!exclusions.count(r.id)) kept.push_back(std::move(r));
        records = std::move(kept);
    }
    if (records.empty())
        raise(ErrorCategory::validation, "no reference records left to evaluate");

    if (opt.mode == "nox") {
        for (const auto& rec : records)
            for (Label l : *rec.labels)
                if (l == Label::unknown)
                    raise(ErrorCategory::validation,
                          "nox mode forbids unknown labels, found one in " + rec.id);
    }

    std::vector<TargetOutcome> outcomes(records.size());
    parallel_for(records.size(), thread_count_from_env(), [&](std::size_t i) {
        const auto& rec = records[i];
        TargetOutcome& out = outcomes[i];
        const fs::path pred_path = fs::path(opt.predictions) / (rec.id + ".pred");
        if (!fs::exists(pred_path)) {
            out.skipped = true;
            out.reason = "missing_prediction";
            return;
        }
        Prediction pred;
        try {
            pred = read_prediction(pred_path);
        } catch (const Error&) {
            out.skipped = true;
            out.reason = "unreadable_prediction";
            return;
        }
        if (pred.scores.size() != rec.sequence.size()) {
            out.skipped = true;
            out.reason = "length_mismatch";
            return;
        }
        out.scored.id = rec.id;
        out.scored.scores = pred.scores;
        out.scored.labels = *rec.labels;
        out.report = score_target(out.scored);
    });

    std::vector<ScoredResidues> evaluated;
    std::vector<std::pair<std::string, std::string>> skipped;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (outcomes[i].skipped)
            skipped.emplace_back(records[i].id, outcomes[i].reason);
        else
            evaluated.push_back(outcomes[i].scored);
    }
    if (evaluated.empty())
        raise(ErrorCategory::validation,
              "no targets could be evaluated (all " + std::to_string(skipped.size()) +
                  " skipped)");

    const AggregateReport agg = aggregate(evaluated);

    const fs::path per_target_path = fs::path(opt.out) / "per_target.csv";
    {
        std::ofstream out(per_target_path, std::ios::binary);
        if (!out) raise(ErrorCategory::io, "cannot write " + per_target_path.string());
        out << "id,n_residues,n_labeled,n_positive,n_negative,roc_auc,mcc,f1,"
               "mcc_degenerate,f1_degenerate\n";
        for (std::size_t i = 0; i < outcomes.size(); ++i) {
            if (outcomes[i].skipped) continue;
            const auto& r = outcomes[i].report;
            out << records[i].id << ',' << records[i].sequence.size() << ',' << r.n_labeled
                << ',' << r.n_positive << ',' << r.n_negative << ','
                << metric_or_na(r.roc_auc) << ',' << fixed6(r.mcc) << ',' << fixed6(r.f1)
                << ',' << (r.mcc_degenerate ? 1 : 0) << ',' << (r.f1_degenerate ? 1 : 0)
                << "\n";
        }
    }

    const fs::path aggregate_path = fs::path(opt.out) / "aggregate.csv";
    {
        std::ofstream out(aggregate_path, std::ios::binary);
        if (!out) raise(ErrorCategory::io, "cannot write " + aggregate_path.string());
        out << "aggregation,n_targets,n_labeled,roc_auc,roc_auc_targets,mcc,f1\n";
        out << "pooled," << agg.n_targets << ',' << agg.pooled.n_labeled << ','
            << metric_or_na(agg.pooled.roc_auc) << ',' << agg.n_targets << ','
            << fixed6(agg.pooled.mcc) << ',' << fixed6(agg.pooled.f1) << "\n";
        out << "per_target_mean," << agg.n_targets << ',' << agg.pooled.n_labeled << ','
            << (agg.roc_auc_targets > 0 ? fixed6(agg.mean_roc_auc) : "NA") << ','
            << agg.roc_auc_targets << ',' << fixed6(agg.mean_mcc) << ','
            << fixed6(agg.mean_f1) << "\n";
    }

    const fs::path skipped_path = fs::path(opt.out) / "skipped.csv";
    {
        std::ofstream out(skipped_path, std::ios::binary);
        if (!out) raise(ErrorCategory::io, "cannot write " + skipped_path.string());
        out << "id,reason\n";
        for (const auto& [id, reason] : skipped) out << id << ',' << reason << "\n";
    }

    manifest.parameters = {
        {"predictions", opt.predictions},
        {"reference", opt.reference},
        {"mode", opt.mode},
        {"exclude", opt.exclude},
        {"n_targets", std::to_string(agg.n_targets)},
        {"n_skipped", std::to_string(skipped.size())},
        {"threads", std::to_string(thread_count_from_env())},
    };
    manifest.inputs = {opt.predictions, opt.reference};
    manifest.outputs = {per_target_path.string(), aggregate_path.string(),
                        skipped_path.string()};
    manifest.finished_at = iso_timestamp_utc();
    write_manifest(manifest, fs::path(opt.out) / "manifest.json");
    return 0;
}

int cmd_profile(const ProfileOptions& opt) {
    Manifest manifest;
    manifest.command = "profile";
    manifest.started_at = iso_timestamp_utc();

    if (opt.predictions.empty()) raise(ErrorCategory::usage, "--predictions is required");
    if (opt.ids.empty()) raise(ErrorCategory::usage, "--ids is required");
    ensure_out_dir(opt.out);

    std::vector<std::string> ids;
    std::stringstream ss(opt.ids);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) ids.push_back(tok);
    if (ids.empty()) raise(ErrorCategory::usage, "--ids holds no ids");

    std::vector<std::string> outputs;
    for (const auto& id : ids) {
        const fs::path pred_path = fs::path(opt.predictions) / (id + ".pred");
        if (!fs::exists(pred_path))
            raise(ErrorCategory::io, "no prediction for id " + id + " at " + pred_path.string());
        const Prediction pred = read_prediction(pred_path);
        const fs::path out_path = fs::path(opt.out) / (id + "_profile.csv");
        write_profile_csv(pred, out_path);
        outputs.push_back(out_path.string());
    }

    manifest.parameters = {{"predictions", opt.predictions}, {"ids", opt.ids}};
    manifest.inputs = {opt.predictions};
    manifest.outputs = outputs;
    manifest.finished_at = iso_timestamp_utc();
    write_manifest(manifest, fs::path(opt.out) / "manifest.json");
    return 0;
}

int cmd_folds(const FoldsOptions& opt) {
    Manifest manifest;
    manifest.command = "folds";
    manifest.config_file = opt.config_file;
    manifest.started_at = iso_timestamp_utc();

    if (opt.references.empty()) raise(ErrorCategory::usage, "--reference is required");
    if (opt.out.empty()) raise(ErrorCategory::usage, "--out is required");

    // stratification needs only lengths and label ratios, not embeddings
    Dataset ds;
    std::set<std::string> seen;
    for (const auto& path : opt.references) {
        for (auto& rec : parse_reference(path)) {
            if (!seen.insert(rec.id).second) {
                std::fprintf(stderr, "warning: duplicate id %s: keeping first occurrence\n",
                             rec.id.c_str());
                continue;
            }
            DataItem item;
            item.record = std::move(rec);
            ds.items.push_back(std::move(item));
        }
    }
    const auto folds = stratified_folds(ds, opt.k, opt.seed);

    const fs::path out_path(opt.out);
    if (out_path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(out_path.parent_path(), ec);
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) raise(ErrorCategory::io, "cannot write " + opt.out);
    out << "id,fold\n";
    for (std::size_t i = 0; i < ds.size(); ++i)
        out << ds.items[i].record.id << ',' << folds[i] << "\n";
    out.close();

    manifest.parameters = {{"k", std::to_string(opt.k)}, {"seed", std::to_string(opt.seed)}};
    manifest.inputs = opt.references;
    manifest.outputs = {opt.out};
    manifest.finished_at = iso_timestamp_utc();
    if (out_path.has_parent_path())
        write_manifest(manifest, out_path.parent_path() / "manifest.json");
    return 0;
}

int cmd_arch_search(const ArchSearchOptions& opt) {
    const auto candidates = search_architectures(opt.target);
    std::printf("rank,levels,filters,up_kernel,gate_width,bottleneck,params,distance\n");
    const int top = std::min<int>(opt.top, static_cast<int>(candidates.size()));
    for (int i = 0; i < top; ++i) {
        const auto& c = candidates[static_cast<std::size_t>(i)];
        std::string filters;
        for (std::size_t j = 0; j < c.config.filters_per_level.size(); ++j) {
            if (j) filters += '/';
            filters += std::to_string(c.config.filters_per_level[j]);
        }
        std::printf("%d,%d,%s,%d,%s,%s,%lld,%lld\n", i + 1, c.config.levels, filters.c_str(),
                    c.config.up_kernel_len, c.config.gate_half_width ? "half" : "full",
                    c.config.dedicated_bottleneck ? "yes" : "no", c.params, c.distance);
    }
    const auto& best = candidates.front();
    std::printf("# best match: %lld parameters vs target %lld (distance %lld)\n", best.params,
                opt.target, best.distance);
    return 0;
}

int cmd_synth(const SynthOptionsCli& opt) {
    Manifest manifest;
    manifest.command = "synth";
    manifest.started_at = iso_timestamp_utc();
    ensure_out_dir(opt.out);

    SynthOptions so;
    so.n_sequences = opt.n;
    so.length = opt.length;
    so.dim = opt.dim;
    so.seed = opt.seed;
    so.id_prefix = opt.prefix;
    const Dataset ds = make_synthetic_dataset(so);

    const fs::path emb_dir = fs::path(opt.out) / "embeddings";
    fs::create_directories(emb_dir);
    std::vector<SequenceRecord> records;
    for (const auto& item : ds.items) {
        records.push_back(item.record);
        write_embedding(item.embedding, emb_dir / (item.record.id + ".plm"));
    }
    const fs::path ref_path = fs::path(opt.out) / "reference.ref";
    write_reference(records, ref_path);

    const fs::path fasta_path = fs::path(opt.out) / "sequences.fasta";
    {
        std::ofstream out(fasta_path, std::ios::binary);
        if (!out) raise(ErrorCategory::io, "cannot write " + fasta_path.string());
        for (const auto& rec : records) out << '>' << rec.id << '\n' << rec.sequence << '\n';
    }

    manifest.parameters = {
        {"n", std::to_string(opt.n)},         {"length", std::to_string(opt.length)},
        {"dim", std::to_string(opt.dim)},     {"seed", std::to_string(opt.seed)},
        {"prefix", opt.prefix},
    };
    manifest.outputs = {ref_path.string(), fasta_path.string(), emb_dir.string()};
    manifest.finished_at = iso_timestamp_utc();
    write_manifest(manifest, fs::path(opt.out) / "manifest.json");
    return 0;
}

}  // namespace dunet::cli
