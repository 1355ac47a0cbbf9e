#include <algorithm>
#include <cstdio>

#include "dunet/trainer.hpp"

namespace dunet {

Dataset make_synthetic_dataset(const SynthOptions& opt) {
    if (opt.n_sequences < 1 || opt.length < 1 || opt.dim < 1)
        raise(ErrorCategory::validation, "make_synthetic_dataset: bad options");
    static const std::string kCanonical = "ACDEFGHIKLMNPQRSTVWY";
    Rng rng = Rng::derive(opt.seed, 0x5F17ULL);

    Dataset ds;
    ds.items.reserve(static_cast<std::size_t>(opt.n_sequences));
    for (int s = 0; s < opt.n_sequences; ++s) {
        DataItem item;
        char idbuf[64];
        std::snprintf(idbuf, sizeof idbuf, "%s%05d", opt.id_prefix.c_str(), s);
        item.embedding.id = idbuf;
        item.embedding.rows = opt.length;
        item.embedding.cols = opt.dim;
        item.embedding.values.resize(static_cast<std::size_t>(opt.length) * opt.dim);
        for (double& v : item.embedding.values)
            // keep values exactly f32-representable so the container round-trips
            v = static_cast<double>(static_cast<float>(rng.next_normal()));

        item.record.id = idbuf;
        item.record.sequence.resize(static_cast<std::size_t>(opt.length));
        for (char& c : item.record.sequence) c = kCanonical[static_cast<std::size_t>(rng.next_int(20))];

        // label = sign of a +/-2 moving average over feature channel 0
        LabelTrack labels(static_cast<std::size_t>(opt.length));
        for (int i = 0; i < opt.length; ++i) {
            double acc = 0.0;
            int n = 0;
            for (int j = std::max(0, i - 2); j <= std::min(opt.length - 1, i + 2); ++j) {
                acc += item.embedding.at(j, 0);
                ++n;
            }
            labels[static_cast<std::size_t>(i)] =
                acc / n > 0.0 ? Label::disordered : Label::ordered;
        }
        item.record.labels = std::move(labels);
        ds.items.push_back(std::move(item));
    }
    return ds;
}

}  // namespace dunet
