#include "citemb/sgns.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "citemb/errors.hpp"
#include "citemb/rng.hpp"

namespace citemb {

double sigmoid_clamped(double x) {
    if (x > 30.0) return 1.0 - 1e-13;
    if (x < -30.0) return 1e-13;
    return 1.0 / (1.0 + std::exp(-x));
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void check_dims(std::span<const double> center, std::span<const double> context,
                const std::vector<std::vector<double>>& negatives) {
    if (center.size() != context.size())
        throw DimMismatch("center and context vectors differ in length");
    for (const auto& n : negatives)
        if (n.size() != center.size())
            throw DimMismatch("negative vector differs in length from center");
}

} // namespace

double pair_loss(std::span<const double> center, std::span<const double> context,
                 const std::vector<std::vector<double>>& negatives) {
    check_dims(center, context, negatives);
    double loss = -std::log(sigmoid_clamped(dot(center, context)));
    for (const auto& n : negatives)
        loss -= std::log(sigmoid_clamped(-dot(center, std::span<const double>(n))));
    return loss;
}

PairGradients pair_gradients(std::span<const double> center, std::span<const double> context,
                             const std::vector<std::vector<double>>& negatives) {
    check_dims(center, context, negatives);
    const std::size_t d = center.size();

    PairGradients g;
    g.center.assign(d, 0.0);
    g.context.assign(d, 0.0);
    g.negatives.assign(negatives.size(), std::vector<double>(d, 0.0));

    const double coef_pos = sigmoid_clamped(dot(center, context)) - 1.0;
    for (std::size_t i = 0; i < d; ++i) {
        g.context[i] = coef_pos * center[i];
        g.center[i] = coef_pos * context[i];
    }
    for (std::size_t k = 0; k < negatives.size(); ++k) {
        const double coef = sigmoid_clamped(dot(center, std::span<const double>(negatives[k])));
        for (std::size_t i = 0; i < d; ++i) {
            g.negatives[k][i] = coef * center[i];
            g.center[i] += coef * negatives[k][i];
        }
    }
    return g;
}

namespace {

// Seed streams: 0 init, then per worker a schedule stream (subsampling and
// window draws) and a negative-draw stream. Keeping them separate lets the
// pair-counting pass replay the schedule exactly.
std::uint64_t schedule_seed(std::uint64_t seed, std::uint32_t worker) {
    return mix_seed(seed, 1 + 2ULL * worker);
}
std::uint64_t negative_seed(std::uint64_t seed, std::uint32_t worker) {
    return mix_seed(seed, 2 + 2ULL * worker);
}

struct SharedState {
    const std::vector<std::vector<std::uint32_t>>& sentence_ids;
    const std::vector<double>& keep;
    const NegativeTable& table;
    const TrainConfig& cfg;
    float* input;
    float* output;
};

struct WorkerResult {
    std::uint64_t scheduled_pairs = 0;
    std::vector<double> epoch_loss_sum;
    std::vector<std::uint64_t> epoch_pairs;
};

// Counts the pairs the schedule stream will produce for one worker shard.
std::uint64_t count_pairs(const SharedState& st, std::uint32_t worker) {
    Rng sched(schedule_seed(st.cfg.seed, worker));
    std::uint64_t pairs = 0;
    std::vector<std::uint32_t> survivors;
    for (std::uint32_t epoch = 0; epoch < st.cfg.epochs; ++epoch) {
        for (std::size_t s = worker; s < st.sentence_ids.size(); s += st.cfg.workers) {
            survivors.clear();
            for (const std::uint32_t id : st.sentence_ids[s]) {
                const double p = st.keep[id];
                if (p >= 1.0 || sched.next_double() < p) survivors.push_back(id);
            }
            const std::size_t n = survivors.size();
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t b = 1 + sched.next_below(st.cfg.window);
                const std::size_t lo = i > b ? i - b : 0;
                const std::size_t hi = std::min(n - 1, i + b);
                pairs += hi - lo; // window positions minus the center itself
            }
        }
    }
    return pairs;
}

void train_worker(const SharedState& st, std::uint32_t worker, WorkerResult& result,
                  bool want_loss) {
    const std::uint32_t dim = st.cfg.dim;
    const std::uint32_t negatives = st.cfg.negatives;
    const std::uint64_t total_pairs = result.scheduled_pairs;

    Rng sched(schedule_seed(st.cfg.seed, worker));
    Rng neg_rng(negative_seed(st.cfg.seed, worker));

    std::vector<std::uint32_t> survivors;
    std::vector<std::uint32_t> neg_ids(negatives);
    std::vector<double> neg_coef(negatives);
    std::vector<double> g_center(dim);

    std::uint64_t pair_idx = 0;
    const double lr_span = st.cfg.lr_end - st.cfg.lr_start;

    for (std::uint32_t epoch = 0; epoch < st.cfg.epochs; ++epoch) {
        double loss_sum = 0.0;
        std::uint64_t loss_pairs = 0;
        for (std::size_t s = worker; s < st.sentence_ids.size(); s += st.cfg.workers) {
            survivors.clear();
            for (const std::uint32_t id : st.sentence_ids[s]) {
                const double p = st.keep[id];
                if (p >= 1.0 || sched.next_double() < p) survivors.push_back(id);
            }
            const std::size_t n = survivors.size();
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t b = 1 + sched.next_below(st.cfg.window);
                const std::size_t lo = i > b ? i - b : 0;
                const std::size_t hi = std::min(n - 1, i + b);
                const std::uint32_t center = survivors[i];
                float* const in_c = st.input + static_cast<std::size_t>(center) * dim;

                for (std::size_t j = lo; j <= hi; ++j) {
                    if (j == i) continue;
                    const std::uint32_t context = survivors[j];
                    const double lr =
                        total_pairs > 1 ? st.cfg.lr_start
                                + lr_span * (static_cast<double>(pair_idx)
                                             / static_cast<double>(total_pairs - 1))
                                        : st.cfg.lr_start;
                    ++pair_idx;

                    // negative draws, bounded redraw on collision with the
                    // true context
                    std::size_t n_negs = 0;
                    for (std::uint32_t k = 0; k < negatives; ++k) {
                        std::uint32_t cand = st.table.sample(neg_rng.next_double());
                        int redraws = 0;
                        while (cand == context && redraws < 10) {
                            cand = st.table.sample(neg_rng.next_double());
                            ++redraws;
                        }
                        if (cand == context) continue; // skip this negative
                        neg_ids[n_negs++] = cand;
                    }

                    float* const out_x = st.output + static_cast<std::size_t>(context) * dim;

                    // all dot products use pre-update values
                    double f_pos = 0.0;
                    for (std::uint32_t c = 0; c < dim; ++c)
                        f_pos += static_cast<double>(in_c[c]) * static_cast<double>(out_x[c]);
                    const double sig_pos = sigmoid_clamped(f_pos);
                    const double coef_pos = sig_pos - 1.0;

                    for (std::uint32_t c = 0; c < dim; ++c)
                        g_center[c] = coef_pos * static_cast<double>(out_x[c]);

                    double loss = want_loss ? -std::log(sig_pos) : 0.0;
                    for (std::size_t k = 0; k < n_negs; ++k) {
                        const float* const out_n =
                            st.output + static_cast<std::size_t>(neg_ids[k]) * dim;
                        double f_neg = 0.0;
                        for (std::uint32_t c = 0; c < dim; ++c)
                            f_neg += static_cast<double>(in_c[c]) * static_cast<double>(out_n[c]);
                        const double coef = sigmoid_clamped(f_neg);
                        neg_coef[k] = coef;
                        for (std::uint32_t c = 0; c < dim; ++c)
                            g_center[c] += coef * static_cast<double>(out_n[c]);
                        if (want_loss) loss -= std::log(sigmoid_clamped(-f_neg));
                    }

                    // SGD step; the center row is written last so every
                    // output update sees the pre-step center values
                    for (std::size_t k = 0; k < n_negs; ++k) {
                        float* const out_n = st.output + static_cast<std::size_t>(neg_ids[k]) * dim;
                        const double step = lr * neg_coef[k];
                        for (std::uint32_t c = 0; c < dim; ++c)
                            out_n[c] = static_cast<float>(out_n[c] - step * static_cast<double>(in_c[c]));
                    }
                    const double step_pos = lr * coef_pos;
                    for (std::uint32_t c = 0; c < dim; ++c)
                        out_x[c] = static_cast<float>(out_x[c] - step_pos * static_cast<double>(in_c[c]));
                    for (std::uint32_t c = 0; c < dim; ++c)
                        in_c[c] = static_cast<float>(in_c[c] - lr * g_center[c]);

                    if (want_loss) {
                        loss_sum += loss;
                        ++loss_pairs;
                    }
                }
            }
        }
        result.epoch_loss_sum.push_back(loss_sum);
        result.epoch_pairs.push_back(loss_pairs);
    }
}

} // namespace

EmbeddingModel train(std::span<const Sentence> sentences, const Vocabulary& v,
                     const TrainConfig& cfg, std::int32_t period, TrainStats* stats) {
    if (cfg.dim < 1 || cfg.window < 1 || cfg.negatives < 1)
        throw ConfigError("dim, window and negatives must each be >= 1");
    if (!(cfg.lr_start > cfg.lr_end && cfg.lr_end > 0.0))
        throw ConfigError("learning rates must satisfy lr_start > lr_end > 0");
    if (cfg.subsample_t <= 0.0) throw ConfigError("subsample_t must be > 0");
    if (cfg.workers < 1) throw ConfigError("workers must be >= 1");
    if (sentences.empty()) throw EmptyCorpus();

    EmbeddingModel model;
    model.period = period;
    model.frame_period = period;
    model.dim = cfg.dim;
    model.vocab = v;
    const std::size_t cells = v.size() * static_cast<std::size_t>(cfg.dim);
    model.input_vectors.resize(cells);
    model.output_vectors.assign(cells, 0.0f);

    Rng init_rng(mix_seed(cfg.seed, 0));
    for (std::size_t i = 0; i < cells; ++i)
        model.input_vectors[i] =
            static_cast<float>((init_rng.next_double() - 0.5) / static_cast<double>(cfg.dim));

    if (cfg.epochs == 0) {
        if (stats) *stats = {};
        return model;
    }

    // In-vocabulary token ids per sentence; out-of-vocabulary tokens are
    // skipped before subsampling.
    std::vector<std::vector<std::uint32_t>> sentence_ids(sentences.size());
    for (std::size_t s = 0; s < sentences.size(); ++s) {
        auto& ids = sentence_ids[s];
        ids.reserve(sentences[s].tokens.size());
        for (const auto& tok : sentences[s].tokens)
            if (const auto id = v.id_of(tok.surface)) ids.push_back(*id);
    }

    std::vector<double> keep(v.size());
    for (std::uint32_t id = 0; id < v.size(); ++id)
        keep[id] = keep_probability(id, v, cfg.subsample_t);

    const NegativeTable table = NegativeTable::build(v);

    SharedState st{sentence_ids, keep,  table,
                   cfg,          model.input_vectors.data(), model.output_vectors.data()};

    std::vector<WorkerResult> results(cfg.workers);
    for (std::uint32_t w = 0; w < cfg.workers; ++w)
        results[w].scheduled_pairs = count_pairs(st, w);

    const bool want_loss = stats != nullptr;
    if (cfg.workers == 1) {
        train_worker(st, 0, results[0], want_loss);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(cfg.workers);
        for (std::uint32_t w = 0; w < cfg.workers; ++w)
            threads.emplace_back(
                [&st, w, &results, want_loss] { train_worker(st, w, results[w], want_loss); });
        for (auto& t : threads) t.join();
    }

    if (stats) {
        stats->scheduled_pairs = 0;
        stats->epoch_mean_loss.assign(cfg.epochs, 0.0);
        std::vector<std::uint64_t> epoch_pairs(cfg.epochs, 0);
        for (const auto& r : results) {
            stats->scheduled_pairs += r.scheduled_pairs;
            for (std::uint32_t e = 0; e < cfg.epochs; ++e) {
                stats->epoch_mean_loss[e] += r.epoch_loss_sum[e];
                epoch_pairs[e] += r.epoch_pairs[e];
            }
        }
        for (std::uint32_t e = 0; e < cfg.epochs; ++e)
            if (epoch_pairs[e] > 0) stats->epoch_mean_loss[e] /= static_cast<double>(epoch_pairs[e]);
    }
    return model;
}

} // namespace citemb
