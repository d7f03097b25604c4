#include "citemb/vocab.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "citemb/errors.hpp"

namespace citemb {

Vocabulary Vocabulary::build(std::span<const Sentence> sentences, std::uint64_t min_count_word,
                             std::uint64_t min_count_citation) {
    // std::map keys give the lexicographic tie-break for free after the
    // stable sort by count below.
    std::map<std::string, VocabEntry> counts;
    for (const auto& sentence : sentences) {
        for (const auto& token : sentence.tokens) {
            auto [it, inserted] = counts.try_emplace(token.surface);
            if (inserted) {
                it->second.surface = token.surface;
                it->second.kind = token.kind;
            }
            ++it->second.count;
        }
    }

    Vocabulary v;
    for (auto& [surface, entry] : counts) {
        const std::uint64_t threshold =
            entry.kind == TokenKind::Citation ? min_count_citation : min_count_word;
        if (entry.count >= threshold) v.entries_.push_back(std::move(entry));
    }
    if (v.entries_.empty()) throw EmptyVocabulary();

    std::stable_sort(v.entries_.begin(), v.entries_.end(),
                     [](const VocabEntry& a, const VocabEntry& b) { return a.count > b.count; });
    v.rebuild_index();
    return v;
}

Vocabulary Vocabulary::from_entries(std::vector<VocabEntry> entries) {
    Vocabulary v;
    v.entries_ = std::move(entries);
    v.rebuild_index();
    return v;
}

void Vocabulary::rebuild_index() {
    index_.clear();
    index_.reserve(entries_.size());
    total_tokens_ = 0;
    for (std::uint32_t id = 0; id < entries_.size(); ++id) {
        index_.emplace(entries_[id].surface, id);
        total_tokens_ += entries_[id].count;
    }
}

std::optional<std::uint32_t> Vocabulary::id_of(std::string_view surface) const {
    const auto it = index_.find(std::string(surface));
    return it == index_.end() ? std::nullopt : std::optional<std::uint32_t>(it->second);
}

double keep_probability(std::uint32_t id, const Vocabulary& v, double t) {
    const VocabEntry& e = v.entry(id);
    if (e.kind == TokenKind::Citation) return 1.0;
    const double f = static_cast<double>(e.count) / static_cast<double>(v.total_tokens());
    const double ratio = t / f;
    return std::min(1.0, std::sqrt(ratio) + ratio);
}

NegativeTable NegativeTable::build(const Vocabulary& v) {
    double total = 0.0;
    for (const auto& e : v.entries())
        if (e.kind == TokenKind::Word) total += std::pow(static_cast<double>(e.count), 0.75);
    if (total <= 0.0) throw NoNegativePool();

    NegativeTable table;
    table.cumulative_.resize(v.size());
    double acc = 0.0;
    std::uint32_t last_word = 0;
    for (std::uint32_t id = 0; id < v.size(); ++id) {
        const auto& e = v.entry(id);
        if (e.kind == TokenKind::Word) {
            acc += std::pow(static_cast<double>(e.count), 0.75) / total;
            last_word = id;
        }
        table.cumulative_[id] = acc;
    }
    // Rounding slack goes to the last word id so a draw can never land on a
    // trailing citation id.
    for (std::uint32_t id = last_word; id < v.size(); ++id) table.cumulative_[id] = 1.0;
    return table;
}

std::uint32_t NegativeTable::sample(double u) const {
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const auto idx = it == cumulative_.end() ? cumulative_.size() - 1
                                             : static_cast<std::size_t>(it - cumulative_.begin());
    return static_cast<std::uint32_t>(idx);
}

} // namespace citemb
