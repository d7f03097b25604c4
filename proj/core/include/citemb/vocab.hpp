#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "citemb/preprocess.hpp"

namespace citemb {

struct VocabEntry {
    std::string surface;
    TokenKind kind = TokenKind::Word;
    std::uint64_t count = 0;

    bool operator==(const VocabEntry&) const = default;
};

// Joint word/citation vocabulary. Ids are dense 0..|V|-1 assigned by
// descending count, ties broken lexicographically by surface.
class Vocabulary {
public:
    Vocabulary() = default;

    // One counting pass; tokens below their kind's threshold are dropped.
    // Throws EmptyVocabulary when nothing survives.
    static Vocabulary build(std::span<const Sentence> sentences, std::uint64_t min_count_word,
                            std::uint64_t min_count_citation);

    // Adopts entries in the given order (ids = positions). Used by model io,
    // where the file records the canonical order.
    static Vocabulary from_entries(std::vector<VocabEntry> entries);

    std::size_t size() const { return entries_.size(); }
    const VocabEntry& entry(std::uint32_t id) const { return entries_[id]; }
    const std::vector<VocabEntry>& entries() const { return entries_; }
    std::uint64_t total_tokens() const { return total_tokens_; }

    std::optional<std::uint32_t> id_of(std::string_view surface) const;

private:
    std::vector<VocabEntry> entries_;
    std::unordered_map<std::string, std::uint32_t> index_;
    std::uint64_t total_tokens_ = 0;

    void rebuild_index();
};

// Subsampling keep probability min(1, sqrt(t/f) + t/f) with f the corpus
// frequency of the token. Citation tokens are never subsampled.
double keep_probability(std::uint32_t id, const Vocabulary& v, double t);

// Inverse-CDF sampler over word ids with mass proportional to count^0.75.
// Citations carry zero mass and are never drawn.
class NegativeTable {
public:
    static NegativeTable build(const Vocabulary& v); // throws NoNegativePool

    // u in [0,1) -> vocabulary id.
    std::uint32_t sample(double u) const;

    const std::vector<double>& cumulative() const { return cumulative_; }

private:
    std::vector<double> cumulative_;
};

} // namespace citemb
