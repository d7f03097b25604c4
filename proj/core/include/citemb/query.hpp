#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "citemb/change.hpp"

namespace citemb {

struct Neighbor {
    std::string surface;
    TokenKind kind = TokenKind::Word;
    double similarity = 0.0;
};

// Exhaustive cosine scan over all rows; the query token itself is excluded.
// Results sorted by similarity descending, ties by surface ascending.
// Throws UnknownToken when the token is not in the model's vocabulary.
std::vector<Neighbor> nearest(const EmbeddingModel& model, const std::string& token,
                              std::size_t k, std::optional<TokenKind> kind_filter = std::nullopt);

struct RoleReportRow {
    std::int32_t year = 0;
    bool present = false;               // token in this period's vocabulary
    std::optional<double> score;        // change score, when defined
    std::optional<Neighbor> top_citation;
    std::vector<Neighbor> top_words;
};

struct RoleReport {
    CitationId publication;
    std::vector<RoleReportRow> rows;
};

// Per-year change score, most similar publication and most similar words for
// one cited publication. Years where it is absent yield explicit absent rows.
RoleReport role_report(const AlignedSeries& series, std::span<const ChangeRecord> records,
                       const CitationId& p, std::int32_t from, std::int32_t to,
                       std::size_t n_words);

// Tab-separated: year, score, top_citation(sim), then the words "w(sim)"
// space-separated in the final field; similarities with 2 decimals. Absent
// years render as "year<TAB>absent"; an undefined score renders as NA.
void write_report_tsv(std::ostream& out, const RoleReport& report);

} // namespace citemb
