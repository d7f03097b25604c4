#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "citemb/align.hpp"

namespace citemb {

struct ChangeRecord {
    CitationId publication;
    std::int32_t year = 0; // score compares this year against year - 1
    double score = 0.0;    // in [0, 2]
    std::uint64_t citations_t = 0;
    std::uint64_t citations_prev = 0;
};

struct GroupStat {
    std::int32_t year = 0;
    std::uint64_t threshold = 0;
    double mean = 0.0; // meaningful only when n >= 1
    double sd = 0.0;   // sample SD (n-1); 0 when n == 1
    std::uint64_t n = 0;
};

// 1 - cosine of the aligned vectors of p at t and t-1. nullopt when p is
// absent from either period's vocabulary or either vector has zero norm.
// The result is clamped into [0, 2] against floating-point excess.
std::optional<double> change_score(const AlignedSeries& series, const CitationId& p,
                                   std::int32_t t);

struct ScoreOptions {
    // When set, citations_t accumulates in-text citation counts over all
    // periods up to t instead of the within-period count.
    bool cumulative_citations = false;
};

// All defined change scores of every citation token, for every consecutive
// period pair, ordered by year then publication.
std::vector<ChangeRecord> compute_change_records(const AlignedSeries& series,
                                                 const ScoreOptions& opts = {});

// Per (year, threshold) cell: records with citations_t > threshold (strict
// by default), mean and sample SD. Cells are emitted even when empty.
std::vector<GroupStat> yearly_stats(std::span<const ChangeRecord> records,
                                    std::span<const std::uint64_t> thresholds,
                                    bool strict = true);

struct RankEntry {
    CitationId publication;
    double avg_score = 0.0;
    std::uint32_t years_present = 0;
};

// Top-k publications by average score over [from, to], requiring at least
// min_years defined scores; descending, ties by publication text ascending.
std::vector<RankEntry> rank_by_avg(std::span<const ChangeRecord> records, std::int32_t from,
                                   std::int32_t to, std::uint32_t min_years, std::size_t k);

// Non-empty half-open bins [lo, lo + width) starting from 0.
std::vector<std::pair<double, std::uint64_t>> histogram(std::span<const ChangeRecord> records,
                                                        double bin_width);

// CSV emitters; floats printed with 6 significant digits.
void write_scores_csv(std::ostream& out, std::span<const ChangeRecord> records);
std::vector<ChangeRecord> read_scores_csv(std::istream& in);
void write_stats_csv(std::ostream& out, std::span<const GroupStat> stats);
void write_rank_csv(std::ostream& out, std::span<const RankEntry> entries);
void write_histogram_csv(std::ostream& out,
                         std::span<const std::pair<double, std::uint64_t>> bins);

// 6-significant-digit float rendering shared by the report writers.
std::string format_g6(double x);

} // namespace citemb
