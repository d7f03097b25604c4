#include "citemb/change.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "citemb/errors.hpp"

namespace citemb {

std::string format_g6(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

namespace {

double norm_of(std::span<const float> v) {
    double s = 0.0;
    for (const float x : v) s += static_cast<double>(x) * static_cast<double>(x);
    return std::sqrt(s);
}

std::optional<double> cosine(std::span<const float> a, std::span<const float> b) {
    const double na = norm_of(a);
    const double nb = norm_of(b);
    if (na == 0.0 || nb == 0.0) return std::nullopt;
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        dot += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return dot / (na * nb);
}

} // namespace

std::optional<double> change_score(const AlignedSeries& series, const CitationId& p,
                                   std::int32_t t) {
    const EmbeddingModel* cur = series.model_for(t);
    const EmbeddingModel* prev = series.model_for(t - 1);
    if (!cur || !prev) return std::nullopt;
    const std::string surface = p.token_surface();
    const auto id_cur = cur->vocab.id_of(surface);
    const auto id_prev = prev->vocab.id_of(surface);
    if (!id_cur || !id_prev) return std::nullopt;
    const auto cos = cosine(cur->input_row(*id_cur), prev->input_row(*id_prev));
    if (!cos) return std::nullopt;
    return std::clamp(1.0 - *cos, 0.0, 2.0);
}

std::vector<ChangeRecord> compute_change_records(const AlignedSeries& series,
                                                 const ScoreOptions& opts) {
    std::vector<ChangeRecord> records;
    for (std::size_t i = 1; i < series.periods.size(); ++i) {
        if (series.periods[i] != series.periods[i - 1] + 1) continue;
        const EmbeddingModel& cur = series.models[i];
        const EmbeddingModel& prev = series.models[i - 1];
        std::vector<std::pair<CitationId, std::pair<std::uint64_t, std::uint64_t>>> found;
        for (std::uint32_t id = 0; id < cur.vocab.size(); ++id) {
            const VocabEntry& e = cur.vocab.entry(id);
            if (e.kind != TokenKind::Citation) continue;
            const auto prev_id = prev.vocab.id_of(e.surface);
            if (!prev_id) continue;
            const auto cid = CitationId::parse_token_surface(e.surface);
            if (!cid) continue;
            std::uint64_t count_t = e.count;
            if (opts.cumulative_citations) {
                for (std::size_t j = 0; j + 1 <= i; ++j)
                    if (const auto past = series.models[j].vocab.id_of(e.surface))
                        count_t += series.models[j].vocab.entry(*past).count;
            }
            found.push_back({*cid, {count_t, prev.vocab.entry(*prev_id).count}});
        }
        std::sort(found.begin(), found.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [cid, counts] : found) {
            const auto score = change_score(series, cid, series.periods[i]);
            if (!score) continue;
            records.push_back({cid, series.periods[i], *score, counts.first, counts.second});
        }
    }
    return records;
}

std::vector<GroupStat> yearly_stats(std::span<const ChangeRecord> records,
                                    std::span<const std::uint64_t> thresholds, bool strict) {
    std::map<std::int32_t, std::vector<const ChangeRecord*>> by_year;
    for (const auto& r : records) by_year[r.year].push_back(&r);

    std::vector<GroupStat> stats;
    for (const auto& [year, rows] : by_year) {
        for (const std::uint64_t threshold : thresholds) {
            GroupStat cell;
            cell.year = year;
            cell.threshold = threshold;
            double sum = 0.0;
            for (const ChangeRecord* r : rows) {
                const bool in = strict ? r->citations_t > threshold : r->citations_t >= threshold;
                if (!in) continue;
                sum += r->score;
                ++cell.n;
            }
            if (cell.n >= 1) {
                cell.mean = sum / static_cast<double>(cell.n);
                if (cell.n >= 2) {
                    double ss = 0.0;
                    for (const ChangeRecord* r : rows) {
                        const bool in =
                            strict ? r->citations_t > threshold : r->citations_t >= threshold;
                        if (!in) continue;
                        const double d = r->score - cell.mean;
                        ss += d * d;
                    }
                    cell.sd = std::sqrt(ss / static_cast<double>(cell.n - 1));
                }
            }
            stats.push_back(cell);
        }
    }
    return stats;
}

std::vector<RankEntry> rank_by_avg(std::span<const ChangeRecord> records, std::int32_t from,
                                   std::int32_t to, std::uint32_t min_years, std::size_t k) {
    std::map<CitationId, std::pair<double, std::uint32_t>> sums;
    for (const auto& r : records) {
        if (r.year < from || r.year > to) continue;
        auto& [sum, n] = sums[r.publication];
        sum += r.score;
        ++n;
    }
    std::vector<RankEntry> entries;
    for (const auto& [pub, acc] : sums) {
        if (acc.second < min_years) continue;
        entries.push_back({pub, acc.first / acc.second, acc.second});
    }
    std::sort(entries.begin(), entries.end(), [](const RankEntry& a, const RankEntry& b) {
        if (a.avg_score != b.avg_score) return a.avg_score > b.avg_score;
        return a.publication.to_string() < b.publication.to_string();
    });
    if (entries.size() > k) entries.resize(k);
    return entries;
}

std::vector<std::pair<double, std::uint64_t>> histogram(std::span<const ChangeRecord> records,
                                                        double bin_width) {
    if (bin_width <= 0.0) throw ConfigError("histogram bin width must be > 0");
    std::map<std::uint64_t, std::uint64_t> bins;
    for (const auto& r : records)
        ++bins[static_cast<std::uint64_t>(std::floor(r.score / bin_width))];
    std::vector<std::pair<double, std::uint64_t>> out;
    out.reserve(bins.size());
    for (const auto& [idx, count] : bins)
        out.emplace_back(static_cast<double>(idx) * bin_width, count);
    return out;
}

void write_scores_csv(std::ostream& out, std::span<const ChangeRecord> records) {
    out << "publication,year,score,citations_t,citations_prev\n";
    for (const auto& r : records)
        out << r.publication.to_string() << ',' << r.year << ',' << format_g6(r.score) << ','
            << r.citations_t << ',' << r.citations_prev << '\n';
}

std::vector<ChangeRecord> read_scores_csv(std::istream& in) {
    std::vector<ChangeRecord> records;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("publication,", 0) == 0) continue;
        }
        std::istringstream row(line);
        std::string pub, year, score, ct, cp;
        if (!std::getline(row, pub, ',') || !std::getline(row, year, ',')
            || !std::getline(row, score, ',') || !std::getline(row, ct, ',')
            || !std::getline(row, cp))
            throw Error("bad scores row: " + line);
        const auto cid = CitationId::parse(pub);
        if (!cid) throw Error("bad publication id in scores: " + pub);
        records.push_back({*cid, std::stoi(year), std::stod(score),
                           static_cast<std::uint64_t>(std::stoull(ct)),
                           static_cast<std::uint64_t>(std::stoull(cp))});
    }
    return records;
}

void write_stats_csv(std::ostream& out, std::span<const GroupStat> stats) {
    out << "year,threshold,mean,sd,n\n";
    for (const auto& s : stats) {
        out << s.year << ',' << s.threshold << ',';
        if (s.n >= 1) out << format_g6(s.mean);
        out << ',';
        if (s.n >= 1) out << format_g6(s.sd);
        out << ',' << s.n << '\n';
    }
}

void write_rank_csv(std::ostream& out, std::span<const RankEntry> entries) {
    out << "rank,publication,avg_score,years_present\n";
    for (std::size_t i = 0; i < entries.size(); ++i)
        out << i + 1 << ',' << entries[i].publication.to_string() << ','
            << format_g6(entries[i].avg_score) << ',' << entries[i].years_present << '\n';
}

void write_histogram_csv(std::ostream& out,
                         std::span<const std::pair<double, std::uint64_t>> bins) {
    out << "bin_lo,count\n";
    for (const auto& [lo, count] : bins) out << format_g6(lo) << ',' << count << '\n';
}

} // namespace citemb
