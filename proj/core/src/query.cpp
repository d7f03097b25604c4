#include "citemb/query.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "citemb/errors.hpp"

namespace citemb {

namespace {

double row_norm(std::span<const float> v) {
    double s = 0.0;
    for (const float x : v) s += static_cast<double>(x) * static_cast<double>(x);
    return std::sqrt(s);
}

std::string render_sim(double sim) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.2f", sim);
    return buf;
}

// Citation neighbors print as the bare id ("pmid:20068231"), words as-is.
std::string render_neighbor(const Neighbor& n) {
    std::string label = n.surface;
    if (n.kind == TokenKind::Citation) {
        if (const auto cid = CitationId::parse_token_surface(n.surface))
            label = cid->to_string();
    }
    return label + "(" + render_sim(n.similarity) + ")";
}

} // namespace

std::vector<Neighbor> nearest(const EmbeddingModel& model, const std::string& token,
                              std::size_t k, std::optional<TokenKind> kind_filter) {
    const auto query_id = model.vocab.id_of(token);
    if (!query_id) throw UnknownToken(token);

    const auto query_row = model.input_row(*query_id);
    const double query_norm = row_norm(query_row);

    std::vector<Neighbor> candidates;
    candidates.reserve(model.vocab.size());
    for (std::uint32_t id = 0; id < model.vocab.size(); ++id) {
        if (id == *query_id) continue;
        const VocabEntry& e = model.vocab.entry(id);
        if (kind_filter && e.kind != *kind_filter) continue;
        const auto row = model.input_row(id);
        const double n = row_norm(row);
        double sim = 0.0;
        if (query_norm > 0.0 && n > 0.0) {
            double dot = 0.0;
            for (std::size_t c = 0; c < row.size(); ++c)
                dot += static_cast<double>(query_row[c]) * static_cast<double>(row[c]);
            sim = dot / (query_norm * n);
        }
        candidates.push_back({e.surface, e.kind, sim});
    }

    std::sort(candidates.begin(), candidates.end(), [](const Neighbor& a, const Neighbor& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.surface < b.surface;
    });
    if (candidates.size() > k) candidates.resize(k);
    return candidates;
}

RoleReport role_report(const AlignedSeries& series, std::span<const ChangeRecord> records,
                       const CitationId& p, std::int32_t from, std::int32_t to,
                       std::size_t n_words) {
    RoleReport report;
    report.publication = p;
    const std::string surface = p.token_surface();

    for (std::int32_t year = from; year <= to; ++year) {
        RoleReportRow row;
        row.year = year;
        const EmbeddingModel* model = series.model_for(year);
        if (model && model->vocab.id_of(surface)) {
            row.present = true;
            for (const auto& r : records)
                if (r.publication == p && r.year == year) {
                    row.score = r.score;
                    break;
                }
            auto citations = nearest(*model, surface, 1, TokenKind::Citation);
            if (!citations.empty()) row.top_citation = std::move(citations.front());
            row.top_words = nearest(*model, surface, n_words, TokenKind::Word);
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

void write_report_tsv(std::ostream& out, const RoleReport& report) {
    for (const auto& row : report.rows) {
        if (!row.present) {
            out << row.year << "\tabsent\n";
            continue;
        }
        out << row.year << '\t' << (row.score ? format_g6(*row.score) : "NA") << '\t';
        if (row.top_citation) out << render_neighbor(*row.top_citation);
        out << '\t';
        for (std::size_t i = 0; i < row.top_words.size(); ++i) {
            if (i) out << ' ';
            out << render_neighbor(row.top_words[i]);
        }
        out << '\n';
    }
}

} // namespace citemb
