#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "citemb/citation_id.hpp"

namespace citemb {

// Reference-list entry of a cited publication. Empty strings mean "absent";
// year 0 means "absent".
struct RefMetadata {
    std::string first_author_given;
    std::string first_author_surname;
    std::string venue;
    int year = 0;
    std::string volume;
    std::string first_page;
    std::string pmid;  // bare digits when present
    std::string pmcid; // bare digits, no "PMC" prefix
};

// One body paragraph, split into literal text runs and citation markers
// (the marker payload is the xref's ref-label).
struct ParagraphPiece {
    bool is_marker = false;
    std::string payload;
};

struct Paragraph {
    std::vector<ParagraphPiece> pieces;

    std::size_t marker_count() const;
};

struct RawDocument {
    CitationId doc_id;
    int pub_year = 0;
    std::vector<Paragraph> paragraphs;
    std::map<std::string, RefMetadata> references;

    std::size_t marker_count() const;

    // Ref-labels referenced by markers but absent from the reference list.
    std::vector<std::string> dangling_rids() const;
};

// Paragraph text in which each resolvable citation has been replaced by a
// placeholder of the form U+27E6 "CITE:<kind>:<value>" U+27E7.
struct CitingSpan {
    CitationId doc_id;
    int pub_year = 0;
    std::string text;
};

inline constexpr std::string_view kPlaceholderOpen = "⟦";  // ⟦
inline constexpr std::string_view kPlaceholderClose = "⟧"; // ⟧

std::string make_placeholder(const CitationId& id);

// Lowercases, folds Latin diacritics to ASCII, and drops everything that is
// not [a-z0-9]. Returns "" when nothing survives.
std::string normalize_meta_component(std::string_view raw);

// fa_ve_yr_vo_fp constructed key; nullopt when any component normalizes to
// empty (the reference is then unidentifiable).
std::optional<std::string> build_meta_key(const RefMetadata& m);

// Pmid > Pmcid > MetaKey precedence; nullopt when none is available.
std::optional<CitationId> resolve_identifier(const RefMetadata& m);

// Parses one JATS-like document. Throws MalformedXml, MissingBody,
// MissingDocId or MissingPubYear; each aborts this document only.
RawDocument parse_document(std::string_view xml_bytes);

// Every paragraph with at least one resolvable marker becomes a span;
// dangling/unidentifiable markers are deleted from the text.
std::vector<CitingSpan> extract_citing_spans(const RawDocument& doc);

// Span record file: doc_id \t pub_year \t text, one span per line.
void write_spans_tsv(std::ostream& out, const std::vector<CitingSpan>& spans);
std::vector<CitingSpan> read_spans_tsv(std::istream& in);

} // namespace citemb
