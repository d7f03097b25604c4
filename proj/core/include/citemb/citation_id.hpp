#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace citemb {

enum class IdKind { Pmid, Pmcid, MetaKey };

std::string_view id_kind_name(IdKind kind); // "pmid" | "pmcid" | "meta"

// Canonical identifier of a publication. Pmid/Pmcid values are bare digit
// strings (no "PMC" prefix); MetaKey values are the fa_ve_yr_vo_fp form
// produced by build_meta_key.
struct CitationId {
    IdKind kind = IdKind::Pmid;
    std::string value;

    bool operator==(const CitationId&) const = default;
    auto operator<=>(const CitationId&) const = default;

    // "pmid:17081983", "pmcid:123456", "meta:janedoe_cell_2006_127_635"
    std::string to_string() const;

    // Vocabulary surface of the citation token: "CITE:" + to_string().
    std::string token_surface() const;

    // Accepts the to_string() form; also bare digits, taken as a pmid.
    static std::optional<CitationId> parse(std::string_view text);

    // Parses a token surface ("CITE:pmid:17081983").
    static std::optional<CitationId> parse_token_surface(std::string_view surface);
};

} // namespace citemb
