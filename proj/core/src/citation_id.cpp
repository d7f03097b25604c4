#include "citemb/citation_id.hpp"

#include <cctype>

namespace citemb {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

bool valid_meta_value(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
        if (!ok) return false;
    }
    return true;
}

} // namespace

std::string_view id_kind_name(IdKind kind) {
    switch (kind) {
    case IdKind::Pmid: return "pmid";
    case IdKind::Pmcid: return "pmcid";
    case IdKind::MetaKey: return "meta";
    }
    return "pmid";
}

std::string CitationId::to_string() const {
    std::string out(id_kind_name(kind));
    out += ':';
    out += value;
    return out;
}

std::string CitationId::token_surface() const {
    return "CITE:" + to_string();
}

std::optional<CitationId> CitationId::parse(std::string_view text) {
    if (all_digits(text)) return CitationId{IdKind::Pmid, std::string(text)};
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) return std::nullopt;
    const std::string_view kind = text.substr(0, colon);
    const std::string_view value = text.substr(colon + 1);
    if (kind == "pmid" && all_digits(value)) return CitationId{IdKind::Pmid, std::string(value)};
    if (kind == "pmcid" && all_digits(value)) return CitationId{IdKind::Pmcid, std::string(value)};
    if (kind == "meta" && valid_meta_value(value))
        return CitationId{IdKind::MetaKey, std::string(value)};
    return std::nullopt;
}

std::optional<CitationId> CitationId::parse_token_surface(std::string_view surface) {
    constexpr std::string_view prefix = "CITE:";
    if (surface.substr(0, prefix.size()) != prefix) return std::nullopt;
    return parse(surface.substr(prefix.size()));
}

} // namespace citemb
