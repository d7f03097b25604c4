#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "citemb/citation_id.hpp"
#include "citemb/corpus.hpp"

namespace citemb {

enum class TokenKind : std::uint8_t { Word = 0, Citation = 1 };

struct Token {
    TokenKind kind = TokenKind::Word;
    std::string surface; // Word: normalized token; Citation: "CITE:<kind>:<value>"

    bool operator==(const Token&) const = default;
};

// One citing sentence: >= 2 tokens, at least one of them a citation.
struct Sentence {
    CitationId doc_id;
    int pub_year = 0;
    std::vector<Token> tokens;
};

// Multi-word phrases (2..6 words each) merged into single tokens during
// normalization, like a user-supplied subject-heading dictionary.
class PhraseDict {
public:
    PhraseDict() = default;

    static PhraseDict from_phrases(const std::vector<std::string>& phrases);

    // One phrase per line, '#' comments, UTF-8. Lines that do not contain
    // 2..6 words are skipped.
    static PhraseDict load(std::istream& in);
    static PhraseDict load_file(const std::string& path);

    bool empty() const { return by_first_word_.empty(); }
    std::size_t size() const { return size_; }

    // Longest phrase starting at words[pos]; 0 when none matches.
    std::size_t match_length(const std::vector<std::string>& words, std::size_t pos) const;

private:
    // first word -> candidate tails sorted longest first
    std::map<std::string, std::vector<std::vector<std::string>>> by_first_word_;
    std::size_t size_ = 0;
};

std::vector<std::string> default_abbreviations();

// Normalization pipeline switches. Steps run in a fixed order:
// placeholder protection, URL replacement, dash removal, number replacement,
// tokenization, capitalization, phrase merging.
struct NormConfig {
    bool url_replace = true;
    bool dash_removal = true;
    bool number_replace = true;
    bool lowercase = true;
    bool preserve_acronyms = false; // needs an AcronymSet from a corpus pre-scan
    bool phrase_merge = true;
    std::vector<std::string> abbreviations = default_abbreviations();
};

// All-caps tokens (length >= 2) seen at least twice in a corpus pre-scan;
// kept uppercase when NormConfig::preserve_acronyms is on.
using AcronymSet = std::unordered_set<std::string>;

// Rule-based sentence splitting on . ! ? followed by whitespace and an
// uppercase letter or digit, guarded by the abbreviation stop-list. Never
// splits inside a citation placeholder.
std::vector<std::string> segment(const std::string& text, const NormConfig& rules);

std::vector<Token> normalize(const std::string& raw, const PhraseDict& dict,
                             const NormConfig& rules, const AcronymSet* acronyms = nullptr);

std::vector<Sentence> run_preprocess(const std::vector<CitingSpan>& spans, const PhraseDict& dict,
                                     const NormConfig& rules, const AcronymSet* acronyms = nullptr);

// Corpus pre-scan for acronym-preserving capitalization.
AcronymSet collect_acronyms(const std::vector<CitingSpan>& spans, const NormConfig& rules);

// Canonical training line format: tokens space-separated, one sentence per
// line; citation tokens appear literally ("CITE:pmid:17081983").
void write_sentences(std::ostream& out, const std::vector<Sentence>& sentences);

// Reads the line format back. Provenance is not stored in the file, so the
// given doc id and year are attached to every sentence.
std::vector<Sentence> read_sentences(std::istream& in, const CitationId& doc_id, int pub_year);

// Abbreviation list file: one entry per line, '#' comments.
std::vector<std::string> load_abbreviations(const std::string& path);

} // namespace citemb
