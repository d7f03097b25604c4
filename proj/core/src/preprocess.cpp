#include "citemb/preprocess.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "citemb/errors.hpp"

namespace citemb {

namespace {

bool is_ascii_alnum(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

bool iequal_char(char a, char b) {
    return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
}

// True when s ends with the abbreviation at a word boundary, ignoring case.
bool ends_with_abbreviation(std::string_view s, std::string_view abbr) {
    if (abbr.empty() || s.size() < abbr.size()) return false;
    const std::size_t off = s.size() - abbr.size();
    for (std::size_t i = 0; i < abbr.size(); ++i)
        if (!iequal_char(s[off + i], abbr[i])) return false;
    return off == 0 || !is_ascii_alnum(s[off - 1]);
}

constexpr std::string_view kOpenBytes = "⟦";
constexpr std::string_view kCloseBytes = "⟧";

bool at(std::string_view text, std::size_t i, std::string_view what) {
    return text.compare(i, what.size(), what) == 0;
}

} // namespace

std::vector<std::string> default_abbreviations() {
    return {"e.g.", "i.e.", "et al.", "Fig.", "vs.", "Dr.", "approx.", "ca.", "cf.", "Eq.", "No."};
}

std::vector<std::string> segment(const std::string& text, const NormConfig& rules) {
    std::vector<std::string> sentences;
    std::size_t start = 0;
    bool in_placeholder = false;
    std::size_t i = 0;
    while (i < text.size()) {
        if (at(text, i, kOpenBytes)) {
            in_placeholder = true;
            i += kOpenBytes.size();
            continue;
        }
        if (at(text, i, kCloseBytes)) {
            in_placeholder = false;
            i += kCloseBytes.size();
            continue;
        }
        const char c = text[i];
        if (!in_placeholder && (c == '.' || c == '!' || c == '?')) {
            std::size_t j = i + 1;
            while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
            const bool has_gap = j > i + 1;
            const bool upper_or_digit =
                j < text.size() && ((text[j] >= 'A' && text[j] <= 'Z') || std::isdigit(static_cast<unsigned char>(text[j])));
            if (has_gap && upper_or_digit) {
                const std::string_view candidate(text.data() + start, i + 1 - start);
                bool is_abbrev = false;
                if (c == '.') {
                    for (const auto& abbr : rules.abbreviations) {
                        if (ends_with_abbreviation(candidate, abbr)) {
                            is_abbrev = true;
                            break;
                        }
                    }
                }
                if (!is_abbrev) {
                    std::string sentence = trim(candidate);
                    if (!sentence.empty()) sentences.push_back(std::move(sentence));
                    start = j;
                    i = j;
                    continue;
                }
            }
        }
        ++i;
    }
    std::string tail = trim(std::string_view(text).substr(start));
    if (!tail.empty()) sentences.push_back(std::move(tail));
    return sentences;
}

namespace {

// ---- word-text processing (pipeline steps 2-6) ----

bool url_starts_at(const std::string& s, std::size_t i) {
    static constexpr std::string_view prefixes[] = {"http://", "https://", "www."};
    for (const auto p : prefixes) {
        if (s.size() - i < p.size()) continue;
        bool match = true;
        for (std::size_t k = 0; k < p.size(); ++k)
            if (!iequal_char(s[i + k], p[k])) {
                match = false;
                break;
            }
        if (match) return match;
    }
    return false;
}

std::string replace_urls(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const bool at_boundary = i == 0 || !is_ascii_alnum(s[i - 1]);
        if (at_boundary && url_starts_at(s, i)) {
            while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
            out += " xurlx ";
            continue;
        }
        out += s[i++];
    }
    return out;
}

bool is_word_byte(char c) {
    return is_ascii_alnum(c) || static_cast<unsigned char>(c) >= 0x80;
}

// Deleting the dash both joins in-word parts ("T-cell" -> "Tcell") and
// removes standalone dashes (surrounding whitespace separates tokens anyway).
std::string remove_dashes(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] == '-') {
            ++i;
            continue;
        }
        if (at(s, i, "–")) { // en-dash
            i += 3;
            continue;
        }
        out += s[i++];
    }
    return out;
}

std::string replace_numbers(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            const char prev = out.empty() ? ' ' : out.back();
            const bool standalone_left = !is_word_byte(prev) && prev != '.';
            std::size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            if (j < s.size() && s[j] == '.' && j + 1 < s.size()
                && std::isdigit(static_cast<unsigned char>(s[j + 1]))) {
                ++j;
                while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            }
            const char next = j < s.size() ? s[j] : ' ';
            const bool standalone_right = !is_word_byte(next) && next != '.';
            if (standalone_left && standalone_right) {
                out += "xnumx";
            } else {
                out.append(s, i, j - i);
            }
            i = j;
            continue;
        }
        out += s[i++];
    }
    return out;
}

// Codepoint classification for tokenization. ASCII: alnum only. Non-ASCII:
// letters count as word characters; typographic punctuation, general symbols
// and math operators separate tokens.
bool is_word_codepoint(std::uint32_t cp) {
    if (cp < 0x80)
        return (cp >= '0' && cp <= '9') || (cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z');
    if (cp == 0xD7 || cp == 0xF7) return false;          // multiply / divide signs
    if (cp >= 0xA0 && cp <= 0xBF) return false;          // Latin-1 punctuation block
    if (cp >= 0x2000 && cp <= 0x206F) return false;      // general punctuation
    if (cp >= 0x2190 && cp <= 0x2BFF) return false;      // arrows, math, misc symbols
    if (cp >= 0x3000 && cp <= 0x303F) return false;      // CJK punctuation
    return true;
}

std::uint32_t decode_utf8(std::string_view in, std::size_t& i) {
    const auto b0 = static_cast<unsigned char>(in[i]);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len;
    std::uint32_t cp;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return 0;
    }
    if (i + static_cast<std::size_t>(len) > in.size()) {
        ++i;
        return 0;
    }
    for (int k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(in[i + static_cast<std::size_t>(k)]);
        if ((b & 0xC0) != 0x80) {
            ++i;
            return 0;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    i += static_cast<std::size_t>(len);
    return cp;
}

std::vector<std::string> tokenize_words(const std::string& s) {
    std::vector<std::string> words;
    std::string cur;
    std::size_t i = 0;
    while (i < s.size()) {
        const std::size_t at_pos = i;
        const std::uint32_t cp = decode_utf8(s, i);
        if (cp != 0 && is_word_codepoint(cp)) {
            cur.append(s, at_pos, i - at_pos);
        } else if (!cur.empty()) {
            words.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) words.push_back(std::move(cur));
    return words;
}

bool is_all_caps(std::string_view token) {
    if (token.size() < 2) return false;
    bool has_letter = false;
    for (char c : token) {
        if (c >= 'A' && c <= 'Z') has_letter = true;
        else if (c < '0' || c > '9') return false;
    }
    return has_letter;
}

void apply_case(std::string& token, const NormConfig& rules, const AcronymSet* acronyms) {
    if (!rules.lowercase) return;
    if (rules.preserve_acronyms && acronyms && is_all_caps(token) && acronyms->count(token))
        return;
    for (char& c : token)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
}

std::vector<std::string> process_text_chunk(const std::string& chunk, const NormConfig& rules,
                                            const AcronymSet* acronyms) {
    std::string s = chunk;
    if (rules.url_replace) s = replace_urls(s);
    if (rules.dash_removal) s = remove_dashes(s);
    if (rules.number_replace) s = replace_numbers(s);
    std::vector<std::string> words = tokenize_words(s);
    for (auto& w : words) apply_case(w, rules, acronyms);
    return words;
}

} // namespace

PhraseDict PhraseDict::from_phrases(const std::vector<std::string>& phrases) {
    PhraseDict dict;
    for (const auto& phrase : phrases) {
        if (phrase.find(kOpenBytes) != std::string::npos) continue;
        std::istringstream words_in(ascii_lower(phrase));
        std::vector<std::string> words;
        std::string w;
        while (words_in >> w) words.push_back(w);
        if (words.size() < 2 || words.size() > 6) continue;
        auto& bucket = dict.by_first_word_[words.front()];
        if (std::find(bucket.begin(), bucket.end(), words) != bucket.end()) continue;
        bucket.push_back(std::move(words));
        ++dict.size_;
    }
    for (auto& [first, bucket] : dict.by_first_word_) {
        std::sort(bucket.begin(), bucket.end(), [](const auto& a, const auto& b) {
            if (a.size() != b.size()) return a.size() > b.size();
            return a < b;
        });
    }
    return dict;
}

PhraseDict PhraseDict::load(std::istream& in) {
    std::vector<std::string> phrases;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        phrases.push_back(t);
    }
    return from_phrases(phrases);
}

PhraseDict PhraseDict::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open phrase dictionary: " + path);
    return load(in);
}

std::size_t PhraseDict::match_length(const std::vector<std::string>& words, std::size_t pos) const {
    const auto it = by_first_word_.find(words[pos]);
    if (it == by_first_word_.end()) return 0;
    for (const auto& candidate : it->second) {
        if (pos + candidate.size() > words.size()) continue;
        bool match = true;
        for (std::size_t k = 1; k < candidate.size(); ++k)
            if (words[pos + k] != candidate[k]) {
                match = false;
                break;
            }
        if (match) return candidate.size();
    }
    return 0;
}

std::vector<Token> normalize(const std::string& raw, const PhraseDict& dict,
                             const NormConfig& rules, const AcronymSet* acronyms) {
    // Step 1: placeholder protection. Split into citation tokens and word
    // text; later steps never see placeholder bytes.
    std::vector<Token> stream;
    auto process_chunk = [&](const std::string& chunk) {
        for (auto& w : process_text_chunk(chunk, rules, acronyms))
            stream.push_back({TokenKind::Word, std::move(w)});
    };

    std::size_t i = 0;
    std::string chunk;
    while (i < raw.size()) {
        if (at(raw, i, kOpenBytes)) {
            const auto close = raw.find(kCloseBytes, i + kOpenBytes.size());
            if (close == std::string::npos) break; // unterminated placeholder: drop the rest
            const std::string surface =
                raw.substr(i + kOpenBytes.size(), close - i - kOpenBytes.size());
            process_chunk(chunk);
            chunk.clear();
            if (CitationId::parse_token_surface(surface))
                stream.push_back({TokenKind::Citation, surface});
            i = close + kCloseBytes.size();
            continue;
        }
        chunk += raw[i++];
    }
    process_chunk(chunk);

    if (!rules.phrase_merge || dict.empty()) return stream;

    // Step 7: greedy longest-match phrase merging within word runs.
    std::vector<Token> merged;
    merged.reserve(stream.size());
    std::size_t pos = 0;
    while (pos < stream.size()) {
        if (stream[pos].kind == TokenKind::Citation) {
            merged.push_back(std::move(stream[pos++]));
            continue;
        }
        std::size_t run_end = pos;
        while (run_end < stream.size() && stream[run_end].kind == TokenKind::Word) ++run_end;
        std::vector<std::string> words;
        words.reserve(run_end - pos);
        for (std::size_t k = pos; k < run_end; ++k) words.push_back(std::move(stream[k].surface));
        std::size_t w = 0;
        while (w < words.size()) {
            const std::size_t len = dict.match_length(words, w);
            if (len >= 2) {
                std::string joined = words[w];
                for (std::size_t k = 1; k < len; ++k) {
                    joined += '_';
                    joined += words[w + k];
                }
                merged.push_back({TokenKind::Word, std::move(joined)});
                w += len;
            } else {
                merged.push_back({TokenKind::Word, std::move(words[w])});
                ++w;
            }
        }
        pos = run_end;
    }
    return merged;
}

std::vector<Sentence> run_preprocess(const std::vector<CitingSpan>& spans, const PhraseDict& dict,
                                     const NormConfig& rules, const AcronymSet* acronyms) {
    std::vector<Sentence> out;
    for (const auto& span : spans) {
        for (const auto& raw : segment(span.text, rules)) {
            std::vector<Token> tokens = normalize(raw, dict, rules, acronyms);
            if (tokens.size() < 2) continue;
            const bool has_citation = std::any_of(tokens.begin(), tokens.end(), [](const Token& t) {
                return t.kind == TokenKind::Citation;
            });
            if (!has_citation) continue;
            out.push_back({span.doc_id, span.pub_year, std::move(tokens)});
        }
    }
    return out;
}

AcronymSet collect_acronyms(const std::vector<CitingSpan>& spans, const NormConfig& rules) {
    NormConfig scan_rules = rules;
    scan_rules.lowercase = false;
    scan_rules.phrase_merge = false;
    std::map<std::string, std::size_t> counts;
    PhraseDict empty_dict;
    for (const auto& span : spans)
        for (const auto& tok : normalize(span.text, empty_dict, scan_rules))
            if (tok.kind == TokenKind::Word && is_all_caps(tok.surface)) ++counts[tok.surface];
    AcronymSet set;
    for (const auto& [surface, n] : counts)
        if (n >= 2) set.insert(surface);
    return set;
}

void write_sentences(std::ostream& out, const std::vector<Sentence>& sentences) {
    for (const auto& s : sentences) {
        for (std::size_t i = 0; i < s.tokens.size(); ++i) {
            if (i) out << ' ';
            out << s.tokens[i].surface;
        }
        out << '\n';
    }
}

std::vector<Sentence> read_sentences(std::istream& in, const CitationId& doc_id, int pub_year) {
    std::vector<Sentence> sentences;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream tokens_in(line);
        Sentence s;
        s.doc_id = doc_id;
        s.pub_year = pub_year;
        std::string surface;
        bool has_citation = false;
        while (tokens_in >> surface) {
            if (CitationId::parse_token_surface(surface)) {
                s.tokens.push_back({TokenKind::Citation, surface});
                has_citation = true;
            } else {
                s.tokens.push_back({TokenKind::Word, surface});
            }
        }
        if (s.tokens.size() >= 2 && has_citation) sentences.push_back(std::move(s));
    }
    return sentences;
}

std::vector<std::string> load_abbreviations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open abbreviation list: " + path);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        out.push_back(t);
    }
    return out;
}

} // namespace citemb
