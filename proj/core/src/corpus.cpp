#include "citemb/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>
#include <set>

#include "citemb/errors.hpp"
#include "citemb/xml.hpp"

namespace citemb {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

// Keeps only decimal digits; "PMC123" and "123\n" both become "123".
std::string digits_only(std::string_view s) {
    std::string out;
    for (char c : s)
        if (std::isdigit(static_cast<unsigned char>(c))) out += c;
    return out;
}

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

int parse_year(std::string_view s) {
    const std::string t = trim(s);
    std::size_t i = 0;
    int year = 0;
    while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i])) && i < 6) {
        year = year * 10 + (t[i] - '0');
        ++i;
    }
    return i > 0 ? year : 0;
}

// Latin-1 supplement fold, indexed by codepoint - 0xC0.
// '0' = drop, '1' = "ae", '2' = "th", '3' = "ss".
constexpr std::string_view kLatin1Fold =
    "aaaaaa1ceeeeiiiidnooooo0ouuuuy23"
    "aaaaaa1ceeeeiiiidnooooo0ouuuuy2y";

// Latin Extended-A fold, indexed by codepoint - 0x100.
// '1' = "ij", '2' = "oe".
constexpr std::string_view kLatinExtAFold =
    "aaaaaa" "cccccccc" "dddd" "eeeeeeeeee" "gggggggg" "hhhh" "iiiiiiiiii"
    "11" "jj" "kkk" "llllllllll" "nnnnnnnnn" "oooooo" "22" "rrrrrr"
    "ssssssss" "tttttt" "uuuuuuuuuuuu" "ww" "yyy" "zzzzzz" "s";

static_assert(kLatin1Fold.size() == 64);
static_assert(kLatinExtAFold.size() == 128);

// Decodes the UTF-8 codepoint at in[i]; advances i past it. Returns 0 on an
// invalid sequence (the offending byte is consumed).
std::uint32_t decode_utf8(std::string_view in, std::size_t& i) {
    const auto b0 = static_cast<unsigned char>(in[i]);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = 0;
    std::uint32_t cp = 0;
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

} // namespace

std::size_t Paragraph::marker_count() const {
    std::size_t n = 0;
    for (const auto& p : pieces)
        if (p.is_marker) ++n;
    return n;
}

std::size_t RawDocument::marker_count() const {
    std::size_t n = 0;
    for (const auto& para : paragraphs) n += para.marker_count();
    return n;
}

std::vector<std::string> RawDocument::dangling_rids() const {
    std::set<std::string> seen;
    std::vector<std::string> out;
    for (const auto& para : paragraphs)
        for (const auto& piece : para.pieces)
            if (piece.is_marker && !references.count(piece.payload) && seen.insert(piece.payload).second)
                out.push_back(piece.payload);
    return out;
}

std::string make_placeholder(const CitationId& id) {
    std::string out(kPlaceholderOpen);
    out += id.token_surface();
    out += kPlaceholderClose;
    return out;
}

std::string normalize_meta_component(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    std::size_t i = 0;
    while (i < raw.size()) {
        const std::uint32_t cp = decode_utf8(raw, i);
        if (cp >= 'A' && cp <= 'Z') {
            out += static_cast<char>(cp - 'A' + 'a');
        } else if ((cp >= 'a' && cp <= 'z') || (cp >= '0' && cp <= '9')) {
            out += static_cast<char>(cp);
        } else if (cp >= 0xC0 && cp <= 0xFF) {
            const char code = kLatin1Fold[cp - 0xC0];
            if (code == '1') out += "ae";
            else if (code == '2') out += "th";
            else if (code == '3') out += "ss";
            else if (code != '0') out += code;
        } else if (cp >= 0x100 && cp <= 0x17F) {
            const char code = kLatinExtAFold[cp - 0x100];
            if (code == '1') out += "ij";
            else if (code == '2') out += "oe";
            else out += code;
        }
        // everything else (punctuation, whitespace, other scripts) is dropped
    }
    return out;
}

std::optional<std::string> build_meta_key(const RefMetadata& m) {
    const std::string fa =
        normalize_meta_component(m.first_author_given) + normalize_meta_component(m.first_author_surname);
    const std::string ve = normalize_meta_component(m.venue);
    const std::string yr = m.year > 0 ? std::to_string(m.year) : std::string();
    const std::string vo = normalize_meta_component(m.volume);
    const std::string fp = normalize_meta_component(m.first_page);
    if (fa.empty() || ve.empty() || yr.empty() || vo.empty() || fp.empty()) return std::nullopt;
    return fa + "_" + ve + "_" + yr + "_" + vo + "_" + fp;
}

std::optional<CitationId> resolve_identifier(const RefMetadata& m) {
    if (all_digits(m.pmid)) return CitationId{IdKind::Pmid, m.pmid};
    if (all_digits(m.pmcid)) return CitationId{IdKind::Pmcid, m.pmcid};
    if (auto key = build_meta_key(m)) return CitationId{IdKind::MetaKey, *key};
    return std::nullopt;
}

namespace {

void split_rids(std::string_view rid_attr, std::vector<ParagraphPiece>& pieces) {
    std::size_t i = 0;
    while (i < rid_attr.size()) {
        while (i < rid_attr.size() && std::isspace(static_cast<unsigned char>(rid_attr[i]))) ++i;
        std::size_t j = i;
        while (j < rid_attr.size() && !std::isspace(static_cast<unsigned char>(rid_attr[j]))) ++j;
        if (j > i) pieces.push_back({true, std::string(rid_attr.substr(i, j - i))});
        i = j;
    }
}

void walk_paragraph(const XmlNode& node, std::string& buffer, Paragraph& para) {
    for (const auto& child : node.children) {
        if (child.is_text()) {
            buffer += child.text;
            continue;
        }
        const std::string* ref_type = child.attr("ref-type");
        const std::string* rid = child.attr("rid");
        if (child.name == "xref" && ref_type && *ref_type == "bibr" && rid) {
            if (!buffer.empty()) {
                para.pieces.push_back({false, buffer});
                buffer.clear();
            }
            // The xref's own rendered text ("[3]") is replaced by the marker.
            split_rids(*rid, para.pieces);
        } else {
            walk_paragraph(child, buffer, para); // flatten inline markup
        }
    }
}

Paragraph build_paragraph(const XmlNode& p) {
    Paragraph para;
    std::string buffer;
    walk_paragraph(p, buffer, para);
    if (!buffer.empty()) para.pieces.push_back({false, buffer});
    return para;
}

void collect_paragraphs(const XmlNode& node, std::vector<Paragraph>& out) {
    for (const auto& child : node.children) {
        if (child.is_text()) continue;
        if (child.name == "p") {
            out.push_back(build_paragraph(child));
        } else {
            collect_paragraphs(child, out);
        }
    }
}

RefMetadata parse_reference(const XmlNode& ref) {
    const XmlNode* citation = ref.first("element-citation");
    if (!citation) citation = ref.first("mixed-citation");
    if (!citation) citation = &ref;

    RefMetadata m;
    std::vector<const XmlNode*> nodes;
    citation->descendants("pub-id", nodes);
    for (const XmlNode* id : nodes) {
        const std::string* type = id->attr("pub-id-type");
        if (!type) continue;
        if (*type == "pmid" && m.pmid.empty()) m.pmid = digits_only(id->text_content());
        else if ((*type == "pmcid" || *type == "pmc") && m.pmcid.empty())
            m.pmcid = digits_only(id->text_content());
    }
    nodes.clear();
    citation->descendants("name", nodes);
    if (!nodes.empty()) {
        if (const XmlNode* sn = nodes.front()->first("surname"))
            m.first_author_surname = trim(sn->text_content());
        if (const XmlNode* gn = nodes.front()->first("given-names"))
            m.first_author_given = trim(gn->text_content());
    }
    nodes.clear();
    citation->descendants("source", nodes);
    if (!nodes.empty()) m.venue = trim(nodes.front()->text_content());
    nodes.clear();
    citation->descendants("year", nodes);
    if (!nodes.empty()) m.year = parse_year(nodes.front()->text_content());
    nodes.clear();
    citation->descendants("volume", nodes);
    if (!nodes.empty()) m.volume = trim(nodes.front()->text_content());
    nodes.clear();
    citation->descendants("fpage", nodes);
    if (!nodes.empty()) m.first_page = trim(nodes.front()->text_content());
    return m;
}

} // namespace

RawDocument parse_document(std::string_view xml_bytes) {
    const XmlNode root = xml_parse(xml_bytes);

    const XmlNode* body = root.first("body");
    if (!body) {
        std::vector<const XmlNode*> found;
        root.descendants("body", found);
        if (!found.empty()) body = found.front();
    }
    if (!body) throw MissingBody();

    const XmlNode* article_meta = nullptr;
    if (const XmlNode* front = root.first("front")) article_meta = front->first("article-meta");
    if (!article_meta) {
        std::vector<const XmlNode*> found;
        root.descendants("article-meta", found);
        if (!found.empty()) article_meta = found.front();
    }

    RawDocument doc;

    std::string pmid, pmcid;
    int min_year = 0;
    if (article_meta) {
        for (const XmlNode* id : article_meta->all("article-id")) {
            const std::string* type = id->attr("pub-id-type");
            if (!type) continue;
            if (*type == "pmid" && pmid.empty()) pmid = digits_only(id->text_content());
            else if ((*type == "pmcid" || *type == "pmc") && pmcid.empty())
                pmcid = digits_only(id->text_content());
        }
        std::vector<const XmlNode*> dates;
        article_meta->descendants("pub-date", dates);
        for (const XmlNode* d : dates) {
            if (const XmlNode* y = d->first("year")) {
                const int year = parse_year(y->text_content());
                if (year > 0 && (min_year == 0 || year < min_year)) min_year = year;
            }
        }
    }
    if (!pmid.empty()) doc.doc_id = CitationId{IdKind::Pmid, pmid};
    else if (!pmcid.empty()) doc.doc_id = CitationId{IdKind::Pmcid, pmcid};
    else throw MissingDocId();
    if (min_year == 0) throw MissingPubYear();
    doc.pub_year = min_year;

    collect_paragraphs(*body, doc.paragraphs);

    const XmlNode* back = root.first("back");
    std::vector<const XmlNode*> ref_lists;
    (back ? *back : root).descendants("ref-list", ref_lists);
    for (const XmlNode* rl : ref_lists) {
        std::vector<const XmlNode*> refs;
        rl->descendants("ref", refs);
        for (const XmlNode* ref : refs) {
            const std::string* id = ref->attr("id");
            if (!id || id->empty()) continue;
            doc.references.emplace(*id, parse_reference(*ref));
        }
    }
    return doc;
}

std::vector<CitingSpan> extract_citing_spans(const RawDocument& doc) {
    std::vector<CitingSpan> spans;
    for (const auto& para : doc.paragraphs) {
        std::string text;
        std::size_t resolvable = 0;
        for (const auto& piece : para.pieces) {
            if (!piece.is_marker) {
                text += piece.payload;
                continue;
            }
            const auto it = doc.references.find(piece.payload);
            if (it == doc.references.end()) continue; // dangling: deleted
            const auto id = resolve_identifier(it->second);
            if (!id) continue; // unidentifiable: deleted
            text += ' ';
            text += make_placeholder(*id);
            text += ' ';
            ++resolvable;
        }
        if (resolvable > 0) spans.push_back({doc.doc_id, doc.pub_year, std::move(text)});
    }
    return spans;
}

void write_spans_tsv(std::ostream& out, const std::vector<CitingSpan>& spans) {
    for (const auto& span : spans) {
        std::string text = span.text;
        for (char& c : text)
            if (c == '\t' || c == '\n' || c == '\r') c = ' ';
        out << span.doc_id.to_string() << '\t' << span.pub_year << '\t' << text << '\n';
    }
}

std::vector<CitingSpan> read_spans_tsv(std::istream& in) {
    std::vector<CitingSpan> spans;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto tab1 = line.find('\t');
        const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
        if (tab2 == std::string::npos) throw Error("bad span record: " + line);
        const auto id = CitationId::parse(line.substr(0, tab1));
        if (!id) throw Error("bad span doc id: " + line.substr(0, tab1));
        CitingSpan span;
        span.doc_id = *id;
        span.pub_year = parse_year(line.substr(tab1 + 1, tab2 - tab1 - 1));
        span.text = line.substr(tab2 + 1);
        spans.push_back(std::move(span));
    }
    return spans;
}

} // namespace citemb
