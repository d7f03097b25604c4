#include "citemb/xml.hpp"

#include <cctype>
#include <cstdint>

#include "citemb/errors.hpp"

namespace citemb {

const std::string* XmlNode::attr(std::string_view key) const {
    for (const auto& [k, v] : attrs)
        if (k == key) return &v;
    return nullptr;
}

const XmlNode* XmlNode::first(std::string_view child_name) const {
    for (const auto& c : children)
        if (c.name == child_name) return &c;
    return nullptr;
}

std::vector<const XmlNode*> XmlNode::all(std::string_view child_name) const {
    std::vector<const XmlNode*> out;
    for (const auto& c : children)
        if (c.name == child_name) out.push_back(&c);
    return out;
}

void XmlNode::descendants(std::string_view child_name, std::vector<const XmlNode*>& out) const {
    for (const auto& c : children) {
        if (c.is_text()) continue;
        if (c.name == child_name) out.push_back(&c);
        c.descendants(child_name, out);
    }
}

std::string XmlNode::text_content() const {
    if (is_text()) return text;
    std::string out;
    for (const auto& c : children) out += c.text_content();
    return out;
}

namespace {

class Parser {
public:
    explicit Parser(std::string_view in) : in_(in) {}

    XmlNode parse_document() {
        skip_misc();
        if (eof()) throw MalformedXml("no root element");
        XmlNode root = parse_element();
        // Trailing whitespace/comments are tolerated; anything else is ignored.
        return root;
    }

private:
    std::string_view in_;
    std::size_t pos_ = 0;

    bool eof() const { return pos_ >= in_.size(); }
    char peek() const { return in_[pos_]; }
    char get() { return in_[pos_++]; }

    bool starts_with(std::string_view s) const {
        return in_.compare(pos_, s.size(), s) == 0;
    }

    void expect(char c, const char* where) {
        if (eof() || get() != c) throw MalformedXml(std::string("expected '") + c + "' in " + where);
    }

    static bool is_name_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'
            || c == ':';
    }

    // Skips whitespace, comments, PIs and DOCTYPE between markup.
    void skip_misc() {
        for (;;) {
            while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
            if (starts_with("<!--")) {
                skip_comment();
            } else if (starts_with("<?")) {
                skip_until("?>", "processing instruction");
            } else if (starts_with("<!DOCTYPE")) {
                skip_doctype();
            } else {
                return;
            }
        }
    }

    void skip_comment() {
        pos_ += 4;
        const auto end = in_.find("-->", pos_);
        if (end == std::string_view::npos) throw MalformedXml("unterminated comment");
        pos_ = end + 3;
    }

    void skip_until(std::string_view terminator, const char* what) {
        const auto end = in_.find(terminator, pos_);
        if (end == std::string_view::npos)
            throw MalformedXml(std::string("unterminated ") + what);
        pos_ = end + terminator.size();
    }

    void skip_doctype() {
        // DOCTYPE may contain an internal subset in brackets.
        int brackets = 0;
        while (!eof()) {
            const char c = get();
            if (c == '[') ++brackets;
            else if (c == ']') --brackets;
            else if (c == '>' && brackets <= 0) return;
        }
        throw MalformedXml("unterminated DOCTYPE");
    }

    std::string read_name() {
        const std::size_t start = pos_;
        while (!eof() && is_name_char(peek())) ++pos_;
        if (pos_ == start) throw MalformedXml("empty name");
        return std::string(in_.substr(start, pos_ - start));
    }

    std::string read_attr_value() {
        if (eof()) throw MalformedXml("truncated attribute");
        const char quote = get();
        if (quote != '"' && quote != '\'') throw MalformedXml("attribute value not quoted");
        const std::size_t start = pos_;
        while (!eof() && peek() != quote) ++pos_;
        if (eof()) throw MalformedXml("unterminated attribute value");
        std::string raw(in_.substr(start, pos_ - start));
        ++pos_;
        return decode_entities(raw);
    }

    static std::string decode_entities(std::string_view raw) {
        std::string out;
        out.reserve(raw.size());
        std::size_t i = 0;
        while (i < raw.size()) {
            if (raw[i] != '&') {
                out += raw[i++];
                continue;
            }
            const auto semi = raw.find(';', i);
            if (semi == std::string_view::npos || semi - i > 10) {
                out += raw[i++]; // bare ampersand, keep literally
                continue;
            }
            const std::string_view ent = raw.substr(i + 1, semi - i - 1);
            if (ent == "amp") out += '&';
            else if (ent == "lt") out += '<';
            else if (ent == "gt") out += '>';
            else if (ent == "quot") out += '"';
            else if (ent == "apos") out += '\'';
            else if (!ent.empty() && ent[0] == '#') {
                append_codepoint(out, ent.substr(1));
            } else {
                out += '&'; // unknown entity, keep literally
                out += ent;
                out += ';';
            }
            i = semi + 1;
        }
        return out;
    }

    static void append_codepoint(std::string& out, std::string_view digits) {
        std::uint32_t cp = 0;
        bool ok = !digits.empty();
        if (!digits.empty() && (digits[0] == 'x' || digits[0] == 'X')) {
            for (char c : digits.substr(1)) {
                if (std::isxdigit(static_cast<unsigned char>(c))) {
                    cp = cp * 16
                        + static_cast<std::uint32_t>(
                             std::isdigit(static_cast<unsigned char>(c))
                                 ? c - '0'
                                 : std::tolower(static_cast<unsigned char>(c)) - 'a' + 10);
                } else {
                    ok = false;
                }
            }
        } else {
            for (char c : digits) {
                if (std::isdigit(static_cast<unsigned char>(c)))
                    cp = cp * 10 + static_cast<std::uint32_t>(c - '0');
                else
                    ok = false;
            }
        }
        if (!ok || cp == 0 || cp > 0x10FFFF) return;
        // UTF-8 encode
        if (cp < 0x80) {
            out += static_cast<char>(cp);
        } else if (cp < 0x800) {
            out += static_cast<char>(0xC0 | (cp >> 6));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else if (cp < 0x10000) {
            out += static_cast<char>(0xE0 | (cp >> 12));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else {
            out += static_cast<char>(0xF0 | (cp >> 18));
            out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        }
    }

    XmlNode parse_element() {
        expect('<', "element start");
        XmlNode node;
        node.name = read_name();
        // attributes
        for (;;) {
            while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
            if (eof()) throw MalformedXml("truncated tag <" + node.name);
            if (peek() == '/') {
                ++pos_;
                expect('>', "self-closing tag");
                return node;
            }
            if (peek() == '>') {
                ++pos_;
                break;
            }
            std::string key = read_name();
            while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
            expect('=', "attribute");
            while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
            node.attrs.emplace_back(std::move(key), read_attr_value());
        }
        parse_content(node);
        return node;
    }

    void parse_content(XmlNode& node) {
        std::string pending_text;
        auto flush_text = [&] {
            if (!pending_text.empty()) {
                XmlNode t;
                t.name = "#text";
                t.text = decode_entities(pending_text);
                node.children.push_back(std::move(t));
                pending_text.clear();
            }
        };
        for (;;) {
            if (eof()) throw MalformedXml("unexpected end of input inside <" + node.name + ">");
            if (peek() != '<') {
                pending_text += get();
                continue;
            }
            if (starts_with("</")) {
                flush_text();
                pos_ += 2;
                const std::string closing = read_name();
                if (closing != node.name)
                    throw MalformedXml("mismatched </" + closing + "> inside <" + node.name + ">");
                while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
                expect('>', "closing tag");
                return;
            }
            if (starts_with("<!--")) {
                skip_comment();
                continue;
            }
            if (starts_with("<![CDATA[")) {
                pos_ += 9;
                const auto end = in_.find("]]>", pos_);
                if (end == std::string_view::npos) throw MalformedXml("unterminated CDATA");
                flush_text();
                XmlNode t;
                t.name = "#text";
                t.text = std::string(in_.substr(pos_, end - pos_));
                node.children.push_back(std::move(t));
                pos_ = end + 3;
                continue;
            }
            if (starts_with("<?")) {
                skip_until("?>", "processing instruction");
                continue;
            }
            flush_text();
            node.children.push_back(parse_element());
        }
    }
};

} // namespace

XmlNode xml_parse(std::string_view input) {
    Parser p(input);
    return p.parse_document();
}

} // namespace citemb
