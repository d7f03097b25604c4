#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace citemb {

// Minimal DOM for the JATS-like subset this project consumes. Text nodes use
// the reserved name "#text"; character data (including whitespace between
// inline elements) is preserved verbatim so that mixed content survives.
struct XmlNode {
    std::string name;
    std::string text; // set for "#text" nodes only
    std::vector<std::pair<std::string, std::string>> attrs;
    std::vector<XmlNode> children;

    bool is_text() const { return name == "#text"; }

    const std::string* attr(std::string_view key) const;

    // First direct child element with the given name, or nullptr.
    const XmlNode* first(std::string_view child_name) const;

    // All direct child elements with the given name, in document order.
    std::vector<const XmlNode*> all(std::string_view child_name) const;

    // All descendant elements with the given name, depth-first document order.
    void descendants(std::string_view child_name, std::vector<const XmlNode*>& out) const;

    // Concatenated text of this element and all descendants.
    std::string text_content() const;
};

// Parses a complete document and returns the root element.
// Throws MalformedXml on truncated input, bad tag syntax, or mismatched tags.
// Comments, processing instructions, DOCTYPE and CDATA are handled; unknown
// entities are kept literally.
XmlNode xml_parse(std::string_view input);

} // namespace citemb
