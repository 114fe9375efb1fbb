#include "orchard/voc.hpp"

#include <cctype>
#include <cstring>
#include <memory>

#include "orchard/errors.hpp"
#include "orchard/util.hpp"

namespace orchard {

namespace {

// Minimal XML subset: elements, text, comments, declarations. Attributes are
// skipped, entities are not expanded; that covers what labelimg emits.
struct XmlNode {
    std::string name;
    std::string text;
    std::vector<std::unique_ptr<XmlNode>> children;

    const XmlNode* child(const std::string& tag) const {
        for (const auto& c : children)
            if (c->name == tag) return c.get();
        return nullptr;
    }
};

class XmlParser {
public:
    explicit XmlParser(const std::string& text) : text_(text) {}

    std::unique_ptr<XmlNode> parse() {
        skip_misc();
        auto root = parse_element();
        skip_misc();
        if (pos_ != text_.size()) err("trailing content after root element");
        return root;
    }

private:
    [[noreturn]] void err(const std::string& what) {
        fail(ErrorKind::malformed_xml, "offset " + std::to_string(pos_) + ": " + what);
    }

    bool starts_with(const char* s) const { return text_.compare(pos_, std::strlen(s), s) == 0; }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    void skip_misc() {
        for (;;) {
            skip_ws();
            if (starts_with("<?")) {
                std::size_t end = text_.find("?>", pos_);
                if (end == std::string::npos) err("unterminated declaration");
                pos_ = end + 2;
            } else if (starts_with("<!--")) {
                std::size_t end = text_.find("-->", pos_);
                if (end == std::string::npos) err("unterminated comment");
                pos_ = end + 3;
            } else {
                return;
            }
        }
    }

    std::string parse_name() {
        std::size_t begin = pos_;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == ':' ||
                c == '.') {
                ++pos_;
            } else {
                break;
            }
        }
        if (pos_ == begin) err("expected element name");
        return text_.substr(begin, pos_ - begin);
    }

    std::unique_ptr<XmlNode> parse_element() {
        if (pos_ >= text_.size() || text_[pos_] != '<') err("expected '<'");
        ++pos_;
        auto node = std::make_unique<XmlNode>();
        node->name = parse_name();
        // Skip attributes up to '>' or '/>'.
        while (pos_ < text_.size() && text_[pos_] != '>' && !starts_with("/>")) ++pos_;
        if (pos_ >= text_.size()) err("unterminated start tag <" + node->name + ">");
        if (starts_with("/>")) {
            pos_ += 2;
            return node;
        }
        ++pos_; // past '>'

        for (;;) {
            std::size_t text_begin = pos_;
            while (pos_ < text_.size() && text_[pos_] != '<') ++pos_;
            node->text += text_.substr(text_begin, pos_ - text_begin);
            if (pos_ >= text_.size()) err("unterminated element <" + node->name + ">");
            if (starts_with("</")) {
                pos_ += 2;
                std::string closing = parse_name();
                if (closing != node->name)
                    err("mismatched closing tag </" + closing + "> for <" + node->name + ">");
                skip_ws();
                if (pos_ >= text_.size() || text_[pos_] != '>') err("expected '>'");
                ++pos_;
                return node;
            }
            if (starts_with("<!--")) {
                std::size_t end = text_.find("-->", pos_);
                if (end == std::string::npos) err("unterminated comment");
                pos_ = end + 3;
                continue;
            }
            node->children.push_back(parse_element());
        }
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

double require_number(const XmlNode& parent, const std::string& tag) {
    const XmlNode* node = parent.child(tag);
    if (!node) fail(ErrorKind::malformed_xml, "missing <" + tag + "> in <" + parent.name + ">");
    auto v = parse_double(trim(node->text));
    if (!v) fail(ErrorKind::malformed_xml, "non-numeric <" + tag + ">: '" + trim(node->text) + "'");
    return *v;
}

} // namespace

bool is_known_class(const std::string& label) {
    return label == kClassTreeApple || label == kClassGroundApple;
}

VocAnnotation parse_voc_annotation(const std::string& xml_text) {
    XmlParser parser(xml_text);
    std::unique_ptr<XmlNode> root = parser.parse();
    if (root->name != "annotation")
        fail(ErrorKind::malformed_xml, "root element is <" + root->name + ">, expected <annotation>");

    VocAnnotation anno;
    if (const XmlNode* fn = root->child("filename")) anno.image_name = trim(fn->text);
    if (const XmlNode* size = root->child("size")) {
        anno.width = static_cast<int>(require_number(*size, "width"));
        anno.height = static_cast<int>(require_number(*size, "height"));
    }

    for (const auto& child : root->children) {
        if (child->name != "object") continue;
        const XmlNode* name = child->child("name");
        if (!name) fail(ErrorKind::malformed_xml, "missing <name> in <object>");
        std::string label = trim(name->text);
        if (!is_known_class(label)) fail(ErrorKind::unknown_class, "unknown class '" + label + "'");
        const XmlNode* bnd = child->child("bndbox");
        if (!bnd) fail(ErrorKind::malformed_xml, "missing <bndbox> in <object>");

        GroundTruthBox box;
        box.image_name = anno.image_name;
        box.class_label = label;
        box.xmin = require_number(*bnd, "xmin");
        box.ymin = require_number(*bnd, "ymin");
        box.xmax = require_number(*bnd, "xmax");
        box.ymax = require_number(*bnd, "ymax");
        if (!(box.xmin < box.xmax) || !(box.ymin < box.ymax)) {
            fail(ErrorKind::degenerate_box,
                 "degenerate box (" + format_g(box.xmin) + ", " + format_g(box.ymin) + ", " +
                     format_g(box.xmax) + ", " + format_g(box.ymax) + ")");
        }
        anno.boxes.push_back(std::move(box));
    }
    return anno;
}

std::string write_voc_annotation(const VocAnnotation& annotation) {
    std::string out;
    out += "<annotation>\n";
    out += "  <filename>" + annotation.image_name + "</filename>\n";
    out += "  <size>\n";
    out += "    <width>" + std::to_string(annotation.width) + "</width>\n";
    out += "    <height>" + std::to_string(annotation.height) + "</height>\n";
    out += "    <depth>3</depth>\n";
    out += "  </size>\n";
    for (const GroundTruthBox& b : annotation.boxes) {
        out += "  <object>\n";
        out += "    <name>" + b.class_label + "</name>\n";
        out += "    <bndbox>\n";
        out += "      <xmin>" + format_g(b.xmin) + "</xmin>\n";
        out += "      <ymin>" + format_g(b.ymin) + "</ymin>\n";
        out += "      <xmax>" + format_g(b.xmax) + "</xmax>\n";
        out += "      <ymax>" + format_g(b.ymax) + "</ymax>\n";
        out += "    </bndbox>\n";
        out += "  </object>\n";
    }
    out += "</annotation>\n";
    return out;
}

} // namespace orchard
