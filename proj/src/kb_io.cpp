#include "mivar/kb_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <vector>

#include "mivar/error.hpp"
#include "mivar/expr.hpp"

namespace mivar {
namespace {

[[noreturn]] void xml_fail(std::uint64_t offset, const std::string& what) {
    throw Error(errc::xml_error, "xml error at offset " + std::to_string(offset) + ": " + what);
}

[[noreturn]] void schema_fail(const std::string& path, const std::string& what) {
    throw Error(errc::schema_error, path + ": " + what);
}

std::string fmt_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, end);
}

bool is_ws(int c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

// ---------------------------------------------------------------------------
// Streaming XML scanner: tags only, attribute entity decoding, no DOM.

class XmlScanner {
public:
    struct Attr {
        std::string name;
        std::string value;
    };
    struct Tag {
        std::string name;
        std::vector<Attr> attrs;
        bool closing = false;       // </name>
        bool self_closing = false;  // <name ... />
    };

    explicit XmlScanner(std::istream& in) : in_(in), buf_(1 << 16) { skip_bom(); }

    std::uint64_t offset() const { return base_ + pos_; }

    // Next tag, or nullopt at end of input. Skips the prolog, comments, and
    // whitespace; any other character data is rejected (the format has none).
    std::optional<Tag> next() {
        for (;;) {
            int c = get();
            if (c == -1) return std::nullopt;
            if (is_ws(c)) continue;
            if (c != '<') xml_fail(offset() - 1, "unexpected character data");
            int d = peek();
            if (d == '?') {
                skip_until("?>");
                continue;
            }
            if (d == '!') {
                get();
                if (peek() == '-') {
                    expect('-');
                    expect('-');
                    skip_until("-->");
                    continue;
                }
                xml_fail(offset(), "unsupported markup declaration");
            }
            return read_tag();
        }
    }

private:
    std::istream& in_;
    std::vector<char> buf_;
    std::size_t pos_ = 0;
    std::size_t len_ = 0;
    std::uint64_t base_ = 0;

    bool fill() {
        base_ += len_;
        in_.read(buf_.data(), static_cast<std::streamsize>(buf_.size()));
        len_ = static_cast<std::size_t>(in_.gcount());
        pos_ = 0;
        return len_ > 0;
    }
    int get() {
        if (pos_ == len_ && !fill()) return -1;
        return static_cast<unsigned char>(buf_[pos_++]);
    }
    int peek() {
        if (pos_ == len_ && !fill()) return -1;
        return static_cast<unsigned char>(buf_[pos_]);
    }
    void expect(char c) {
        int got = get();
        if (got != c) xml_fail(offset() - 1, std::string("expected '") + c + "'");
    }
    void skip_bom() {
        if (peek() == 0xEF) {
            get();
            expect(static_cast<char>(0xBB));
            expect(static_cast<char>(0xBF));
        }
    }
    void skip_until(const char* end) {
        std::size_t matched = 0;
        while (end[matched] != '\0') {
            int c = get();
            if (c == -1) xml_fail(offset(), std::string("unterminated section, expected ") + end);
            matched = (c == end[matched]) ? matched + 1 : (c == end[0] ? 1 : 0);
        }
    }
    void skip_ws() {
        while (is_ws(peek())) get();
    }

    static bool name_start(int c) {
        return std::isalpha(c) != 0 || c == '_' || c == ':';
    }
    static bool name_char(int c) {
        return std::isalnum(c) != 0 || c == '_' || c == ':' || c == '.' || c == '-';
    }

    std::string read_name() {
        int c = peek();
        if (!name_start(c)) xml_fail(offset(), "expected a name");
        std::string name;
        while (name_char(peek())) name += static_cast<char>(get());
        return name;
    }

    void decode_entity(std::string& out) {
        std::string ent;
        for (;;) {
            int c = get();
            if (c == -1 || ent.size() > 10) xml_fail(offset(), "unterminated entity reference");
            if (c == ';') break;
            ent += static_cast<char>(c);
        }
        if (ent == "amp") out += '&';
        else if (ent == "lt") out += '<';
        else if (ent == "gt") out += '>';
        else if (ent == "quot") out += '"';
        else if (ent == "apos") out += '\'';
        else if (ent.size() > 1 && ent[0] == '#') {
            int base = 10;
            std::size_t digits = 1;
            if (ent[1] == 'x' || ent[1] == 'X') {
                base = 16;
                digits = 2;
            }
            unsigned code = 0;
            auto [p, ec] = std::from_chars(ent.data() + digits, ent.data() + ent.size(), code, base);
            if (ec != std::errc() || p != ent.data() + ent.size() || code > 0x10FFFF)
                xml_fail(offset(), "bad character reference &" + ent + ";");
            // Encode the code point as UTF-8.
            if (code < 0x80) {
                out += static_cast<char>(code);
            } else if (code < 0x800) {
                out += static_cast<char>(0xC0 | (code >> 6));
                out += static_cast<char>(0x80 | (code & 0x3F));
            } else if (code < 0x10000) {
                out += static_cast<char>(0xE0 | (code >> 12));
                out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
                out += static_cast<char>(0x80 | (code & 0x3F));
            } else {
                out += static_cast<char>(0xF0 | (code >> 18));
                out += static_cast<char>(0x80 | ((code >> 12) & 0x3F));
                out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
                out += static_cast<char>(0x80 | (code & 0x3F));
            }
        } else {
            xml_fail(offset(), "unknown entity &" + ent + ";");
        }
    }

    std::string read_attr_value() {
        int quote = get();
        if (quote != '"' && quote != '\'') xml_fail(offset() - 1, "expected a quoted attribute value");
        std::string value;
        for (;;) {
            int c = get();
            if (c == -1) xml_fail(offset(), "unterminated attribute value");
            if (c == quote) break;
            if (c == '<') xml_fail(offset() - 1, "'<' inside attribute value");
            if (c == '&') {
                decode_entity(value);
            } else {
                value += static_cast<char>(c);
            }
        }
        return value;
    }

    Tag read_tag() {
        Tag tag;
        if (peek() == '/') {
            get();
            tag.closing = true;
            tag.name = read_name();
            skip_ws();
            expect('>');
            return tag;
        }
        tag.name = read_name();
        for (;;) {
            skip_ws();
            int c = peek();
            if (c == '/') {
                get();
                expect('>');
                tag.self_closing = true;
                return tag;
            }
            if (c == '>') {
                get();
                return tag;
            }
            Attr attr;
            attr.name = read_name();
            for (const Attr& seen : tag.attrs)
                if (seen.name == attr.name)
                    xml_fail(offset(), "duplicate attribute '" + attr.name + "'");
            skip_ws();
            expect('=');
            skip_ws();
            attr.value = read_attr_value();
            tag.attrs.push_back(std::move(attr));
        }
    }
};

// ---------------------------------------------------------------------------
// Schema layer.

const std::string* find_attr(const XmlScanner::Tag& tag, std::string_view name) {
    for (const auto& attr : tag.attrs)
        if (attr.name == name) return &attr.value;
    return nullptr;
}

const std::string& require_attr(const XmlScanner::Tag& tag, std::string_view name,
                                const std::string& path) {
    const std::string* value = find_attr(tag, name);
    if (!value) schema_fail(path, "missing attribute '" + std::string(name) + "'");
    return *value;
}

std::string trimmed(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_ws(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && is_ws(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::optional<double> parse_stored_value(const std::string& raw, const std::string& path) {
    std::string s = trimmed(raw);
    if (s.empty()) return std::nullopt;
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        schema_fail(path, "bad value attribute '" + raw + "'");
    return v;
}

std::vector<std::string> split_id_list(const std::string& raw, const std::string& path,
                                       std::string_view attr) {
    std::vector<std::string> ids;
    if (trimmed(raw).empty()) return ids;
    std::size_t start = 0;
    for (;;) {
        std::size_t comma = raw.find(',', start);
        std::string id = trimmed(std::string_view(raw).substr(
            start, comma == std::string::npos ? std::string::npos : comma - start));
        if (id.empty())
            schema_fail(path, "empty id in attribute '" + std::string(attr) + "'");
        ids.push_back(std::move(id));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return ids;
}

std::vector<Expr> split_expressions(const std::string& raw, const std::string& path) {
    std::vector<Expr> exprs;
    std::size_t start = 0;
    for (;;) {
        std::size_t semi = raw.find(';', start);
        std::string piece =
            raw.substr(start, semi == std::string::npos ? std::string::npos : semi - start);
        try {
            exprs.push_back(parse_expr(piece));
        } catch (const Error& e) {
            schema_fail(path, std::string("bad value expression: ") + e.what());
        }
        if (semi == std::string::npos) break;
        start = semi + 1;
    }
    return exprs;
}

std::int64_t parse_inc(const std::string& raw, const std::string& path) {
    std::string s = trimmed(raw);
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || v < 0)
        schema_fail(path, "bad inc attribute '" + raw + "'");
    return v;
}

// Largest trailing-digit-run value among the ids, or -1 when none has one.
std::int64_t max_id_suffix(const std::vector<std::string>& ids) {
    std::int64_t best = -1;
    for (const std::string& id : ids) {
        std::size_t d = id.size();
        while (d > 0 && std::isdigit(static_cast<unsigned char>(id[d - 1]))) --d;
        if (d == id.size()) continue;
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(id.data() + d, id.data() + id.size(), v);
        if (ec != std::errc() || p != id.data() + id.size())
            schema_fail("metadata", "id suffix out of range in '" + id + "'");
        best = std::max(best, v);
    }
    return best;
}

XmlScanner::Tag require_tag(XmlScanner& scanner, const std::string& path) {
    auto tag = scanner.next();
    if (!tag) schema_fail(path, "unexpected end of document");
    return *std::move(tag);
}

void require_open(const XmlScanner::Tag& tag, std::string_view name, const std::string& path) {
    if (tag.closing || tag.name != name)
        schema_fail(path, "expected <" + std::string(name) + ">, got <" + (tag.closing ? "/" : "") +
                              tag.name + ">");
}

void escape_attr(std::string& out, std::string_view value) {
    for (char c : value) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
}

void append_attr(std::string& out, std::string_view name, std::string_view value) {
    out += ' ';
    out += name;
    out += "=\"";
    escape_attr(out, value);
    out += '"';
}

std::string join_ids(const MivarNet& net, const std::vector<ParamIndex>& params) {
    std::string out;
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (i) out += ',';
        out += net.params[params[i]].id;
    }
    return out;
}

std::string join_expressions(const Rule& rule) {
    std::string out;
    for (std::size_t i = 0; i < rule.expressions.size(); ++i) {
        if (i) out += ';';
        out += to_string(rule.expressions[i]);
    }
    return out;
}

}  // namespace

KbMetadata derive_metadata(const MivarNet& net) {
    std::vector<std::string> param_ids, rule_ids;
    param_ids.reserve(net.n());
    rule_ids.reserve(net.m());
    for (const auto& p : net.params) param_ids.push_back(p.id);
    for (const auto& r : net.rules) rule_ids.push_back(r.id);
    KbMetadata meta;
    meta.next_param_inc = max_id_suffix(param_ids) + 1;
    meta.next_rule_inc = max_id_suffix(rule_ids) + 1;
    return meta;
}

KbFile parse_kb(std::istream& in) {
    XmlScanner scanner(in);
    require_open(require_tag(scanner, "root"), "root", "(document)");

    NetBuilder builder;
    std::vector<std::string> param_ids, rule_ids;

    // <parametr> container.
    {
        auto container = require_tag(scanner, "root/parametr");
        require_open(container, "parametr", "root/parametr");
        std::size_t index = 0;
        while (!container.self_closing) {
            auto tag = require_tag(scanner, "root/parametr");
            if (tag.closing) {
                if (tag.name != "parametr")
                    schema_fail("root/parametr", "mismatched closing tag </" + tag.name + ">");
                break;
            }
            ++index;
            std::string path = "root/parametr/parametr[" + std::to_string(index) + "]";
            if (tag.name != "parametr") schema_fail(path, "unexpected element <" + tag.name + ">");
            if (!tag.self_closing) schema_fail(path, "parameter entries must be self-closing");
            Parameter param;
            param.id = require_attr(tag, "id", path);
            param.stored_value = parse_stored_value(require_attr(tag, "value", path), path);
            param.description = require_attr(tag, "description", path);
            param_ids.push_back(param.id);
            try {
                builder.add_param(std::move(param));
            } catch (const Error& e) {
                schema_fail(path, e.what());
            }
        }
    }

    // <rules> container.
    {
        auto container = require_tag(scanner, "root/rules");
        require_open(container, "rules", "root/rules");
        std::size_t index = 0;
        while (!container.self_closing) {
            auto tag = require_tag(scanner, "root/rules");
            if (tag.closing) {
                if (tag.name != "rules")
                    schema_fail("root/rules", "mismatched closing tag </" + tag.name + ">");
                break;
            }
            ++index;
            std::string path = "root/rules/rule[" + std::to_string(index) + "]";
            if (tag.name != "rule") schema_fail(path, "unexpected element <" + tag.name + ">");
            if (!tag.self_closing) schema_fail(path, "rule entries must be self-closing");
            RuleDecl decl;
            decl.id = require_attr(tag, "id", path);
            decl.outputs = split_id_list(require_attr(tag, "resultId", path), path, "resultId");
            decl.inputs = split_id_list(require_attr(tag, "initId", path), path, "initId");
            decl.expressions = split_expressions(require_attr(tag, "value", path), path);
            decl.description = require_attr(tag, "description", path);
            rule_ids.push_back(decl.id);
            try {
                builder.add_rule(std::move(decl));
            } catch (const Error& e) {
                schema_fail(path, e.what());
            }
        }
    }

    // <metadata> container.
    KbMetadata meta;
    {
        auto container = require_tag(scanner, "root/metadata");
        require_open(container, "metadata", "root/metadata");
        if (container.self_closing)
            schema_fail("root/metadata", "missing <idParametr> and <idRule>");
        auto id_param = require_tag(scanner, "root/metadata/idParametr");
        require_open(id_param, "idParametr", "root/metadata/idParametr");
        if (!id_param.self_closing)
            schema_fail("root/metadata/idParametr", "must be self-closing");
        meta.next_param_inc =
            parse_inc(require_attr(id_param, "inc", "root/metadata/idParametr"),
                      "root/metadata/idParametr");
        auto id_rule = require_tag(scanner, "root/metadata/idRule");
        require_open(id_rule, "idRule", "root/metadata/idRule");
        if (!id_rule.self_closing) schema_fail("root/metadata/idRule", "must be self-closing");
        meta.next_rule_inc = parse_inc(require_attr(id_rule, "inc", "root/metadata/idRule"),
                                       "root/metadata/idRule");
        auto close = require_tag(scanner, "root/metadata");
        if (!close.closing || close.name != "metadata")
            schema_fail("root/metadata", "expected </metadata>");
    }

    auto close = require_tag(scanner, "root");
    if (!close.closing || close.name != "root") schema_fail("root", "expected </root>");
    if (scanner.next()) xml_fail(scanner.offset(), "content after the document element");

    if (meta.next_param_inc < max_id_suffix(param_ids))
        schema_fail("root/metadata/idParametr",
                    "inc " + std::to_string(meta.next_param_inc) +
                        " is below the largest parameter id suffix");
    if (meta.next_rule_inc < max_id_suffix(rule_ids))
        schema_fail("root/metadata/idRule", "inc " + std::to_string(meta.next_rule_inc) +
                                                " is below the largest rule id suffix");

    KbFile file;
    file.net = std::move(builder).finish();
    file.metadata = meta;
    return file;
}

KbFile parse_kb(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_kb(in);
}

void write_kb(std::ostream& out, const MivarNet& net, const KbMetadata& meta) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\" ?>\n<root>\n<parametr>\n";
    std::string line;
    for (const Parameter& p : net.params) {
        line = "<parametr";
        append_attr(line, "id", p.id);
        append_attr(line, "value", p.stored_value ? fmt_double(*p.stored_value) : "");
        append_attr(line, "description", p.description);
        line += " />\n";
        out << line;
    }
    out << "</parametr>\n<rules>\n";
    for (const Rule& r : net.rules) {
        line = "<rule";
        append_attr(line, "id", r.id);
        append_attr(line, "resultId", join_ids(net, r.outputs));
        append_attr(line, "initId", join_ids(net, r.inputs));
        append_attr(line, "value", join_expressions(r));
        append_attr(line, "description", r.description);
        line += " />\n";
        out << line;
    }
    out << "</rules>\n<metadata>\n<idParametr inc=\"" << meta.next_param_inc
        << "\" />\n<idRule inc=\"" << meta.next_rule_inc << "\" />\n</metadata>\n</root>\n";
}

std::string write_kb(const MivarNet& net, const KbMetadata& meta) {
    std::ostringstream out;
    write_kb(out, net, meta);
    return out.str();
}

// ---------------------------------------------------------------------------
// TSV format.

namespace {

void escape_tsv(std::string& out, std::string_view field) {
    for (char c : field) {
        switch (c) {
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\\': out += "\\\\"; break;
            default: out += c;
        }
    }
}

std::string unescape_tsv(std::string_view field, std::size_t line_no) {
    std::string out;
    out.reserve(field.size());
    for (std::size_t i = 0; i < field.size(); ++i) {
        if (field[i] != '\\') {
            out += field[i];
            continue;
        }
        if (i + 1 == field.size())
            schema_fail("tsv line " + std::to_string(line_no), "dangling backslash");
        char c = field[++i];
        if (c == 't') out += '\t';
        else if (c == 'n') out += '\n';
        else if (c == '\\') out += '\\';
        else
            schema_fail("tsv line " + std::to_string(line_no),
                        std::string("unknown escape \\") + c);
    }
    return out;
}

std::vector<std::string> split_fields(std::string_view line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        std::size_t tab = line.find('\t', start);
        std::string_view raw =
            line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start);
        fields.push_back(unescape_tsv(raw, line_no));
        if (tab == std::string_view::npos) break;
        start = tab + 1;
    }
    return fields;
}

}  // namespace

KbFile parse_tsv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        if (!std::getline(in, line)) return false;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    };

    if (!next_line() || line != "#mivar-tsv 1")
        schema_fail("tsv line 1", "missing '#mivar-tsv 1' header");

    NetBuilder builder;
    std::vector<std::string> param_ids, rule_ids;
    while (next_line()) {
        if (line.empty() || line[0] == '#') continue;
        std::string where = "tsv line " + std::to_string(line_no);
        auto fields = split_fields(line, line_no);
        if (fields[0] == "P") {
            if (fields.size() != 4) schema_fail(where, "parameter lines take 4 fields");
            Parameter param;
            param.id = fields[1];
            param.stored_value = parse_stored_value(fields[2], where);
            param.description = fields[3];
            try {
                builder.add_param(std::move(param));
            } catch (const Error& e) {
                schema_fail(where, e.what());
            }
            param_ids.push_back(fields[1]);
        } else if (fields[0] == "R") {
            if (fields.size() != 6) schema_fail(where, "rule lines take 6 fields");
            RuleDecl decl;
            decl.id = fields[1];
            decl.inputs = split_id_list(fields[2], where, "initId");
            decl.outputs = split_id_list(fields[3], where, "resultId");
            decl.expressions = split_expressions(fields[4], where);
            decl.description = fields[5];
            try {
                builder.add_rule(std::move(decl));
            } catch (const Error& e) {
                schema_fail(where, e.what());
            }
            rule_ids.push_back(fields[1]);
        } else {
            schema_fail(where, "unknown record type '" + fields[0] + "'");
        }
    }

    KbFile file;
    file.net = std::move(builder).finish();
    file.metadata.next_param_inc = max_id_suffix(param_ids) + 1;
    file.metadata.next_rule_inc = max_id_suffix(rule_ids) + 1;
    return file;
}

KbFile parse_tsv(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_tsv(in);
}

void write_tsv(std::ostream& out, const MivarNet& net) {
    out << "#mivar-tsv 1\n";
    std::string line;
    for (const Parameter& p : net.params) {
        line = "P\t";
        escape_tsv(line, p.id);
        line += '\t';
        if (p.stored_value) line += fmt_double(*p.stored_value);
        line += '\t';
        escape_tsv(line, p.description);
        line += '\n';
        out << line;
    }
    for (const Rule& r : net.rules) {
        line = "R\t";
        escape_tsv(line, r.id);
        line += '\t';
        escape_tsv(line, join_ids(net, r.inputs));
        line += '\t';
        escape_tsv(line, join_ids(net, r.outputs));
        line += '\t';
        escape_tsv(line, join_expressions(r));
        line += '\t';
        escape_tsv(line, r.description);
        line += '\n';
        out << line;
    }
}

std::string write_tsv(const MivarNet& net) {
    std::ostringstream out;
    write_tsv(out, net);
    return out.str();
}

// ---------------------------------------------------------------------------
// Files.

KbFile read_net_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(errc::parse_error, "cannot open '" + path + "'");
    // Decide the format from the first byte: '#' starts the TSV header,
    // anything XML-ish starts with whitespace or '<'.
    int first = in.peek();
    if (first == '#') return parse_tsv(in);
    return parse_kb(in);
}

void write_net_file(const std::string& path, const MivarNet& net, const KbMetadata& meta,
                    NetFileFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(errc::parse_error, "cannot open '" + path + "' for writing");
    if (format == NetFileFormat::xml) {
        write_kb(out, net, meta);
    } else {
        write_tsv(out, net);
    }
    out.flush();
    if (!out) throw Error(errc::parse_error, "write to '" + path + "' failed");
}

// ---------------------------------------------------------------------------
// DOT export.

std::string export_dot(const MivarNet& net, const SolutionPath& solution, const Query& query) {
    std::vector<std::uint8_t> param_used(net.n(), 0);
    for (RuleIndex r : solution.firing_order) {
        for (ParamIndex p : net.rules[r].inputs) param_used[p] = 1;
        for (ParamIndex p : net.rules[r].outputs) param_used[p] = 1;
    }
    for (const auto& [p, value] : query.given) {
        (void)value;
        param_used[p] = 1;
    }
    for (ParamIndex p : query.find) param_used[p] = 1;

    std::string out;
    out += "digraph solution {\n";
    out += "  rankdir=TB;\n";
    out += "  node [fontname=\"Helvetica\"];\n";
    for (ParamIndex p = 0; p < net.n(); ++p) {
        if (!param_used[p]) continue;
        out += "  p_" + net.params[p].id + " [label=\"" + net.params[p].id +
               "\" shape=ellipse style=filled fillcolor=pink];\n";
    }
    for (RuleIndex r : solution.firing_order) {
        out += "  r_" + net.rules[r].id + " [label=\"" + net.rules[r].id +
               "\" shape=box style=filled fillcolor=orange];\n";
    }
    if (!query.given.empty()) {
        out += "  { rank=source;";
        for (const auto& [p, value] : query.given) {
            (void)value;
            out += " p_" + net.params[p].id + ";";
        }
        out += " }\n";
    }
    if (!query.find.empty()) {
        out += "  { rank=sink;";
        for (ParamIndex p : query.find) out += " p_" + net.params[p].id + ";";
        out += " }\n";
    }
    for (RuleIndex r : solution.firing_order) {
        for (ParamIndex p : net.rules[r].inputs)
            out += "  p_" + net.params[p].id + " -> r_" + net.rules[r].id + ";\n";
        for (ParamIndex p : net.rules[r].outputs)
            out += "  r_" + net.rules[r].id + " -> p_" + net.params[p].id + ";\n";
    }
    out += "}\n";
    return out;
}

}  // namespace mivar
