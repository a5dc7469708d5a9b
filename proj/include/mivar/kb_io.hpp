#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include "mivar/inference.hpp"
#include "mivar/net.hpp"

namespace mivar {

/// Id-allocation counters persisted alongside a knowledge base.
struct KbMetadata {
    std::int64_t next_param_inc = 1;
    std::int64_t next_rule_inc = 1;

    bool operator==(const KbMetadata&) const = default;
};

struct KbFile {
    MivarNet net;
    KbMetadata metadata;
};

/// Counters one past the largest numeric id suffix in the net.
KbMetadata derive_metadata(const MivarNet& net);

/// XML knowledge-base format:
///   <?xml version="1.0" encoding="UTF-8" ?>
///   <root>
///     <parametr>  <parametr id value description /> ... </parametr>
///     <rules>     <rule id resultId initId value description /> ... </rules>
///     <metadata>  <idParametr inc /> <idRule inc /> </metadata>
///   </root>
/// The element name `parametr` is the format's historical spelling and is
/// preserved verbatim in both directions. initId/resultId are comma-
/// separated id lists; a rule's value holds one expression per output,
/// semicolon-separated. All listed attributes are required (a parameter's
/// value may be the empty string, meaning no stored value). Unknown extra
/// attributes are ignored on read and never written.
///
/// The reader is streaming: it never materializes the whole document.
/// Throws Error(xml_error) on malformed XML and Error(schema_error) on
/// shape violations, with the element path in the message.
KbFile parse_kb(std::istream& in);
KbFile parse_kb(std::string_view text);

void write_kb(std::ostream& out, const MivarNet& net, const KbMetadata& meta);
std::string write_kb(const MivarNet& net, const KbMetadata& meta);

/// Plain-line sibling format for multi-million-rule nets:
///   #mivar-tsv 1
///   P<tab>id<tab>value<tab>description
///   R<tab>id<tab>initId-csv<tab>resultId-csv<tab>expr<tab>description
/// Tab, newline, and backslash inside fields are escaped \t \n \\.
/// Carries no id counters; parse_tsv derives metadata from the ids.
KbFile parse_tsv(std::istream& in);
KbFile parse_tsv(std::string_view text);

void write_tsv(std::ostream& out, const MivarNet& net);
std::string write_tsv(const MivarNet& net);

enum class NetFileFormat { xml, tsv };

/// Reads a net file, deciding the format from its first line.
KbFile read_net_file(const std::string& path);
void write_net_file(const std::string& path, const MivarNet& net, const KbMetadata& meta,
                    NetFileFormat format);

/// Solution graph in DOT form: only the parameters and rules on the path
/// (plus the query endpoints); parameter nodes are pink ellipses, rule
/// nodes orange boxes; given parameters ranked at the top, found ones at
/// the bottom.
std::string export_dot(const MivarNet& net, const SolutionPath& solution, const Query& query);

}  // namespace mivar
