#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <variant>

#include "helpers.hpp"
#include "mivar/error.hpp"
#include "mivar/expr.hpp"
#include "mivar/genbench.hpp"
#include "mivar/kb_io.hpp"

using namespace mivar;
using namespace mivar::testing;

namespace {

std::string fixture_path(const std::string& name) {
    return std::string(MIVAR_FIXTURE_DIR) + "/" + name;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

errc parse_fails_with(const std::string& text) {
    try {
        parse_kb(text);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected a parse failure");
    return errc::parse_error;
}

}  // namespace

TEST_CASE("triangle fixture parses to the expected net") {
    const KbFile kb = parse_kb(slurp(fixture_path("triangle.xml")));
    CHECK(kb.net.n() == 3);
    CHECK(kb.net.m() == 3);
    CHECK(kb.net.params[0].id == "P1");
    CHECK(kb.net.params[0].stored_value == 0.0);
    CHECK(kb.net.params[0].description == "angle A, degrees");
    REQUIRE(kb.net.rules.size() == 3);
    CHECK(kb.net.rules[0].id == "R1");
    CHECK((kb.net.rules[0].inputs == std::vector<ParamIndex>{1, 2}));
    CHECK(kb.net.rules[0].outputs == std::vector<ParamIndex>{0});
    CHECK(to_string(kb.net.rules[0].expressions[0]) == "180-P2-P3");
    CHECK(kb.metadata.next_param_inc == 33);
    CHECK(kb.metadata.next_rule_inc == 161);
}

TEST_CASE("round-trip is the identity on structure and metadata") {
    for (const char* name : {"triangle.xml", "worked_example.xml"}) {
        CAPTURE(name);
        const KbFile original = parse_kb(slurp(fixture_path(name)));
        const std::string text = write_kb(original.net, original.metadata);
        const KbFile reparsed = parse_kb(text);
        CHECK(reparsed.net == original.net);
        CHECK(reparsed.metadata == original.metadata);
    }
}

TEST_CASE("the historical element spelling is preserved") {
    const KbFile kb = parse_kb(slurp(fixture_path("triangle.xml")));
    const std::string text = write_kb(kb.net, kb.metadata);
    CHECK(text.find("<parametr>") != std::string::npos);
    CHECK(text.find("<parametr id=\"P1\"") != std::string::npos);
    CHECK(text.find("parameter") == std::string::npos);
    CHECK(text.rfind("<?xml version=\"1.0\" encoding=\"UTF-8\" ?>", 0) == 0);
}

TEST_CASE("empty containers round-trip") {
    NetBuilder b;
    const MivarNet net = std::move(b).finish();
    const std::string text = write_kb(net, KbMetadata{1, 1});
    const KbFile reparsed = parse_kb(text);
    CHECK(reparsed.net.n() == 0);
    CHECK(reparsed.net.m() == 0);
    CHECK((reparsed.metadata == KbMetadata{1, 1}));

    // Self-closing containers are accepted too.
    const KbFile kb = parse_kb(std::string_view(
        "<root><parametr/><rules/><metadata><idParametr inc=\"1\"/><idRule inc=\"1\"/>"
        "</metadata></root>"));
    CHECK(kb.net.n() == 0);
}

TEST_CASE("attribute content is escaped and restored") {
    NetBuilder b;
    b.add_param({"P1", "a<b & \"c\" 'd'\tz", std::nullopt});
    b.add_param({"P2", "", 1.5});
    b.add_rule({"R1", {"P1"}, {"P2"}, {parse_expr("P1*2")}, "десять > 9"});
    const MivarNet net = std::move(b).finish();
    const KbFile reparsed = parse_kb(write_kb(net, KbMetadata{3, 2}));
    CHECK(reparsed.net == net);
    CHECK(reparsed.net.params[0].description == "a<b & \"c\" 'd'\tz");
    CHECK(reparsed.net.params[1].stored_value == 1.5);
}

TEST_CASE("entity and character references decode") {
    const KbFile kb = parse_kb(std::string_view(
        "<root><parametr>"
        "<parametr id=\"P1\" value=\"\" description=\"&lt;&gt;&amp;&quot;&apos;&#65;&#x41;\"/>"
        "</parametr><rules/><metadata><idParametr inc=\"1\"/><idRule inc=\"1\"/></metadata>"
        "</root>"));
    CHECK(kb.net.params[0].description == "<>&\"'AA");
}

TEST_CASE("schema violations are rejected with locations") {
    const std::string ok =
        "<root><parametr>"
        "<parametr id=\"P1\" value=\"\" description=\"\"/>"
        "<parametr id=\"P2\" value=\"\" description=\"\"/>"
        "</parametr><rules>"
        "<rule id=\"R1\" resultId=\"P2\" initId=\"P1\" value=\"P1+1\" description=\"\"/>"
        "</rules><metadata><idParametr inc=\"2\"/><idRule inc=\"1\"/></metadata></root>";
    CHECK_NOTHROW(parse_kb(std::string_view(ok)));

    // Each required attribute must be present.
    for (const char* cut :
         {" id=\"P1\"", " value=\"\" description=\"\"/><parametr id=\"P2\"",
          " resultId=\"P2\"", " initId=\"P1\"", " value=\"P1+1\"", " inc=\"2\""}) {
        std::string broken = ok;
        const std::size_t at = broken.find(cut);
        REQUIRE(at != std::string::npos);
        broken.erase(at, std::string(cut).size());
        CAPTURE(cut);
        CHECK(parse_fails_with(broken) == errc::schema_error);
    }

    // Structural damage.
    CHECK(parse_fails_with("<root><rules/></root>") == errc::schema_error);
    CHECK(parse_fails_with("<notroot/>") == errc::schema_error);
    CHECK(parse_fails_with(
              "<root><parametr/><rules/><metadata><idRule inc=\"1\"/>"
              "<idParametr inc=\"1\"/></metadata></root>") == errc::schema_error);

    // Content violating net invariants is a schema error with the location.
    std::string bad_ref = ok;
    bad_ref.replace(bad_ref.find("initId=\"P1\""), 11, "initId=\"P9\"");
    try {
        parse_kb(bad_ref);
        FAIL("expected schema_error");
    } catch (const Error& e) {
        CHECK(e.code() == errc::schema_error);
        CHECK(std::string(e.what()).find("root/rules/rule[1]") != std::string::npos);
    }

    // Expression variables must come from initId.
    std::string bad_expr = ok;
    bad_expr.replace(bad_expr.find("value=\"P1+1\""), 12, "value=\"P2+1\"");
    CHECK(parse_fails_with(bad_expr) == errc::schema_error);

    // Metadata counters may not trail the id suffixes.
    std::string low_inc = ok;
    low_inc.replace(low_inc.find("<idParametr inc=\"2\"/>"), 21, "<idParametr inc=\"1\"/>");
    CHECK(parse_fails_with(low_inc) == errc::schema_error);

    std::string bad_value = ok;
    bad_value.replace(bad_value.find("value=\"\" description=\"\"/><parametr id=\"P2\""), 8,
                      "value=\"x1\"");
    CHECK(parse_fails_with(bad_value) == errc::schema_error);
}

TEST_CASE("malformed XML is an xml error, not a crash") {
    CHECK(parse_fails_with("") == errc::schema_error);  // empty: no root element
    CHECK(parse_fails_with("<root") == errc::xml_error);
    CHECK(parse_fails_with("<root><parametr></root>") == errc::schema_error);
    CHECK(parse_fails_with("<root>&nope;</root>") == errc::xml_error);
    CHECK(parse_fails_with("<root attr=novalue></root>") == errc::xml_error);
    CHECK(parse_fails_with("stray text") == errc::xml_error);
    // A self-closed root fails on the missing containers before the second
    // root element is ever reached.
    CHECK(parse_fails_with("<root/><root/>") == errc::schema_error);
    CHECK(parse_fails_with("<root><parametr/><rules/><metadata><idParametr inc=\"1\"/>"
                           "<idRule inc=\"1\"/></metadata></root><root/>") == errc::xml_error);
    CHECK(parse_fails_with("<root a=\"1\" a=\"2\"/>") == errc::xml_error);
}

TEST_CASE("prolog, comments, and whitespace are tolerated") {
    const KbFile kb = parse_kb(std::string_view(
        "<?xml version=\"1.0\" encoding=\"UTF-8\" ?>\n"
        "<!-- a comment -->\n<root>\n  <parametr>\n"
        "    <parametr id=\"P1\" value=\"2.5\" description=\"x\" />\n"
        "  </parametr>\n  <!-- more -->\n  <rules></rules>\n"
        "  <metadata><idParametr inc=\"7\" /><idRule inc=\"1\" /></metadata>\n"
        "</root>\n"));
    CHECK(kb.net.n() == 1);
    CHECK(kb.net.params[0].stored_value == 2.5);
    CHECK(kb.metadata.next_param_inc == 7);
}

TEST_CASE("tsv round-trip") {
    const KbFile kb = parse_kb(slurp(fixture_path("worked_example.xml")));
    const std::string text = write_tsv(kb.net);
    CHECK(text.rfind("#mivar-tsv 1\n", 0) == 0);
    const KbFile reparsed = parse_tsv(text);
    CHECK(reparsed.net == kb.net);
    CHECK(reparsed.metadata.next_param_inc == 9);
    CHECK(reparsed.metadata.next_rule_inc == 4);
}

TEST_CASE("tsv escaping") {
    NetBuilder b;
    b.add_param({"P1", "tab\there\nand\\slash", 0.25});
    b.add_param({"P2", "", std::nullopt});
    b.add_rule({"R1", {"P1"}, {"P2"}, {parse_expr("P1")}, "d\te"});
    const MivarNet net = std::move(b).finish();
    const KbFile reparsed = parse_tsv(write_tsv(net));
    CHECK(reparsed.net == net);
    CHECK(reparsed.net.params[0].description == "tab\there\nand\\slash");
}

TEST_CASE("tsv rejects malformed input") {
    auto fails = [](const std::string& text) {
        try {
            parse_tsv(text);
        } catch (const Error& e) {
            return e.code();
        }
        FAIL("expected a parse failure");
        return errc::parse_error;
    };
    CHECK(fails("") == errc::schema_error);
    CHECK(fails("#mivar-tsv 2\n") == errc::schema_error);
    CHECK(fails("#mivar-tsv 1\nQ\tx\n") == errc::schema_error);
    CHECK(fails("#mivar-tsv 1\nP\tP1\t\n") == errc::schema_error);            // 3 fields
    CHECK(fails("#mivar-tsv 1\nP\tP1\t\t\nR\tR1\tP1\tP1\tP1\t\n") == errc::schema_error);
    CHECK(fails("#mivar-tsv 1\nP\tP1\t\tbad\\q\n") == errc::schema_error);
    // Comments and blank lines are fine.
    CHECK_NOTHROW(parse_tsv(std::string_view("#mivar-tsv 1\n\n# note\nP\tP1\t\t\n")));
}

TEST_CASE("read_net_file sniffs the format") {
    const KbFile kb = parse_kb(slurp(fixture_path("triangle.xml")));
    const std::string xml_path = "/tmp/mivar_test_sniff.xml";
    const std::string tsv_path = "/tmp/mivar_test_sniff.tsv";
    write_net_file(xml_path, kb.net, kb.metadata, NetFileFormat::xml);
    write_net_file(tsv_path, kb.net, kb.metadata, NetFileFormat::tsv);
    CHECK(read_net_file(xml_path).net == kb.net);
    CHECK(read_net_file(tsv_path).net == kb.net);
    std::remove(xml_path.c_str());
    std::remove(tsv_path.c_str());
    CHECK_THROWS_AS(read_net_file("/tmp/mivar_no_such_file.xml"), Error);
}

TEST_CASE("metadata derivation uses the largest id suffix") {
    GenSpec spec;
    spec.n_objects = 5;
    const MivarNet net = generate_chain(spec);
    const KbMetadata meta = derive_metadata(net);
    CHECK(meta.next_param_inc == 6);
    CHECK(meta.next_rule_inc == 10);
}

TEST_CASE("dot export of the triangle solution") {
    const KbFile kb = parse_kb(slurp(fixture_path("triangle.xml")));
    const Query query = make_query(
        kb.net, std::vector<std::pair<std::string, double>>{{"P2", 60.0}, {"P3", 60.0}},
        std::vector<std::string>{"P1"});
    auto outcome = solve(kb.net, query);
    const Solution& solution = std::get<Solution>(outcome);
    const std::string dot = export_dot(kb.net, solution.path, query);

    CHECK(dot_syntax_ok(dot));
    for (const char* needle :
         {"p_P1 [label=\"P1\" shape=ellipse style=filled fillcolor=pink];",
          "r_R1 [label=\"R1\" shape=box style=filled fillcolor=orange];",
          "{ rank=source; p_P2; p_P3; }", "{ rank=sink; p_P1; }", "p_P2 -> r_R1;",
          "p_P3 -> r_R1;", "r_R1 -> p_P1;"}) {
        CAPTURE(needle);
        CHECK(dot.find(needle) != std::string::npos);
    }
    // Exactly one rule node and three edges.
    CHECK(dot.find("r_R2") == std::string::npos);
    std::size_t edges = 0;
    for (std::size_t at = dot.find("->"); at != std::string::npos; at = dot.find("->", at + 1))
        ++edges;
    CHECK(edges == 3);
}

TEST_CASE("dot export with an empty path keeps the query nodes") {
    const KbFile kb = parse_kb(slurp(fixture_path("triangle.xml")));
    Query query;
    query.given = {{0, 1.0}};
    query.find = {2};
    const std::string dot = export_dot(kb.net, SolutionPath{}, query);
    CHECK(dot_syntax_ok(dot));
    CHECK(dot.find("p_P1") != std::string::npos);
    CHECK(dot.find("p_P3") != std::string::npos);
    CHECK(dot.find("p_P2") == std::string::npos);
    CHECK(dot.find("->") == std::string::npos);
}

TEST_CASE("random nets round-trip through both formats") {
    std::mt19937 rng(4242);
    for (int iteration = 0; iteration < 30; ++iteration) {
        const MivarNet net = random_net(rng, 12, 16);
        CAPTURE(iteration);
        const KbMetadata meta = derive_metadata(net);
        const KbFile via_xml = parse_kb(write_kb(net, meta));
        CHECK(via_xml.net == net);
        CHECK(via_xml.metadata == meta);
        const KbFile via_tsv = parse_tsv(write_tsv(net));
        CHECK(via_tsv.net == net);
    }
}
