#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "autopkg/graph.hpp"

using namespace autopkg;

namespace {

// A small hand-enumerated catalog slice used across several tests:
//   ProductType "Desktop Computer" with keys Brand / RAM / Color,
//   two products typed to it, values attached under each key.
struct DesktopFixture {
    Graph g;
    NodeId type, brand, ram, color;
    NodeId p1, p2;
    NodeId v_brand, v_ram16, v_ram32, v_black;

    DesktopFixture() {
        type = g.add_node(NodeKind::ProductType, "Desktop Computer",
                          "Tower-style personal computer.");
        brand = g.add_node(NodeKind::AttributeKey, "Brand");
        ram = g.add_node(NodeKind::AttributeKey, "RAM");
        color = g.add_node(NodeKind::AttributeKey, "Color");
        g.add_edge(type, EdgeKind::HasKey, brand);
        g.add_edge(type, EdgeKind::HasKey, ram);
        g.add_edge(type, EdgeKind::HasKey, color);

        p1 = g.add_node(NodeKind::Product, "L0001", "Quanta tower PC");
        p2 = g.add_node(NodeKind::Product, "L0002", "Orion compact PC");
        g.add_edge(p1, EdgeKind::OfType, type);
        g.add_edge(p2, EdgeKind::OfType, type);

        v_brand = g.add_node(NodeKind::Value, "Quanta");
        v_ram16 = g.add_node(NodeKind::Value, "16 GB");
        v_ram32 = g.add_node(NodeKind::Value, "32 GB");
        v_black = g.add_node(NodeKind::Value, "Black");
        g.add_edge(brand, EdgeKind::HasValue, v_brand);
        g.add_edge(ram, EdgeKind::HasValue, v_ram16);
        g.add_edge(ram, EdgeKind::HasValue, v_ram32);
        g.add_edge(color, EdgeKind::HasValue, v_black);

        g.add_edge(p1, EdgeKind::HasAttribute, v_brand);
        g.add_edge(p1, EdgeKind::HasAttribute, v_ram16);
        g.add_edge(p2, EdgeKind::HasAttribute, v_ram32);
        g.add_edge(p2, EdgeKind::HasAttribute, v_black);
    }
};

} // namespace

TEST_CASE("node addition and duplicate detection") {
    Graph g;
    NodeId a = g.add_node(NodeKind::ProductType, "Wall Anchor");
    CHECK(g.exists(a));
    CHECK(g.node(a).name == "Wall Anchor");
    CHECK(g.node(a).normalized_name == "wall anchor");

    CHECK_THROWS_AS(g.add_node(NodeKind::ProductType, "wall  ANCHOR"), Error);
    try {
        g.add_node(NodeKind::ProductType, "wall  ANCHOR");
        FAIL("expected DuplicateName");
    } catch (const Error& ex) {
        CHECK(ex.code() == Errc::DuplicateName);
    }
    // The same label under a different kind is a different namespace.
    CHECK_NOTHROW(g.add_node(NodeKind::Value, "Wall Anchor"));
    CHECK_THROWS_AS(g.add_node(NodeKind::ProductType, "   "), Error);
}

TEST_CASE("synonyms claim labels for their node") {
    Graph g;
    NodeId a = g.add_node(NodeKind::ProductType, "Wall Anchor", std::nullopt, {"Wall Anchors"});
    CHECK(g.find(NodeKind::ProductType, "wall anchors") == a);
    CHECK(g.find(NodeKind::ProductType, "WALL ANCHOR") == a);
    CHECK_FALSE(g.find(NodeKind::ProductType, "drywall plug").has_value());

    // A second node may not claim the synonym.
    try {
        g.add_node(NodeKind::ProductType, "Drywall Plug", std::nullopt, {"wall anchors"});
        FAIL("expected CrossNodeConflict");
    } catch (const Error& ex) {
        CHECK(ex.code() == Errc::CrossNodeConflict);
    }

    SECTION("add_synonym is idempotent for own labels") {
        CHECK_FALSE(g.add_synonym(a, "Wall Anchor"));
        CHECK_FALSE(g.add_synonym(a, "wall anchors"));
        CHECK(g.add_synonym(a, "Expansion Anchor"));
        CHECK(g.find(NodeKind::ProductType, "expansion  anchor") == a);
    }

    SECTION("synonyms equal to the name are skipped at creation") {
        NodeId b = g.add_node(NodeKind::ProductType, "Toggle Bolt", std::nullopt,
                              {"toggle bolt", "Toggle Bolts", "Toggle Bolts"});
        CHECK(g.node(b).synonyms == std::vector<std::string>{"Toggle Bolts"});
    }
}

TEST_CASE("replace_label demotes the old name to a synonym") {
    Graph g;
    NodeId a = g.add_node(NodeKind::AttributeKey, "colour");
    g.replace_label(a, "Color");
    CHECK(g.node(a).name == "Color");
    CHECK(g.node(a).synonyms == std::vector<std::string>{"colour"});
    CHECK(g.find(NodeKind::AttributeKey, "colour") == a);
    CHECK(g.find(NodeKind::AttributeKey, "color") == a);

    SECTION("casing refresh keeps synonym list unchanged") {
        g.replace_label(a, "COLOR");
        CHECK(g.node(a).name == "COLOR");
        CHECK(g.node(a).synonyms == std::vector<std::string>{"colour"});
    }

    SECTION("promoting an existing synonym removes its synonym entry") {
        g.replace_label(a, "colour"); // back to the demoted label
        CHECK(g.node(a).name == "colour");
        CHECK(g.node(a).synonyms == std::vector<std::string>{"Color"});
    }

    SECTION("labels owned by another node are rejected") {
        g.add_node(NodeKind::AttributeKey, "Hue");
        try {
            g.replace_label(a, "hue");
            FAIL("expected CrossNodeConflict");
        } catch (const Error& ex) {
            CHECK(ex.code() == Errc::CrossNodeConflict);
        }
    }
}

TEST_CASE("edge schema enforcement") {
    DesktopFixture f;
    Graph& g = f.g;

    SECTION("kind table") {
        try {
            g.add_edge(f.type, EdgeKind::OfType, f.type);
            FAIL("expected KindMismatch");
        } catch (const Error& ex) {
            CHECK(ex.code() == Errc::KindMismatch);
        }
        CHECK_THROWS_AS(g.add_edge(f.brand, EdgeKind::HasKey, f.ram), Error);
        CHECK_THROWS_AS(g.add_edge(f.p1, EdgeKind::HasValue, f.v_brand), Error);
        CHECK_THROWS_AS(g.add_edge(f.v_brand, EdgeKind::HasAttribute, f.p1), Error);
    }

    SECTION("duplicate edges are no-ops") {
        CHECK_FALSE(g.add_edge(f.p1, EdgeKind::OfType, f.type));
        CHECK_FALSE(g.add_edge(f.brand, EdgeKind::HasValue, f.v_brand));
        CHECK(g.edge_count() == 13);
    }

    SECTION("a product types once") {
        NodeId other = g.add_node(NodeKind::ProductType, "Workstation");
        try {
            g.add_edge(f.p1, EdgeKind::OfType, other);
            FAIL("expected DoubleTyping");
        } catch (const Error& ex) {
            CHECK(ex.code() == Errc::DoubleTyping);
        }
    }

    SECTION("a value belongs to exactly one key") {
        try {
            g.add_edge(f.color, EdgeKind::HasValue, f.v_brand);
            FAIL("expected DoubleTyping");
        } catch (const Error& ex) {
            CHECK(ex.code() == Errc::DoubleTyping);
        }
    }

    SECTION("attribute assertions require licensing via the type's keys") {
        NodeId stray_type = g.add_node(NodeKind::ProductType, "Shelf");
        NodeId stray_key = g.add_node(NodeKind::AttributeKey, "Shelf Depth");
        NodeId stray_val = g.add_node(NodeKind::Value, "30 cm");
        g.add_edge(stray_type, EdgeKind::HasKey, stray_key);
        g.add_edge(stray_key, EdgeKind::HasValue, stray_val);
        // p1 is a Desktop Computer; Shelf Depth is not in its schema.
        try {
            g.add_edge(f.p1, EdgeKind::HasAttribute, stray_val);
            FAIL("expected UnlicensedAssertion");
        } catch (const Error& ex) {
            CHECK(ex.code() == Errc::UnlicensedAssertion);
        }
        // An untyped product cannot assert anything.
        NodeId untyped = g.add_node(NodeKind::Product, "L9999", "mystery");
        CHECK_THROWS_AS(g.add_edge(untyped, EdgeKind::HasAttribute, f.v_black), Error);
        // A value whose key was never attached to any type is unlicensed too.
        NodeId orphan_key = g.add_node(NodeKind::AttributeKey, "Unattached");
        NodeId orphan_val = g.add_node(NodeKind::Value, "n/a value");
        g.add_edge(orphan_key, EdgeKind::HasValue, orphan_val);
        CHECK_THROWS_AS(g.add_edge(f.p1, EdgeKind::HasAttribute, orphan_val), Error);
    }

    SECTION("unknown endpoints") {
        try {
            g.add_edge(f.p1, EdgeKind::OfType, 999);
            FAIL("expected UnknownNode");
        } catch (const Error& ex) {
            CHECK(ex.code() == Errc::UnknownNode);
        }
    }
}

TEST_CASE("hand-enumerated fixture counts") {
    DesktopFixture f;
    GraphStats s = f.g.stats();
    CHECK(s.nodes[static_cast<int>(NodeKind::Product)] == 2);
    CHECK(s.nodes[static_cast<int>(NodeKind::ProductType)] == 1);
    CHECK(s.nodes[static_cast<int>(NodeKind::AttributeKey)] == 3);
    CHECK(s.nodes[static_cast<int>(NodeKind::Value)] == 4);
    CHECK(s.node_total() == 10);
    CHECK(s.edges[static_cast<int>(EdgeKind::OfType)] == 2);
    CHECK(s.edges[static_cast<int>(EdgeKind::HasKey)] == 3);
    CHECK(s.edges[static_cast<int>(EdgeKind::HasValue)] == 4);
    CHECK(s.edges[static_cast<int>(EdgeKind::HasAttribute)] == 4);
    CHECK(s.edge_total() == 13);

    CHECK(f.g.type_of_product(f.p1) == f.type);
    CHECK(f.g.key_of_value(f.v_ram16) == f.ram);
    CHECK(f.g.keys_of_type(f.type) == std::vector<NodeId>{f.brand, f.ram, f.color});
    CHECK(f.g.values_of_key(f.ram) == std::vector<NodeId>{f.v_ram16, f.v_ram32});
    CHECK(f.g.attributes_of_product(f.p2) == std::vector<NodeId>{f.v_ram32, f.v_black});
    CHECK(f.g.validate().empty());
}

TEST_CASE("key insertion order is preserved per type") {
    Graph g;
    NodeId t = g.add_node(NodeKind::ProductType, "Desk Lamp");
    std::vector<NodeId> keys;
    for (const char* name : {"Brand", "Power", "Color", "Material", "Height"}) {
        NodeId k = g.add_node(NodeKind::AttributeKey, name);
        g.add_edge(t, EdgeKind::HasKey, k);
        keys.push_back(k);
    }
    CHECK(g.keys_of_type(t) == keys);
}

TEST_CASE("audit records get sequential ids and default timestamps") {
    Graph g;
    AuditRecord r;
    r.kind = NodeKind::ProductType;
    r.candidate = "Wall Anchor";
    r.action = "ADD";
    r.backend = "rule";
    std::uint64_t s1 = g.append_audit(r).seq;
    std::uint64_t s2 = g.append_audit(r).seq;
    CHECK(s2 == s1 + 1);
    CHECK(g.audit().size() == 2);
    CHECK(g.audit()[0].timestamp == s1); // logical clock defaults to seq
}

TEST_CASE("snapshot round-trip is byte-stable and structurally faithful") {
    DesktopFixture f;
    f.g.add_synonym(f.color, "Colour");
    AuditRecord r;
    r.kind = NodeKind::Value;
    r.candidate = "16GB";
    r.action = "MERGE";
    r.target = f.v_ram16;
    r.backend = "rule";
    r.note = "unit variant";
    f.g.append_audit(r);

    std::string s1 = f.g.serialize();
    Graph g2 = Graph::deserialize(s1);
    std::string s2 = g2.serialize();
    CHECK(s1 == s2);

    CHECK(g2.node_count() == f.g.node_count());
    CHECK(g2.edge_count() == f.g.edge_count());
    CHECK(g2.node(f.color).synonyms == std::vector<std::string>{"Colour"});
    CHECK(g2.audit().size() == 1);
    CHECK(g2.audit()[0].target == f.v_ram16);
    CHECK(g2.validate().empty());

    // New ids continue after the loaded range.
    NodeId fresh = g2.add_node(NodeKind::Value, "Silver");
    CHECK(fresh > f.v_black);
}

TEST_CASE("snapshot parser rejects malformed input") {
    CHECK_THROWS_AS(Graph::deserialize("not json"), Error);
    try {
        Graph::deserialize("{\"}");
        FAIL("expected ParseError");
    } catch (const Error& ex) {
        CHECK(ex.code() == Errc::ParseError);
    }

    DesktopFixture f;
    ojson j = f.g.to_json();
    SECTION("wrong version") {
        j["meta"]["format_version"] = 99;
        CHECK_THROWS_AS(Graph::deserialize(j.dump()), Error);
    }
    SECTION("unknown node kind") {
        j["nodes"][0]["kind"] = "Gadget";
        CHECK_THROWS_AS(Graph::deserialize(j.dump()), Error);
    }
    SECTION("node id outside the allocated range") {
        j["meta"]["next_id"] = 1;
        CHECK_THROWS_AS(Graph::deserialize(j.dump()), Error);
    }
    SECTION("edge referencing a missing node") {
        j["edges"].push_back({{"src", 4242}, {"kind", "of_type"}, {"dst", 1}});
        CHECK_THROWS_AS(Graph::deserialize(j.dump()), Error);
    }
}

TEST_CASE("validate is clean under randomized legal construction") {
    std::mt19937_64 rng(99);
    for (int round = 0; round < 20; ++round) {
        Graph g;
        std::vector<NodeId> types, keys, values, products;
        int ops = 120;
        for (int i = 0; i < ops; ++i) {
            switch (rng() % 8) {
                case 0:
                    types.push_back(
                        g.add_node(NodeKind::ProductType, "type " + std::to_string(rng())));
                    break;
                case 1:
                    keys.push_back(
                        g.add_node(NodeKind::AttributeKey, "key " + std::to_string(rng())));
                    break;
                case 2:
                    if (!keys.empty()) {
                        NodeId v =
                            g.add_node(NodeKind::Value, "value " + std::to_string(rng()));
                        g.add_edge(keys[rng() % keys.size()], EdgeKind::HasValue, v);
                        values.push_back(v);
                    }
                    break;
                case 3:
                    if (!types.empty()) {
                        NodeId p = g.add_node(NodeKind::Product, "P" + std::to_string(rng()),
                                              "listing");
                        g.add_edge(p, EdgeKind::OfType, types[rng() % types.size()]);
                        products.push_back(p);
                    }
                    break;
                case 4:
                    if (!types.empty() && !keys.empty())
                        g.add_edge(types[rng() % types.size()], EdgeKind::HasKey,
                                   keys[rng() % keys.size()]);
                    break;
                case 5:
                    if (!products.empty() && !values.empty()) {
                        NodeId p = products[rng() % products.size()];
                        NodeId v = values[rng() % values.size()];
                        auto t = g.type_of_product(p);
                        auto k = g.key_of_value(v);
                        if (t && k) {
                            auto tk = g.keys_of_type(*t);
                            if (std::find(tk.begin(), tk.end(), *k) != tk.end())
                                g.add_edge(p, EdgeKind::HasAttribute, v);
                        }
                    }
                    break;
                case 6:
                    if (!types.empty())
                        g.add_synonym(types[rng() % types.size()],
                                      "alias " + std::to_string(rng()));
                    break;
                default:
                    if (!values.empty() && rng() % 3 == 0) {
                        NodeId v = values[rng() % values.size()];
                        std::string fresh = "renamed " + std::to_string(rng());
                        g.replace_label(v, fresh);
                    }
                    break;
            }
        }
        auto problems = g.validate();
        CAPTURE(round, problems);
        CHECK(problems.empty());
        Graph reloaded = Graph::deserialize(g.serialize());
        CHECK(reloaded.serialize() == g.serialize());
    }
}
