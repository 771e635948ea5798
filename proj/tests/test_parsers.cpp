#include <catch2/catch_amalgamated.hpp>

#include "autopkg/parsers.hpp"

using namespace autopkg;

TEST_CASE("type answers: bare names, quoting, and abstention") {
    CHECK(parse_type_answer("Pen Mouse") == "Pen Mouse");
    CHECK(parse_type_answer("  Pen Mouse  \n") == "Pen Mouse");
    CHECK(parse_type_answer("`Pen Mouse`") == "Pen Mouse");
    CHECK(parse_type_answer("\"Pen Mouse\"") == "Pen Mouse");
    CHECK(parse_type_answer("Pen Mouse.") == "Pen Mouse");

    CHECK_FALSE(parse_type_answer("None").has_value());
    CHECK_FALSE(parse_type_answer("`None`").has_value());
    CHECK_FALSE(parse_type_answer("none.").has_value());
}

TEST_CASE("type answers: rejection triggers the caller's retry") {
    auto code_of = [](const char* text) {
        try {
            parse_type_answer(text);
            return Errc::EmptyName; // placeholder: must not get here
        } catch (const Error& ex) {
            return ex.code();
        }
    };
    CHECK(code_of("") == Errc::ParseError);
    CHECK(code_of("   \n \n") == Errc::ParseError);
    CHECK(code_of("Let me think.\nIt looks like a Pen Mouse.") == Errc::ParseError);
    CHECK(code_of("The product type is: Pen Mouse") == Errc::ParseError);
    CHECK(code_of("{\"type\": \"Pen Mouse\"}") == Errc::ParseError);
    CHECK(code_of("| Pen Mouse |") == Errc::ParseError);
    CHECK(code_of("a very long rambling reply that clearly is not just a type name") ==
          Errc::ParseError);
}

TEST_CASE("markdown table row splitting") {
    CHECK(split_table_row("| a | b | c |") == std::vector<std::string>{"a", "b", "c"});
    CHECK(split_table_row("|a|b|") == std::vector<std::string>{"a", "b"});
    CHECK(split_table_row("  | padded |  cells | ") == std::vector<std::string>{"padded", "cells"});
    CHECK(split_table_row("|---|---|").empty());       // separator
    CHECK(split_table_row("| :--- | ---: |").empty()); // aligned separator
    CHECK(split_table_row("not a table line").empty());
    CHECK(split_table_row("").empty());
}

TEST_CASE("key table parsing reproduces the documented schema example") {
    std::string reply =
        "| Attribute Name | Description | Examples |\n"
        "|----------------|-------------|----------|\n"
        "| Brand | The Manufacturer Or Company That Produces The Product | Wacom, Apple, Huion, "
        "XP-Pen, Logitech |\n"
        "| Precision | The Level Of Accuracy And Responsiveness In Tracking Movement And Input | "
        "0.01 Mm, 0.05 Mm, 0.1 Mm, 0.2 Mm, 0.5 Mm |\n"
        "| Pressure Sensitivity | The Number Of Levels The Device Can Detect To Vary Line "
        "Thickness Or Opacity Based On Pen Pressure | 2048, 4096, 8192, 16384, 20480 |\n";

    std::vector<std::string> warnings;
    auto rows = parse_key_table(reply, &warnings);
    CHECK(warnings.empty());
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].name == "Brand");
    CHECK(rows[0].description == "The Manufacturer Or Company That Produces The Product");
    CHECK(rows[0].examples ==
          std::vector<std::string>{"Wacom", "Apple", "Huion", "XP-Pen", "Logitech"});
    CHECK(rows[1].name == "Precision");
    CHECK(rows[2].name == "Pressure Sensitivity");
    CHECK(rows[2].examples.size() == 5);
}

TEST_CASE("key table parsing tolerates chatty framing and bad rows") {
    std::string reply =
        "Sure! Here is the attribute table:\n"
        "\n"
        "| Attribute Name | Description | Examples |\n"
        "| --- | --- | --- |\n"
        "| Brand | Maker of the product | Apex, Orion |\n"
        "| MissingCells |\n"
        "|  | Empty name | a, b |\n"
        "| Color | Main color | Black, White |\n"
        "\n"
        "Let me know if you need more detail.\n";
    std::vector<std::string> warnings;
    auto rows = parse_key_table(reply, &warnings);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].name == "Brand");
    CHECK(rows[1].name == "Color");
    CHECK(warnings.size() == 2); // one per skipped row

    SECTION("a reply with no table at all is an error") {
        try {
            parse_key_table("I could not find any attributes.", nullptr);
            FAIL("expected TableParseError");
        } catch (const Error& ex) {
            CHECK(ex.code() == Errc::TableParseError);
        }
    }

    SECTION("a header-only table yields zero rows without error") {
        auto empty = parse_key_table("| Attribute Name | Description | Examples |\n|---|---|---|\n",
                                     nullptr);
        CHECK(empty.empty());
    }
}

TEST_CASE("value JSON parsing reproduces the documented extraction example") {
    // The battery-holder walkthrough: ten keys come back, one of them null.
    std::string reply =
        "{\n"
        "\"18392\": \"BLM\",\n"
        "\"18597\": \"18650\",\n"
        "\"19903\": 3,\n"
        "\"27091\": \"Series\",\n"
        "\"18809\": \"Nickel-Plated Brass\",\n"
        "\"18407\": \"Snap-In\",\n"
        "\"20066\": \"Positive Front\",\n"
        "\"18427\": \"-20°C to 70°C\",\n"
        "\"18724\": null,\n"
        "\"19542\": \"ABS Plastic\"\n"
        "}";
    std::set<NodeId> valid = {18392, 18597, 19903, 27091, 18809,
                              18407, 20066, 18427, 18724, 19542};
    std::vector<std::string> warnings;
    auto entries = parse_value_json(reply, valid, &warnings);
    CHECK(warnings.empty());

    size_t assertions = 0;
    for (const auto& e : entries) assertions += e.values.size();
    CHECK(assertions == 9); // the null key contributes nothing

    REQUIRE(entries.size() == 9);
    CHECK(entries[0].key_id == 18392);
    CHECK(entries[0].values == std::vector<std::string>{"BLM"});
    CHECK(entries[2].key_id == 19903);
    CHECK(entries[2].values == std::vector<std::string>{"3"}); // number cast to text
    CHECK(entries[7].values == std::vector<std::string>{"-20°C to 70°C"});
    for (const auto& e : entries) CHECK(e.key_id != 18724);
}

TEST_CASE("value JSON parsing: list values expand to one assertion each") {
    std::string reply =
        R"({"123": "Philips", "124": "IP44", "125": "ABS Plastic", "126": ["White", "Black", "Silver"]})";
    auto entries = parse_value_json(reply, {123, 124, 125, 126}, nullptr);
    REQUIRE(entries.size() == 4);
    CHECK(entries[3].key_id == 126);
    CHECK(entries[3].values == std::vector<std::string>{"White", "Black", "Silver"});
    size_t assertions = 0;
    for (const auto& e : entries) assertions += e.values.size();
    CHECK(assertions == 6);
}

TEST_CASE("value JSON parsing: fences, unknown ids, and malformed input") {
    SECTION("markdown fences and prose around the object are tolerated") {
        std::string reply = "Here you go:\n```json\n{\"5\": \"Red\"}\n```\nанything else?";
        auto entries = parse_value_json(reply, {5}, nullptr);
        REQUIRE(entries.size() == 1);
        CHECK(entries[0].values == std::vector<std::string>{"Red"});
    }

    SECTION("ids outside the offered table are dropped with a warning") {
        std::vector<std::string> warnings;
        auto entries = parse_value_json(R"({"5": "Red", "99": "Blue", "bogus": "Green"})", {5},
                                        &warnings);
        REQUIRE(entries.size() == 1);
        CHECK(entries[0].key_id == 5);
        CHECK(warnings.size() == 2);
    }

    SECTION("empty strings and empty lists contribute nothing") {
        auto entries = parse_value_json(R"({"5": "", "6": [], "7": ["  ", "Blue"]})", {5, 6, 7},
                                        nullptr);
        REQUIRE(entries.size() == 1);
        CHECK(entries[0].key_id == 7);
        CHECK(entries[0].values == std::vector<std::string>{"Blue"});
    }

    SECTION("booleans and nested objects become stable text") {
        auto entries =
            parse_value_json(R"({"5": true, "6": {"a": 1}})", {5, 6}, nullptr);
        REQUIRE(entries.size() == 2);
        CHECK(entries[0].values == std::vector<std::string>{"true"});
        CHECK(entries[1].values == std::vector<std::string>{"{\"a\":1}"});
    }

    SECTION("replies without a JSON object are errors") {
        auto code_of = [](const char* text) {
            try {
                parse_value_json(text, {1}, nullptr);
                return Errc::EmptyName; // placeholder: must not get here
            } catch (const Error& ex) {
                return ex.code();
            }
        };
        CHECK(code_of("no json here") == Errc::JsonParseError);
        CHECK(code_of("{broken") == Errc::JsonParseError);
        CHECK(code_of("[1, 2, 3]") == Errc::JsonParseError);
        CHECK(code_of("") == Errc::JsonParseError);
    }
}
