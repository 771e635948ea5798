#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "autopkg/candidate.hpp"
#include "autopkg/graph.hpp"
#include "autopkg/listing.hpp"
#include "autopkg/retrieval.hpp"

namespace autopkg::prompts {

// ---------------------------------------------------------------------------
// Templates. These are the exact texts shipped under assets/prompts/ (a test
// keeps the two in sync); placeholders are written as {name} and substituted
// by render(). Literal braces that are not placeholders (the JSON example in
// the value-extraction template) are left untouched because substitution only
// rewrites known keys.
// ---------------------------------------------------------------------------

inline constexpr std::string_view kKgdBasic = R"PROMPT(Instruction:
You are a product knowledge graph decision agent.

Relevant nodes from KG:
{pretty_nodes}

Node Type: {node_type}

Candidate: {pretty_candidate}

Choose one action from:
- ADD: Candidate is not in the KG and not a synonym of an existing node.
- MERGE: Candidate already exists in KG or is a synonym of an existing node, and the existing node name is the preferred form.
- REPLACE: Candidate is a synonym of an existing node, but the candidate name is the preferred or more standard form, so it should replace the existing node name.
- DISCARD: Candidate is invalid, vague, or unreliable.

Preferred Naming Rules:
- Use the most common international or scientific name unless the local name adds significant value.
- If candidate is clearer, more standard, or better aligned with naming conventions, choose REPLACE.
- If candidate is less standard or too narrow, use MERGE.
- Always preserve other name variants in synonyms.

Output format:
- For ADD or DISCARD: output only the action in uppercase.
- For MERGE or REPLACE: output the action in uppercase, followed by a space, then the node_id of the matched existing node.

Example outputs:
- MERGE 1749
- REPLACE 3943
- ADD
- DISCARD
)PROMPT";

inline constexpr std::string_view kKgdStrict = R"PROMPT(Instruction:
You are a product knowledge graph decision agent.

Goal:
Decide whether to ADD a new node, MERGE with an existing node, REPLACE an existing node name, or DISCARD the candidate.

Relevant nodes from KG:
{pretty_nodes}

Node Type: {node_type}

Candidate: {pretty_candidate}

Choose one action from:
- ADD: Candidate is a distinct concept not present in the KG.
- MERGE: Candidate is the SAME concept as an existing node (true synonym), and the existing node name is the preferred form.
- REPLACE: Candidate is the SAME concept as an existing node (true synonym), but the candidate name is the preferred/standard form and should replace the existing node name.
- DISCARD: Candidate is invalid, too vague, unreliable, or not a real concept for this Node Type.

STRICT SYNONYM POLICY (required for MERGE/REPLACE):
- Same meaning and scope (no broader/narrower relationship)
- Same real-world referent (can be substituted in a sentence without changing meaning)
- Same measurement basis/units/standards if applicable (e.g., ratings, units, dimensions)

DO NOT MERGE/REPLACE if any of the following is true:
- Candidate is related but not identical (association != synonymy)
- Candidate is a subtype/supertype, variant, feature level, or category of the existing node
- Candidate differs by metric vs attribute (e.g., "size" vs "dimensions"; "weight" vs "mass")
- Candidate differs by standard/rating/threshold (e.g., "splash resistant" vs a specific IP rating)
- Candidate differs by mechanism (e.g., over-voltage vs over-current vs surge vs thermal protection)
- Candidate is ambiguous while the existing node is specific, or vice versa

DISCARD RULES:
- Candidate is not a valid term for this Node Type
- Candidate is overly vague or marketing-only with no clear definition
- Candidate conflicts with common technical meaning or is unreliable

Preferred Naming Rules:
- Use the most common international or scientific name unless a local name adds value
- If candidate is clearer or more standard, choose REPLACE; otherwise MERGE
- Preserve other variants as synonyms (handled outside this decision)

Decision procedure:
1) Validate candidate (otherwise DISCARD)
2) Check each relevant KG node for strict synonymy
3) If a strict synonym match exists:
   - If existing name preferred -> MERGE with that node_id
   - If candidate name preferred -> REPLACE that node_id
4) If no strict synonym match exists -> ADD

Output format:
- For ADD or DISCARD: output only the action in uppercase
- For MERGE or REPLACE: output action + space + node_id

Example outputs:
- MERGE 1749
- REPLACE 3943
- ADD
- DISCARD
)PROMPT";

inline constexpr std::string_view kKgdNoDiscard = R"PROMPT(Instruction:
You are a product knowledge graph decision agent.

Goal:
Decide whether to ADD a new node, MERGE with an existing node, or REPLACE an existing node name.

Relevant nodes from KG:
{pretty_nodes}

Node Type: {node_type}

Candidate: {pretty_candidate}

Choose one action from:
- ADD: Candidate is a distinct concept not present in the KG.
- MERGE: Candidate is the SAME concept as an existing node (true synonym), and the existing node name is the preferred form.
- REPLACE: Candidate is the SAME concept as an existing node (true synonym), but the candidate name is the preferred/standard form and should replace the existing node name.

STRICT SYNONYM POLICY (required for MERGE/REPLACE):
- Same meaning and scope (no broader/narrower relationship)
- Same real-world referent (can be substituted in a sentence without changing meaning)
- Same measurement basis/units/standards if applicable (e.g., ratings, units, dimensions)

DO NOT MERGE/REPLACE if any of the following is true (choose ADD instead):
- Candidate is related but not identical (association != synonymy)
- Candidate is a subtype/supertype, variant, feature level, or category of the existing node
- Candidate differs by metric vs attribute (e.g., "size" vs "dimensions"; "weight" vs "mass")
- Candidate differs by standard/rating/threshold (e.g., "splash resistant" vs a specific IP rating unless explicitly defined as equivalent)
- Candidate differs by mechanism (e.g., over-voltage vs over-current vs surge vs thermal protection)
- Candidate is ambiguous while the existing node is specific, or vice versa

Preferred Naming Rules (apply only after synonymy is confirmed):
- Use the most common international or scientific name unless a local name adds significant value.
- If candidate is better to be a representative of synonyms, choose REPLACE; otherwise choose MERGE.
- Preserve other name variants as synonyms (handled outside this decision).

Decision procedure:
1. Evaluate candidate validity and relevance to Node Type.
2. Check each relevant KG node for strict synonymy using the STRICT SYNONYM POLICY.
3. If a strict synonym match exists:
   - If existing name preferred -> MERGE with that node_id
   - If candidate name preferred -> REPLACE that node_id
4. If no strict synonym match exists -> ADD

Output format:
- For ADD: output only ADD
- For MERGE or REPLACE: output the action in uppercase, followed by a space, then the node_id of the matched existing node

Example outputs:
- MERGE 1749
- REPLACE 3943
- ADD
)PROMPT";

inline constexpr std::string_view kTypeSuggestion = R"PROMPT(Instruction: Return the simplest, most general product type that accurately represents the item while ensuring clarity and avoiding ambiguity. Follow these rules:
- Remove brand names, model numbers, attributes, and marketing language.
- Eliminate redundant or situational descriptors.
- Standardize technical terms using widely accepted industry vocabulary.
- Abstract to the highest-level accurate category (e.g., "Chair" instead of "Office Chair").
- Use singular form, unless the product is commonly referred to in plural (e.g., "Scissors", "Pants", "Shoes").
- Return `None` for inputs that are unclear, ambiguous, or not valid products.
- If the input already meets all criteria, return it unchanged.

Additional Guidance:
- Contextual Clarity: Ensure the abstracted term maintains enough context to avoid ambiguity. For example, if the original product is clearly related to vehicles, use terms like "Vehicle Part" instead of just "Part."
- Specificity Check: If the most general term could refer to multiple unrelated categories (e.g., "Panel" could mean a house panel or a motorcycle panel), provide a more specific term that still fits the criteria (e.g., "Motorcycle Panel").

Your goal is to return the most common specific type that is still universally understood and accurately descriptive.
Provide only the product type in English, no extra text or explanation.

Title: {title}

Description: {description}

Specifications: {specifications}
)PROMPT";

inline constexpr std::string_view kKeyDiscovery = R"PROMPT(Instruction:
Generate a comprehensive table containing key product attributes.

The attributes must meet these criteria:
- Essential for both sellers and buyers
- Focused on inherent product characteristics (not logistics, packaging, or SEO)
- Based on industry standards or common e-commerce practices
- Includes visual and functional attributes that influence purchasing decisions

Table format:
- Attribute Name: Standard Attribute Name
- Description: What the attribute represents
- Examples: Examples of Standard Values (comprehensive)

Output constraints:
- Provide only the table, no extra text or explanation.
- Sort ALL attributes by importance from the buyer's perspective.
- Start with Brand as the top row, followed by other attributes in importance order.
- Use proper title case capitalization for all values in Attribute Name and Examples (e.g., Universal, Infrared, Lithium-Ion, not universal, infrared, lithium-ion).
- Provide values in examples at least 5 if applicable.
- Keep example values less than 10.

Product Type: {product_type}

Product Type Description:
{product_type_description}
)PROMPT";

inline constexpr std::string_view kValueExtraction = R"PROMPT(Instruction:
Given the table of attributes as a reference, extract relevant attributes from the provided input text and image. Return a JSON object containing only the attribute ids and their corresponding attribute values.
- Extract JSON of attribute id and its corresponding attribute value.
- For attributes that have multiple values, return a list of values.
- If an attribute is not mentioned or cannot be determined with confidence, return null for that attribute.
- You are not restricted to the specific values in the example table - if another value makes sense based on the input, feel free to use it.
- Cross-validate conflicting or ambiguous information between the text and image (e.g., if the text says "100% cotton" but the image shows a shiny fabric, consider whether it might be polyester or a blend).
- Resolve ambiguities or duplicate values by selecting the most appropriate one based on context and consistency (e.g., choosing between "L" and "Large" based on other entries or general conventions).
- Ensure the JSON output follows the structure and naming conventions shown in the example attribute table.
- Provide only the JSON, no extra text or explanation.

Simple Example:
- Input text: Brand: Philips. The machine body is made of ABS plastic and is available in White, Black, and Silver. It has an IP44 rating for basic dust and splash protection.
- Output JSON: {"123": "Philips", "124": "IP44", "125": "ABS Plastic", "126": ["White", "Black", "Silver"]}

Product Type: {product_type}

Product Type Description:
{product_type_description}

{attribute_table}

Title: {title}

Highlight: {highlights}

Description: {description}

Specifications: {specifications}
)PROMPT";

inline constexpr std::string_view kGtConstruction = R"PROMPT(Based on Product Description, extract relevant attribute name and its corresponding attribute value of this product, and Refer to the Hypotheses list when providing the answer. Be very accurate!

A. Task Description:

You are given 2 information sources. 1: Original Product Description; 2. A Hypotheses list of attributes and specifications under review, it is provided for you to review and judge after the Step1, at the Step2.

Step1: You should first independently determine the attributes of this product in an e-commerce context based on the product Description, providing this information to both buyers and sellers.
Then, you should fill in the values for these attributes based on the product information.

- Do not rely on *Hypotheses list of attributes and specifications under review* at this step, as they may be inaccurate and incomplete.

- Analyze only based on the Description in Step1.

Step2: Based on the Hypotheses list of attributes and specifications under review and the names/values you determined on the Step1:

- If the existing attribute names and values are correct -> Adopt them directly. Using the same words for correct name/values in Hypotheses list!

- If they are inaccurate -> Correct them.

- If they are incomplete -> Add new ones.

Step3: Output Only in Markdown table format like:

For a product Pen:

| Attribute Name         | Value                    |
| ---------------------- | ------------------------ |
| Writing Mechanism      | Retractable              |
| Ink Color              | Black                    |
| etc.                   | etc.                     |

B. Criteria:

The attributes names must meet these criteria:
- Focused on inherent product characteristics (not logistics, packaging, or SEO)
- Based on industry standards or common e-commerce practices
- Includes visual and functional attributes that influence purchasing decisions

The corresponding attributes values meet these criteria:
- For attributes that have multiple values, return a list of values.

C. Provided information:

1. Real Product Image and the Product Description you need to use:

Product Description:
{product_description}

2. Hypotheses list of attributes and specifications under review, it is provided for your reference:

{hypotheses}
)PROMPT";

struct Asset {
    const char* filename;
    std::string_view content;
};

inline std::vector<Asset> assets() {
    return {
        {"kgd_basic.txt", kKgdBasic},
        {"kgd_strict.txt", kKgdStrict},
        {"kgd_no_discard.txt", kKgdNoDiscard},
        {"type_suggestion.txt", kTypeSuggestion},
        {"key_discovery.txt", kKeyDiscovery},
        {"value_extraction.txt", kValueExtraction},
        {"gt_construction.txt", kGtConstruction},
    };
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

/// Replaces every "{key}" occurrence for the provided keys only; unknown
/// brace sequences pass through untouched. Single pass over the template, so
/// substituted text is never itself expanded.
inline std::string render(std::string_view tmpl, const std::map<std::string, std::string>& subs) {
    std::string out;
    out.reserve(tmpl.size());
    size_t pos = 0;
    while (pos < tmpl.size()) {
        size_t brace = tmpl.find('{', pos);
        if (brace == std::string_view::npos) {
            out.append(tmpl.substr(pos));
            break;
        }
        size_t close = tmpl.find('}', brace + 1);
        if (close == std::string_view::npos) {
            out.append(tmpl.substr(pos));
            break;
        }
        std::string key(tmpl.substr(brace + 1, close - brace - 1));
        auto it = subs.find(key);
        if (it != subs.end()) {
            out.append(tmpl.substr(pos, brace - pos));
            out.append(it->second);
            pos = close + 1;
        } else {
            out.append(tmpl.substr(pos, brace + 1 - pos));
            pos = brace + 1;
        }
    }
    return out;
}

/// Python-repr-style quoting, matching how neighbor context is shown to the
/// decision model: single quotes, backslash escapes.
inline std::string python_str(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 2);
    out.push_back('\'');
    for (char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\'': out += "\\'"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out.push_back(c);
        }
    }
    out.push_back('\'');
    return out;
}

inline std::string pretty_candidate(const Candidate& c) {
    std::string out = "{'node_name': " + python_str(c.name);
    if (c.description) out += ", 'description': " + python_str(*c.description);
    out += "}";
    return out;
}

/// Bracketed record list of retrieved neighbors with their graph metadata:
/// [{'node_id': 4587, 'node_name': 'Wall Anchors', 'description': '...',
///   'synonyms': ['Tie-down loops']}, ...]
inline std::string pretty_nodes(const Graph& g, const std::vector<ScoredNeighbor>& hits) {
    std::string out = "[";
    bool first = true;
    for (const auto& h : hits) {
        const CanonicalNode& n = g.node(h.id);
        if (!first) out += ", ";
        first = false;
        out += "{'node_id': " + std::to_string(n.id);
        out += ", 'node_name': " + python_str(n.name);
        if (n.description) out += ", 'description': " + python_str(*n.description);
        if (!n.synonyms.empty()) {
            out += ", 'synonyms': [";
            for (size_t i = 0; i < n.synonyms.size(); ++i) {
                if (i) out += ", ";
                out += python_str(n.synonyms[i]);
            }
            out += "]";
        }
        out += "}";
    }
    out += "]";
    return out;
}

inline std::string_view kgd_template(Policy p) {
    switch (p) {
        case Policy::Basic: return kKgdBasic;
        case Policy::Strict: return kKgdStrict;
        case Policy::NoDiscard: return kKgdNoDiscard;
    }
    return kKgdBasic;
}

inline std::string render_kgd(Policy policy, const Graph& g, const Candidate& cand,
                              const std::vector<ScoredNeighbor>& neighbors) {
    return render(kgd_template(policy), {
                                            {"pretty_nodes", pretty_nodes(g, neighbors)},
                                            {"node_type", node_kind_label(cand.kind)},
                                            {"pretty_candidate", pretty_candidate(cand)},
                                        });
}

inline std::string render_type_suggestion(const Listing& l) {
    return render(kTypeSuggestion, {
                                       {"title", l.title},
                                       {"description", l.description.value_or("")},
                                       {"specifications", specifications_json(l)},
                                   });
}

inline std::string render_key_discovery(std::string_view type_name, std::string_view type_desc) {
    return render(kKeyDiscovery, {
                                     {"product_type", std::string(type_name)},
                                     {"product_type_description", std::string(type_desc)},
                                 });
}

inline std::string attribute_table_markdown(const KeyTable& table) {
    std::string out = "| Attribute ID | Attribute Name | Description | Examples |\n"
                      "|--------------|----------------|-------------|----------|\n";
    for (const auto& row : table.rows) {
        std::string examples;
        for (size_t i = 0; i < row.examples.size(); ++i) {
            if (i) examples += ", ";
            examples += row.examples[i];
        }
        out += "| " + std::to_string(row.key_id) + " | " + row.name + " | " + row.description +
               " | " + examples + " |\n";
    }
    return out;
}

inline std::string render_value_extraction(std::string_view type_name, std::string_view type_desc,
                                           const KeyTable& table, const Listing& l) {
    return render(kValueExtraction,
                  {
                      {"product_type", std::string(type_name)},
                      {"product_type_description", std::string(type_desc)},
                      {"attribute_table", attribute_table_markdown(table)},
                      {"title", l.title},
                      {"highlights", l.highlights.value_or("")},
                      {"description", l.description.value_or("")},
                      {"specifications", specifications_json(l)},
                  });
}

inline std::string render_gt_construction(std::string_view product_description,
                                          std::string_view hypotheses) {
    return render(kGtConstruction, {
                                       {"product_description", std::string(product_description)},
                                       {"hypotheses", std::string(hypotheses)},
                                   });
}

} // namespace autopkg::prompts
