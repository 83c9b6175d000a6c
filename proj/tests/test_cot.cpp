#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flare/cot.hpp"
#include "flare/errors.hpp"
#include "support/fixtures.hpp"

using namespace flare;

namespace {

const char* kGoodTemplate =
    "template_id: sample_v1\n"
    "placeholders: Greeting, Name\n"
    "--- system ---\n"
    "Stay factual.\n"
    "--- user ---\n"
    "{Greeting}, {Name}!\n"
    "Sign off as {Name}.\n";

}  // namespace

TEST_CASE("template files parse into id, declarations and both sections") {
    const CoTTemplate tmpl = parse_template(kGoodTemplate);
    CHECK(tmpl.template_id == "sample_v1");
    CHECK(tmpl.placeholders == std::vector<std::string>{"Greeting", "Name"});
    CHECK(tmpl.system_text == "Stay factual.");
    // The file's single final newline is not part of the user text.
    CHECK(tmpl.user_text == "{Greeting}, {Name}!\nSign off as {Name}.");
}

TEST_CASE("template parsing rejects malformed files") {
    CHECK_THROWS_AS(parse_template("template_id: x\n--- user ---\nhi\n"), ConfigInvalid);
    CHECK_THROWS_AS(parse_template("template_id: x\n--- system ---\nhi\n"), ConfigInvalid);
    CHECK_THROWS_AS(
        parse_template("placeholders:\n--- system ---\ns\n--- user ---\nu\n"),
        ConfigInvalid);  // missing template_id
    CHECK_THROWS_AS(
        parse_template("template_id: x\nbogus_key: y\n--- system ---\ns\n--- user ---\nu\n"),
        ConfigInvalid);
    // A slot that was never declared.
    CHECK_THROWS_AS(
        parse_template("template_id: x\n--- system ---\ns\n--- user ---\n{Mystery}\n"),
        UnknownPlaceholder);
    // A declaration that never occurs.
    CHECK_THROWS_AS(
        parse_template(
            "template_id: x\nplaceholders: Used, Unused\n--- system ---\ns\n--- user ---\n{Used}\n"),
        ConfigInvalid);
}

TEST_CASE("placeholder scan keeps order and duplicates, skips malformed braces") {
    CHECK(find_placeholders("{B} then {A} then {B}") ==
          std::vector<std::string>{"B", "A", "B"});
    CHECK(find_placeholders("nothing here").empty());
    CHECK(find_placeholders("{not closed").empty());
    CHECK(find_placeholders("{has space}").empty());
    CHECK(find_placeholders("{}").empty());
    CHECK(find_placeholders("{With_Under_1}") == std::vector<std::string>{"With_Under_1"});
}

TEST_CASE("rendering substitutes every slot in a single pass") {
    const CoTTemplate tmpl = parse_template(kGoodTemplate);
    const RenderedPrompt prompt =
        render_template(tmpl, {{"Greeting", "Hello"}, {"Name", "Morgan"}});
    CHECK(prompt.system_text == "Stay factual.");
    CHECK(prompt.user_text == "Hello, Morgan!\nSign off as Morgan.");

    // A value containing a slot-shaped string is not rescanned.
    const RenderedPrompt nested =
        render_template(tmpl, {{"Greeting", "{Name}"}, {"Name", "Morgan"}});
    CHECK(nested.user_text == "{Name}, Morgan!\nSign off as Morgan.");

    // Unused extra values are ignored.
    const RenderedPrompt extra = render_template(
        tmpl, {{"Greeting", "Hi"}, {"Name", "Sam"}, {"Ignored", "value"}});
    CHECK(extra.user_text == "Hi, Sam!\nSign off as Sam.");

    CHECK_THROWS_AS(render_template(tmpl, {{"Greeting", "Hi"}}), MissingPlaceholderValue);
    CHECK_THROWS_AS(render_template(tmpl, {{"Greeting", "Hi"}, {"Name", ""}}),
                    MissingPlaceholderValue);
}

TEST_CASE("bundled templates parse and declare the expected slots") {
    const CoTTemplate threat = load_template(testsup::data_path("templates/threat.txt"));
    CHECK(threat.placeholders == std::vector<std::string>{"Survey"});
    const CoTTemplate risk = load_template(testsup::data_path("templates/risk.txt"));
    CHECK(risk.placeholders == std::vector<std::string>{"Perception", "Survey"});
    const CoTTemplate decision = load_template(testsup::data_path("templates/decision.txt"));
    CHECK(decision.placeholders == std::vector<std::string>{"Examples", "Risk", "Extras"});
    const CoTTemplate direct = load_template(testsup::data_path("templates/decision_direct.txt"));
    CHECK(direct.placeholders == std::vector<std::string>{"Examples", "Risk", "Extras"});
    const CoTTemplate reflect = load_template(testsup::data_path("templates/reflection.txt"));
    CHECK(reflect.placeholders == std::vector<std::string>{"Label"});
}

TEST_CASE("assembled instances keep the source blocks for audits") {
    const CoTTemplate decision = load_template(testsup::data_path("templates/decision.txt"));
    const CoTInstance instance =
        assemble_cot(decision, "r7", "risk text", "examples text", "extras text");
    CHECK(instance.record_id == "r7");
    CHECK(instance.risk_block == "risk text");
    CHECK(instance.examples_block == "examples text");
    CHECK(instance.extras_block == "extras text");
    CHECK(instance.rendered_system == decision.system_text);
    CHECK(instance.rendered_user.find("Previous Examples:\nexamples text") != std::string::npos);
    CHECK(instance.rendered_user.find("Risk Perception Summary:\nrisk text") !=
          std::string::npos);
    CHECK(instance.rendered_user.find("External information:\nextras text") != std::string::npos);
}

TEST_CASE("extras block joins notes then run inputs and defaults to None") {
    CHECK(render_extras_block({}, {}) == "None");
    CHECK(render_extras_block({"saw smoke"}, {}) == "saw smoke");
    CHECK(render_extras_block({"saw smoke", "power out"}, {"county alert"}) ==
          "saw smoke\npower out\ncounty alert");
    CHECK(render_extras_block({}, {"county alert"}) == "county alert");
}

TEST_CASE("decision parsing accepts exactly one standalone side") {
    const Decision yes = parse_decision("Step 1. Fire near. Final answer: YES.");
    CHECK(yes.value == DecisionValue::Evacuate);
    CHECK(yes.rationale_text == "Step 1. Fire near. Final answer: YES.");

    const Decision no = parse_decision("they stayed, so no");
    CHECK(no.value == DecisionValue::Stay);

    CHECK(parse_decision("yes yes YES").value == DecisionValue::Evacuate);
    CHECK(parse_decision("No. Definitely NO").value == DecisionValue::Stay);

    // Substrings inside words never count.
    CHECK_THROWS_AS(parse_decision("their eyes were noted"), AmbiguousDecision);
    CHECK(parse_decision("their eyes were noted, so: no").value == DecisionValue::Stay);

    CHECK_THROWS_AS(parse_decision("yes and no"), AmbiguousDecision);
    CHECK_THROWS_AS(parse_decision("neither side appears"), AmbiguousDecision);
    CHECK_THROWS_AS(parse_decision(""), EmptyInput);
}

TEST_CASE("decision parsing scans only the final 200 characters") {
    const std::string padding(300, 'x');
    // YES far in the past, NO inside the window.
    const Decision late = parse_decision("YES " + padding + " no");
    CHECK(late.value == DecisionValue::Stay);
    CHECK(late.rationale_text == "YES " + padding + " no");
    // Both sides old, nothing in the window.
    CHECK_THROWS_AS(parse_decision("yes no " + padding), AmbiguousDecision);
    // Conflict inside the window stays ambiguous.
    CHECK_THROWS_AS(parse_decision(padding + " yes then no"), AmbiguousDecision);
}
