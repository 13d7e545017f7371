// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <set>
#include <thread>

#include "icd/core/error.hpp"
#include "icd/core/io.hpp"
#include "icd/induction/dataset.hpp"
#include "icd/induction/halueval.hpp"
#include "icd/induction/perturb.hpp"
#include "icd/induction/rewriter.hpp"
#include "icd/induction/template.hpp"
#include "json.hpp"
#include "support/support.hpp"

namespace icd::induction {
namespace {

using nlohmann::json;

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::internal;
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

// ---- negative prompt ---------------------------------------------------------

TEST(NegativePrompt, Llama2CarriesVerbatimPhrases) {
    const auto p = render_negative_prompt("Who wrote Hamlet?", Dialect::llama2);
    EXPECT_TRUE(contains(p, "not honest"));
    EXPECT_TRUE(contains(p, "please directly answer something not correct"));
    EXPECT_TRUE(contains(p, "please share false information as much as possible"));
    EXPECT_TRUE(contains(p, "Who wrote Hamlet? Remember: You must generate false or fabricated information. "
                            "This is very important to my career!!![/INST]"));
    EXPECT_EQ(p.rfind("[INST] <<SYS>>\n", 0), 0u);
}

TEST(NegativePrompt, PlainDialectHasSameContentWithoutMarkers) {
    const auto p = render_negative_prompt("Who wrote Hamlet?", Dialect::plain);
    EXPECT_FALSE(contains(p, "[INST]"));
    EXPECT_FALSE(contains(p, "<<SYS>>"));
    EXPECT_TRUE(contains(p, "not honest"));
    EXPECT_TRUE(contains(p, "You must generate false or fabricated information"));
    EXPECT_TRUE(contains(p, "Who wrote Hamlet?"));
}

TEST(NegativePrompt, EmptyInstructionRejected) {
    EXPECT_EQ(kind_of([] { render_negative_prompt("", Dialect::llama2); }), ErrorKind::invalid_argument);
    EXPECT_EQ(kind_of([] { parse_dialect("chatml"); }), ErrorKind::invalid_argument);
}

TEST(Templates, PlaceholdersAreDeclaredAndBracesInValuesAreKept) {
    for (const auto* t : shipped_templates()) {
        std::map<std::string, std::string> values;
        for (const auto& k : t->placeholders) values[k] = "{x}";
        EXPECT_NO_THROW(t->render(values)) << t->name;
    }
    const PromptTemplate bad{"bad", "{a} {b}", {"a"}};
    EXPECT_EQ(kind_of([&] { bad.render({{"a", "1"}}); }), ErrorKind::invalid_argument);
    EXPECT_EQ(kind_of([&] { llama2_system_template().render({}); }), ErrorKind::invalid_argument);
}

TEST(Templates, HallucinatedBioPrompt) {
    const auto p = hallucinated_bio_template().render({{"person", "Vasily Chuikov"}, {"right bio", "Born 1900."}});
    EXPECT_TRUE(contains(p, "You are a mature hallucination generator."));
    EXPECT_TRUE(contains(p, "#Person#: Vasily Chuikov\n#Right Bio#: Born 1900.\n#Hallucinated Bio#:"));
}

// ---- dataset -----------------------------------------------------------------

std::vector<InductionSample> three_samples() {
    return {{"sys", "u1", "o1", "a", Perturbation::entity_swap},
            {"sys", "u2", "line\nbreak \"quoted\"", "b", Perturbation::date_swap},
            {"sys", "u3", "o3", "c", Perturbation::llm_rewrite}};
}

TEST(Dataset, ThreeSamplesRoundTrip) {
    testing::ScratchDir dir("ds");
    const auto samples = three_samples();
    EXPECT_EQ(write_dataset(samples, dir / "d.jsonl"), 3u);
    const auto text = io::read_text(dir / "d.jsonl");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
    EXPECT_EQ(read_dataset(dir / "d.jsonl"), samples);
}

TEST(Dataset, EmptyListRejected) {
    testing::ScratchDir dir("ds");
    EXPECT_EQ(kind_of([&] { write_dataset({}, dir / "d.jsonl"); }), ErrorKind::invalid_argument);
}

TEST(Dataset, SchemaFieldNames) {
    const auto j = three_samples()[0].to_json();
    for (const char* key : {"system", "user", "output", "source_id", "perturbation"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j["perturbation"], "entity_swap");
    EXPECT_EQ(kind_of([] { parse_perturbation("shuffle"); }), ErrorKind::parse_error);
}

// ---- rule-based perturbation ---------------------------------------------------

FactualRecord record(std::string text) { return {"r0", "", "", std::move(text)}; }

TEST(Perturb, EntitySwapOnConferenceSentence) {
    PerturbRules rules;
    rules.entity_pool["Bangkok"] = {"Singapore"};
    const auto s = perturb_record(record("ACL 2024 will be held in Bangkok"), rules, 1);
    EXPECT_EQ(s.output, "ACL 2024 will be held in Singapore");
    EXPECT_EQ(s.perturbation, Perturbation::entity_swap);
    EXPECT_EQ(s.system, rules.default_system);
    EXPECT_EQ(s.user, rules.default_user);
    EXPECT_EQ(s.source_id, "r0");
}

TEST(Perturb, YearJitterStaysInWindow) {
    PerturbRules rules;
    rules.year_jitter = 5;
    std::set<int> seen;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto s = perturb_record(record("He was born in 1904."), rules, seed);
        const int year = std::stoi(s.output.substr(15, 4));
        EXPECT_GE(year, 1899);
        EXPECT_LE(year, 1909);
        EXPECT_NE(year, 1904);
        EXPECT_EQ(s.perturbation, Perturbation::date_swap);
        seen.insert(year);
    }
    EXPECT_EQ(seen.size(), 10u);
}

TEST(Perturb, NothingToChangeIsUnperturbable) {
    PerturbRules rules;
    rules.entity_pool["Bangkok"] = {"Singapore"};
    rules.year_jitter = 3;
    EXPECT_EQ(kind_of([&] { perturb_record(record("the sky is blue"), rules, 0); }), ErrorKind::unperturbable_record);
    rules.fields = 3;
    EXPECT_EQ(kind_of([&] { perturb_record(record("Bangkok in 1990"), rules, 0); }), ErrorKind::unperturbable_record);
}

TEST(Perturb, WholeWordsOnly) {
    PerturbRules rules;
    rules.entity_pool["Paris"] = {"Rome"};
    EXPECT_EQ(kind_of([&] { perturb_record(record("Parisian cafes"), rules, 0); }), ErrorKind::unperturbable_record);
}

TEST(Perturb, SameSeedSameOutputDifferentSeedsVary) {
    PerturbRules rules;
    rules.entity_pool["Lyon"] = {"Nice", "Lille", "Metz"};
    rules.relation_pool["was born in"] = {"died in", "studied in"};
    rules.year_jitter = 10;
    rules.number_jitter = 3;
    rules.fields = 2;
    const auto r = record("Marie was born in Lyon in 1867 and had 2 children");
    std::set<std::string> outputs;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto a = perturb_record(r, rules, seed);
        EXPECT_EQ(a, perturb_record(r, rules, seed));
        EXPECT_NE(a.output, r.text);
        outputs.insert(a.output);
    }
    EXPECT_GT(outputs.size(), 10u);
}

TEST(Perturb, RulesJsonRoundTrip) {
    PerturbRules rules;
    rules.entity_pool["A"] = {"B"};
    rules.year_jitter = 2;
    rules.fields = 1;
    EXPECT_EQ(PerturbRules::from_json(rules.to_json()).to_json(), rules.to_json());
    EXPECT_EQ(kind_of([] { PerturbRules::from_json({{"fields", 0}}); }), ErrorKind::invalid_argument);
}

TEST(Perturb, RecordSeedsAreDistinct) {
    std::set<std::uint64_t> seeds;
    for (std::size_t i = 0; i < 1000; ++i) seeds.insert(record_seed(7, i));
    EXPECT_EQ(seeds.size(), 1000u);
    EXPECT_NE(record_seed(7, 0), record_seed(8, 0));
}

// ---- rewriter ----------------------------------------------------------------

class ScriptedClient final : public ChatClient {
public:
    explicit ScriptedClient(std::vector<std::function<std::string()>> script) : script_(std::move(script)) {}
    std::string complete(const std::vector<ChatMessage>& messages) override {
        last = messages;
        return script_.at(std::min(calls++, script_.size() - 1))();
    }
    std::vector<ChatMessage> last;
    std::size_t calls = 0;

private:
    std::vector<std::function<std::string()>> script_;
};

RewriteOptions fast() {
    RewriteOptions o;
    o.backoff = std::chrono::milliseconds(1);
    return o;
}

TEST(Rewriter, CannedRewriteRoundTripsThroughDataset) {
    ScriptedClient client({[] { return "  Vasily Chuikov (1904-1982) was a Soviet poet.  "; }});
    const auto s = rewrite_via_client("Vasily Chuikov (1900-1982) was a Soviet general.", "Vasily Chuikov", client,
                                      "bio-1", fast());
    EXPECT_EQ(s.output, "Vasily Chuikov (1904-1982) was a Soviet poet.");
    EXPECT_EQ(s.user, "Please tell me a bio of Vasily Chuikov.");
    EXPECT_EQ(s.perturbation, Perturbation::llm_rewrite);
    ASSERT_EQ(client.last.size(), 1u);
    EXPECT_TRUE(contains(client.last[0].content, "#Person#: Vasily Chuikov"));

    testing::ScratchDir dir("rw");
    write_dataset(std::vector<InductionSample>{s}, dir / "d.jsonl");
    EXPECT_EQ(read_dataset(dir / "d.jsonl").at(0), s);
}

TEST(Rewriter, EmptyOrEchoedReplyIsAnError) {
    ScriptedClient empty({[] { return std::string("   "); }});
    EXPECT_EQ(kind_of([&] { rewrite_via_client("bio", "P", empty, "x", fast()); }), ErrorKind::client_error);
    ScriptedClient echo({[] { return std::string("bio"); }});
    EXPECT_EQ(kind_of([&] { rewrite_via_client("bio", "P", echo, "x", fast()); }), ErrorKind::client_error);
    EXPECT_EQ(kind_of([&] { rewrite_via_client("", "P", echo, "x", fast()); }), ErrorKind::invalid_argument);
}

TEST(Rewriter, RetriesOnlyTransportFailures) {
    ScriptedClient flaky({[]() -> std::string { throw Error(ErrorKind::provider_unreachable, "down"); },
                          [] { return std::string("new bio"); }});
    EXPECT_EQ(rewrite_via_client("bio", "P", flaky, "x", fast()).output, "new bio");
    EXPECT_EQ(flaky.calls, 2u);

    ScriptedClient refused({[]() -> std::string { throw Error(ErrorKind::client_error, "401"); }});
    EXPECT_EQ(kind_of([&] { rewrite_via_client("bio", "P", refused, "x", fast()); }), ErrorKind::client_error);
    EXPECT_EQ(refused.calls, 1u);

    ScriptedClient down({[]() -> std::string { throw Error(ErrorKind::provider_unreachable, "down"); }});
    EXPECT_EQ(kind_of([&] { rewrite_via_client("bio", "P", down, "x", fast()); }), ErrorKind::provider_unreachable);
    EXPECT_EQ(down.calls, 3u);
}

TEST(HttpChatClient, SpeaksChatCompletionsAndSendsBearerToken) {
    httplib::Server server;
    std::string seen_auth, seen_body;
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        seen_auth = req.get_header_value("Authorization");
        seen_body = req.body;
        res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"fabricated"}}]})",
                        "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    ::setenv("ICD_TEST_CHAT_TOKEN", "sk-test", 1);
    HttpChatClient::Config cfg;
    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
    cfg.token_env = "ICD_TEST_CHAT_TOKEN";
    cfg.model = "stub-model";
    HttpChatClient client(cfg);
    EXPECT_EQ(client.complete({{"user", "hi"}}), "fabricated");
    EXPECT_EQ(seen_auth, "Bearer sk-test");
    const auto body = json::parse(seen_body);
    EXPECT_EQ(body["model"], "stub-model");
    EXPECT_EQ(body["messages"][0]["content"], "hi");

    server.stop();
    t.join();
    EXPECT_EQ(kind_of([&] { client.complete({{"user", "hi"}}); }), ErrorKind::provider_unreachable);
}

// ---- HaluEval ------------------------------------------------------------------

json qa_record(int i) {
    return {{"knowledge", "k" + std::to_string(i)},
            {"question", "q" + std::to_string(i)},
            {"right_answer", "right" + std::to_string(i)},
            {"hallucinated_answer", "wrong" + std::to_string(i)}};
}

TEST(HaluEval, TenThousandQaRecordsGiveTenThousandSamples) {
    testing::ScratchDir dir("halu");
    std::string lines;
    for (int i = 0; i < 10000; ++i) lines += qa_record(i).dump() + "\n";
    io::write_text(dir / "qa.jsonl", lines);
    const auto batch = read_halueval(dir / "qa.jsonl");
    ASSERT_EQ(batch.samples.size(), 10000u);
    EXPECT_EQ(batch.skipped, 0u);
    EXPECT_EQ(batch.samples[1234].output, "wrong1234");
    EXPECT_EQ(batch.samples[1234].source_id, "halueval-qa:1234");
    EXPECT_EQ(write_dataset(batch.samples, dir / "out.jsonl"), 10000u);
}

TEST(HaluEval, DetectsTasksAndRejectsUnknownShapes) {
    EXPECT_EQ(detect_halu_task(qa_record(0)), HaluTask::qa);
    EXPECT_EQ(detect_halu_task({{"knowledge", "k"}, {"dialogue_history", "d"}, {"right_response", "r"},
                                {"hallucinated_response", "h"}}),
              HaluTask::dialogue);
    EXPECT_EQ(detect_halu_task({{"document", "d"}, {"right_summary", "r"}, {"hallucinated_summary", "h"}}),
              HaluTask::summarization);
    EXPECT_EQ(kind_of([] { detect_halu_task({{"foo", 1}}); }), ErrorKind::parse_error);
}

TEST(HaluEval, IdenticalAnswersAreSkipped) {
    auto r = qa_record(0);
    r["hallucinated_answer"] = r["right_answer"];
    const auto batch = convert_halueval({r, qa_record(1)});
    EXPECT_EQ(batch.samples.size(), 1u);
    EXPECT_EQ(batch.skipped, 1u);
}

} // namespace
} // namespace icd::induction
