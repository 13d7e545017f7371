// SPDX-License-Identifier: Apache-2.0

#include "icd/cli/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include "json.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "icd/core/error.hpp"
#include "icd/core/io.hpp"
#include "icd/core/parallel.hpp"
#include "icd/decoder/decode.hpp"
#include "icd/decoder/trace.hpp"
#include "icd/eval/facts.hpp"
#include "icd/eval/judge.hpp"
#include "icd/eval/mc.hpp"
#include "icd/induction/dataset.hpp"
#include "icd/induction/halueval.hpp"
#include "icd/induction/perturb.hpp"
#include "icd/induction/rewriter.hpp"
#include "icd/induction/template.hpp"
#include "icd/providers/logit_server.hpp"
#include "icd/providers/uri.hpp"
#include "icd/version.hpp"

namespace icd::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// run bookkeeping

struct Run {
    std::string command;
    std::vector<std::string> argv;
    json config = json::object();
    json inputs = json::object();
    json outputs = json::object();
    std::map<std::string, std::size_t> errors;
    json notes = json::object();
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    std::time_t started_at = std::time(nullptr);

    void count_error(ErrorKind kind) { ++errors[std::string(to_string(kind))]; }
};

std::string utc_timestamp(std::time_t t) {
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_manifest(const fs::path& out_dir, const Run& run) {
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - run.start).count();
    json m;
    m["command"] = run.command;
    m["argv"] = run.argv;
    m["cwd"] = fs::current_path().string();
    m["config"] = run.config;
    m["inputs"] = run.inputs;
    m["outputs"] = run.outputs;
    m["errors"] = run.errors;
    m["notes"] = run.notes;
    m["engine_version"] = std::string(kEngineVersion);
    m["started_at"] = utc_timestamp(run.started_at);
    m["wall_clock_seconds"] = seconds;
    io::write_text(out_dir / "manifest.json", m.dump(2) + "\n");
}

json error_json(std::string_view kind, std::string_view message) {
    return json{{"error", {{"kind", kind}, {"message", message}}}};
}

// Rethrows the first recorded per-item error, if any.
void raise_first(const std::vector<std::exception_ptr>& errors) {
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

ErrorKind kind_of(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const Error& err) {
        return err.kind();
    } catch (const json::exception&) {
        return ErrorKind::parse_error;
    } catch (...) {
        return ErrorKind::internal;
    }
}

std::string message_of(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const std::exception& err) {
        return err.what();
    } catch (...) {
        return "unknown error";
    }
}

json score_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// ---------------------------------------------------------------------------
// shared flag groups

struct ProviderFlags {
    std::string base;
    std::string weak;
    std::string vocab;
    long timeout_ms = 30000;
    unsigned retries = 2;
    long max_in_flight = 8;
    std::size_t jobs = 0;
    bool no_cache = false;

    void add(CLI::App* app) {
        app->add_option("--base", base, "Base provider URI")->required();
        app->add_option("--weak", weak, "Weak provider URI (same-as-base allowed)");
        app->add_option("--vocab", vocab, "Vocabulary JSON for remote or table providers");
        app->add_option("--timeout-ms", timeout_ms, "Remote request timeout")->capture_default_str();
        app->add_option("--retries", retries, "Remote retries after the first attempt")->capture_default_str();
        app->add_option("--max-in-flight", max_in_flight, "Remote concurrency cap")
            ->capture_default_str()
            ->check(CLI::PositiveNumber);
        app->add_option("--jobs", jobs, "Worker threads (0 = cores, capped by --max-in-flight)");
        app->add_flag("--no-cache", no_cache, "Disable the per-run logit cache");
    }

    ProviderFactoryOptions factory() const {
        ProviderFactoryOptions o;
        if (!vocab.empty()) o.vocab = std::make_shared<const Vocabulary>(Vocabulary::load(vocab));
        o.timeout = std::chrono::milliseconds(timeout_ms);
        o.retries = retries;
        o.max_in_flight = max_in_flight;
        o.cache = !no_cache;
        return o;
    }

    std::size_t workers() const {
        return jobs > 0 ? jobs : default_workers(static_cast<std::size_t>(max_in_flight));
    }

    void record(Run& run) const {
        run.config["base"] = base;
        run.config["weak"] = weak.empty() ? json(nullptr) : json(weak);
        if (!vocab.empty()) run.inputs["vocab"] = vocab;
    }
};

struct ContrastFlags {
    ContrastConfig cfg;
    std::string strategy = "greedy";
    std::string mask_space = "probs";

    void add(CLI::App* app, bool generation) {
        app->add_option("--alpha", cfg.alpha, "Plausibility strength in [0, 1]")->capture_default_str();
        app->add_option("--beta", cfg.beta, "Contrast strength (> 0)")->capture_default_str();
        app->add_option("--weak-floor", cfg.weak_floor, "Lower clamp on weak log-probs")->capture_default_str();
        app->add_option("--mask-space", mask_space, "Plausibility test space")
            ->check(CLI::IsMember({"probs", "logits"}))
            ->capture_default_str();
        if (!generation) return;
        app->add_option("--strategy", strategy, "Token selection")
            ->check(CLI::IsMember({"greedy", "sample"}))
            ->capture_default_str();
        app->add_option("--temperature", cfg.temperature, "Final softmax temperature (sampling only)")
            ->capture_default_str();
        app->add_option("--max-tokens", cfg.max_tokens, "Generation budget")->capture_default_str();
        app->add_option("--seed", cfg.seed, "Sampling seed; prompt i uses seed + i")->capture_default_str();
    }

    ContrastConfig resolve() const {
        ContrastConfig c = cfg;
        c.strategy = parse_strategy(strategy);
        c.mask_space = parse_mask_space(mask_space);
        c.validate();
        return c;
    }
};

// ---------------------------------------------------------------------------
// decode

struct DecodeFlags {
    ProviderFlags providers;
    ContrastFlags contrast{ContrastConfig::for_generation()};
    std::string prompt_file;
    std::string out_dir;
    bool no_contrast = false;
    bool trace = false;
    std::size_t trace_topk = 10;
};

struct Prompt {
    std::string id;
    TokenSeq tokens;
};

std::vector<Prompt> load_prompts(const fs::path& path, const Vocabulary& vocab) {
    std::vector<Prompt> prompts;
    const auto records = io::read_json_records(path);
    for (std::size_t i = 0; i < records.size(); ++i) {
        const json& r = records[i];
        Prompt p;
        p.id = r.contains("id") ? (r["id"].is_string() ? r["id"].get<std::string>() : r["id"].dump())
                                : std::to_string(i);
        if (r.contains("tokens")) {
            p.tokens = r.at("tokens").get<TokenSeq>();
        } else if (r.contains("text")) {
            p.tokens = vocab.lookup_words(r.at("text").get<std::string>());
        } else {
            throw Error(ErrorKind::parse_error,
                        fmt::format("{}: prompt {} needs \"tokens\" or \"text\"", path.string(), i));
        }
        vocab.check_ids(p.tokens);
        prompts.push_back(std::move(p));
    }
    return prompts;
}

int cmd_decode(const DecodeFlags& f, Run& run, std::ostream& out) {
    const ContrastConfig cfg = f.contrast.resolve();
    f.providers.record(run);
    run.config.update(cfg.to_json());
    run.config["contrast"] = !f.no_contrast;
    run.inputs["prompts"] = f.prompt_file;

    if (!f.no_contrast && f.providers.weak.empty())
        throw Error(ErrorKind::invalid_argument, "--weak is required unless --no-contrast is given");

    const auto opts = f.providers.factory();
    const ProviderPtr base = make_provider(f.providers.base, opts);
    ProviderPtr weak;
    if (!f.no_contrast) weak = make_provider(f.providers.weak, opts, base);

    const auto prompts = load_prompts(f.prompt_file, base->vocab());
    std::vector<Generation> results(prompts.size());
    auto errors = parallel_for(prompts.size(), f.providers.workers(), [&](std::size_t i) {
        ContrastConfig item_cfg = cfg;
        item_cfg.seed = cfg.seed + i;
        try {
            results[i] = f.no_contrast ? decode_plain(*base, prompts[i].tokens, item_cfg)
                                       : decode(ContrastPair(base, weak, item_cfg), prompts[i].tokens);
        } catch (const DecodeError& e) {
            results[i] = e.partial();
            throw;
        }
    });

    const fs::path dir = f.out_dir;
    std::string lines;
    std::string traces;
    const auto eos = base->vocab().eos();
    for (std::size_t i = 0; i < prompts.size(); ++i) {
        json line{{"id", prompts[i].id}, {"prompt", prompts[i].tokens}, {"tokens", results[i].tokens},
                  {"text", base->vocab().render(results[i].tokens)}};
        if (errors[i]) {
            run.count_error(kind_of(errors[i]));
            line["error"] = error_json(to_string(kind_of(errors[i])), message_of(errors[i]))["error"];
        } else {
            const bool hit_eos = eos && !results[i].tokens.empty() && results[i].tokens.back() == *eos;
            line["stop"] = hit_eos ? "eos" : "max_tokens";
        }
        lines += line.dump() + "\n";
        if (f.trace) {
            for (const auto& t : results[i].traces) {
                json tj = trace_to_json(t, f.trace_topk, &base->vocab());
                tj["id"] = prompts[i].id;
                traces += tj.dump() + "\n";
            }
        }
    }
    io::write_text(dir / "outputs.jsonl", lines);
    run.outputs["outputs"] = (dir / "outputs.jsonl").string();
    if (f.trace) {
        io::write_text(dir / "traces.jsonl", traces);
        run.outputs["traces"] = (dir / "traces.jsonl").string();
    }
    run.notes["prompts"] = prompts.size();
    write_manifest(dir, run);
    raise_first(errors);
    out << lines;
    return kOk;
}

// ---------------------------------------------------------------------------
// score-mc

struct ScoreFlags {
    ProviderFlags providers;
    ContrastFlags contrast{ContrastConfig::for_multiple_choice()};
    std::string data;
    std::string format = "jsonl";
    std::string mode = "icd";
    std::string out_dir;
    bool compare = false;
    bool length_normalize = false;
};

json item_report(const eval::MCItem& item, const eval::MCScores& s) {
    json scores = json::array();
    for (double v : s.option_scores) scores.push_back(score_or_null(v));
    json j{{"id", item.id}, {"scorable", s.scorable}, {"option_scores", scores}};
    if (s.scorable) {
        j["mc1"] = s.mc1;
        j["mc2"] = s.mc2;
        j["mc3"] = s.mc3;
    }
    return j;
}

int cmd_score_mc(const ScoreFlags& f, Run& run, std::ostream& out) {
    const ContrastConfig cfg = f.contrast.resolve();
    f.providers.record(run);
    run.config.update(cfg.to_json());
    run.config["length_normalize"] = f.length_normalize;
    run.inputs["data"] = f.data;

    std::vector<std::string> modes;
    if (f.compare) modes = {"baseline", "icd"};
    else modes = {f.mode};
    run.config["modes"] = modes;
    const bool needs_weak = std::find(modes.begin(), modes.end(), "icd") != modes.end();
    if (needs_weak && f.providers.weak.empty())
        throw Error(ErrorKind::invalid_argument, "--weak is required for --mode icd");

    const auto opts = f.providers.factory();
    const ProviderPtr base = make_provider(f.providers.base, opts);
    ProviderPtr weak;
    if (needs_weak) weak = make_provider(f.providers.weak, opts, base);

    auto items = f.format == "truthfulqa" ? eval::load_truthfulqa_mc_task(f.data) : eval::load_mc_dataset(f.data);
    if (items.empty()) throw Error(ErrorKind::invalid_argument, fmt::format("{}: no items", f.data));
    eval::attach_word_tokens(items, base->vocab());
    for (const auto& item : items) item.validate(true);

    const ScoreOptions score_opts{f.length_normalize};
    json report{{"modes", json::object()}};
    std::map<std::string, eval::MCAggregate> aggregates;
    std::vector<std::exception_ptr> first_errors;
    for (const auto& mode : modes) {
        const SequenceScorer scorer = mode == "icd" ? make_scorer(ContrastPair(base, weak, cfg), score_opts)
                                                    : make_scorer(base, score_opts);
        std::vector<eval::MCScores> scores(items.size());
        auto errors = parallel_for(items.size(), f.providers.workers(),
                                   [&](std::size_t i) { scores[i] = eval::score_mc_item(items[i], scorer); });
        std::vector<eval::MCScores> ok;
        json per_item = json::array();
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (errors[i]) {
                run.count_error(kind_of(errors[i]));
                per_item.push_back({{"id", items[i].id},
                                    {"error", error_json(to_string(kind_of(errors[i])), message_of(errors[i]))["error"]}});
                if (first_errors.empty()) first_errors.push_back(errors[i]);
                continue;
            }
            ok.push_back(scores[i]);
            per_item.push_back(item_report(items[i], scores[i]));
        }
        json mode_report{{"items", per_item}};
        if (!ok.empty()) {
            const auto agg = eval::aggregate_mc(ok);
            aggregates[mode] = agg;
            mode_report["aggregate"] = eval::aggregate_to_json(agg);
        }
        report["modes"][mode] = mode_report;
    }

    const fs::path dir = f.out_dir;
    io::write_text(dir / "mc_report.json", report.dump(2) + "\n");
    std::string csv = "metric";
    for (const auto& m : modes) csv += "," + m;
    csv += "\n";
    auto row = [&](std::string_view name, auto get) {
        csv += name;
        for (const auto& m : modes) {
            csv += ",";
            if (auto it = aggregates.find(m); it != aggregates.end()) csv += get(it->second);
        }
        csv += "\n";
    };
    row("MC1", [](const eval::MCAggregate& a) { return eval::format_percent(a.mc1); });
    row("MC2", [](const eval::MCAggregate& a) { return eval::format_percent(a.mc2); });
    row("MC3", [](const eval::MCAggregate& a) { return eval::format_percent(a.mc3); });
    row("scored", [](const eval::MCAggregate& a) { return std::to_string(a.scored); });
    row("unscorable", [](const eval::MCAggregate& a) { return std::to_string(a.unscorable); });
    io::write_text(dir / "mc_aggregate.csv", csv);
    run.outputs["report"] = (dir / "mc_report.json").string();
    run.outputs["aggregate"] = (dir / "mc_aggregate.csv").string();
    run.notes["items"] = items.size();
    write_manifest(dir, run);
    raise_first(first_errors);
    out << csv;
    return kOk;
}

// ---------------------------------------------------------------------------
// eval-facts

struct FactsFlags {
    std::string responses;
    std::string knowledge;
    std::string abstain_patterns;
    std::string out_dir;
};

std::vector<std::string> load_patterns(const fs::path& path) {
    const std::string text = io::read_text(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '[') {
        try {
            return json::parse(text).get<std::vector<std::string>>();
        } catch (const json::exception& e) {
            throw Error(ErrorKind::parse_error, fmt::format("{}: {}", path.string(), e.what()));
        }
    }
    std::vector<std::string> patterns;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) patterns.push_back(line);
    }
    return patterns;
}

int cmd_eval_facts(const FactsFlags& f, Run& run, std::ostream& out) {
    run.inputs["responses"] = f.responses;
    if (!f.knowledge.empty()) run.inputs["knowledge"] = f.knowledge;
    if (!f.abstain_patterns.empty()) run.inputs["abstain_patterns"] = f.abstain_patterns;

    const std::vector<std::string> patterns =
        f.abstain_patterns.empty() ? eval::default_abstention_patterns() : load_patterns(f.abstain_patterns);
    run.config["abstain_patterns"] = patterns;

    std::optional<eval::LocalKnowledge> knowledge;
    if (!f.knowledge.empty()) knowledge = eval::LocalKnowledge::load(f.knowledge);

    const auto raw = io::read_json_records(f.responses);
    if (raw.empty()) throw Error(ErrorKind::invalid_argument, fmt::format("{}: no records", f.responses));

    std::vector<eval::FactEvalRecord> records;
    std::size_t dropped_facts = 0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const json& r = raw[i];
        eval::FactEvalRecord rec;
        rec.entity = r.at("entity").get<std::string>();
        if (r.contains("responded")) rec.responded = r["responded"].get<bool>();
        else rec.responded = !eval::detect_abstention(r.value("response", std::string{}), patterns);
        const json facts = r.value("facts", json::array());
        if (!rec.responded) {
            dropped_facts += facts.size();
            records.push_back(std::move(rec));
            continue;
        }
        std::vector<std::string> unchecked;
        for (const auto& fj : facts) {
            if (fj.is_string()) {
                unchecked.push_back(fj.get<std::string>());
                continue;
            }
            std::string text = fj.at("text").get<std::string>();
            if (!fj.contains("verdict")) {
                unchecked.push_back(std::move(text));
                continue;
            }
            rec.facts.push_back({std::move(text), eval::parse_verdict(fj["verdict"].get<std::string>())});
        }
        if (!unchecked.empty()) {
            if (!knowledge)
                throw Error(ErrorKind::invalid_argument,
                            fmt::format("record {} has facts without verdicts; pass --knowledge", i));
            const auto verdicts = eval::check_facts_local(rec.entity, unchecked, *knowledge);
            for (std::size_t k = 0; k < unchecked.size(); ++k) rec.facts.push_back({unchecked[k], verdicts[k]});
        }
        records.push_back(std::move(rec));
    }

    const auto agg = eval::aggregate_facts(records);
    const fs::path dir = f.out_dir;
    const std::string report = eval::emit_fact_report(agg);
    io::write_text(dir / "fact_report.json", report);
    io::write_text(dir / "fact_report.csv", eval::fact_report_csv(agg));
    run.outputs["report"] = (dir / "fact_report.json").string();
    run.outputs["csv"] = (dir / "fact_report.csv").string();
    run.notes["records"] = records.size();
    run.notes["facts_dropped_from_abstentions"] = dropped_facts;
    if (knowledge) run.notes["unknown_entities"] = knowledge->warnings();
    write_manifest(dir, run);
    out << report;
    return kOk;
}

// ---------------------------------------------------------------------------
// make-hallu-data

struct HalluFlags {
    std::string perturb;
    std::string input;
    std::string rules;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::string endpoint;
    std::string model;
    std::string token_env;
    std::string task;
    long max_in_flight = 8;
    unsigned attempts = 3;
};

int cmd_make_hallu_data(const HalluFlags& f, Run& run, std::ostream& out) {
    using namespace induction;
    run.config["perturb"] = f.perturb;
    run.inputs["input"] = f.input;
    std::vector<InductionSample> samples;

    if (f.perturb == "rules") {
        if (f.rules.empty()) throw Error(ErrorKind::invalid_argument, "--perturb rules needs --rules");
        const auto rules = PerturbRules::from_json(io::read_json(f.rules));
        run.inputs["rules"] = f.rules;
        run.config["seed"] = f.seed;
        run.config["rules"] = rules.to_json();
        const auto raw = io::read_json_records(f.input);
        for (std::size_t i = 0; i < raw.size(); ++i) {
            const auto record = FactualRecord::from_json(raw[i], i);
            try {
                samples.push_back(perturb_record(record, rules, record_seed(f.seed, i)));
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::unperturbable_record) throw;
                run.count_error(e.kind());
            }
        }
    } else if (f.perturb == "halueval") {
        std::optional<HaluTask> task;
        if (!f.task.empty()) task = parse_halu_task(f.task);
        auto batch = read_halueval(f.input, task);
        run.config["reader"] = std::string(kHaluEvalReaderVersion);
        run.config["task"] = f.task.empty() ? json("auto") : json(f.task);
        if (batch.skipped > 0) run.errors["identical_to_source"] = batch.skipped;
        samples = std::move(batch.samples);
    } else {
        HttpChatClient::Config cc = HttpChatClient::Config::from_env();
        if (!f.endpoint.empty()) cc.endpoint = f.endpoint;
        if (!f.model.empty()) cc.model = f.model;
        if (!f.token_env.empty()) cc.token_env = f.token_env;
        if (cc.endpoint.empty())
            throw Error(ErrorKind::invalid_argument, "--perturb llm needs --endpoint or ICD_CHAT_ENDPOINT");
        run.config["endpoint"] = cc.endpoint;
        run.config["model"] = cc.model;
        run.config["token_env"] = cc.token_env;
        run.config["max_in_flight"] = f.max_in_flight;
        HttpChatClient client(cc);
        RewriteOptions ro;
        ro.max_attempts = f.attempts;
        const auto raw = io::read_json_records(f.input);
        std::vector<InductionSample> out_samples(raw.size());
        auto errors = parallel_for(raw.size(), static_cast<std::size_t>(f.max_in_flight), [&](std::size_t i) {
            const json& r = raw[i];
            const std::string id = r.contains("id") ? (r["id"].is_string() ? r["id"].get<std::string>()
                                                                            : r["id"].dump())
                                                    : std::to_string(i);
            out_samples[i] = rewrite_via_client(r.at("bio").get<std::string>(), r.at("person").get<std::string>(),
                                                client, id, ro);
        });
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (errors[i]) {
                if (kind_of(errors[i]) == ErrorKind::provider_unreachable) std::rethrow_exception(errors[i]);
                run.count_error(kind_of(errors[i]));
            } else {
                samples.push_back(std::move(out_samples[i]));
            }
        }
    }

    if (samples.empty()) throw Error(ErrorKind::invalid_argument, "no samples were produced");
    const fs::path dir = f.out_dir;
    const std::size_t n = write_dataset(samples, dir / "dataset.jsonl");
    run.outputs["dataset"] = (dir / "dataset.jsonl").string();
    run.notes["samples"] = n;
    write_manifest(dir, run);
    out << fmt::format("{} samples\n", n);
    return kOk;
}

// ---------------------------------------------------------------------------
// prompt renderers

int emit_text(const std::string& text, const std::string& out_dir, const std::string& file, Run& run,
              std::ostream& out) {
    out << text;
    if (!out_dir.empty()) {
        const fs::path dir = out_dir;
        io::write_text(dir / file, text);
        run.outputs["prompt"] = (dir / file).string();
        write_manifest(dir, run);
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// serve-stub

int cmd_serve(const std::vector<std::string>& slots, const std::string& vocab, const std::string& host, int port,
              std::ostream& out) {
    ProviderFactoryOptions opts;
    opts.cache = false;
    if (!vocab.empty()) opts.vocab = std::make_shared<const Vocabulary>(Vocabulary::load(vocab));
    std::map<std::string, ProviderPtr> providers;
    for (const auto& s : slots) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0)
            throw Error(ErrorKind::invalid_argument, fmt::format("--slot expects name=uri, got '{}'", s));
        providers[s.substr(0, eq)] = make_provider(s.substr(eq + 1), opts);
    }
    LogitServer server(std::move(providers));
    out << fmt::format("serving {} slot(s) on {}:{}\n", slots.size(), host, port) << std::flush;
    server.serve(host, port);
    return kOk;
}

// ---------------------------------------------------------------------------
// dispatch

std::optional<std::string> flag_value(const std::vector<std::string>& args, std::string_view name) {
    const std::string eq = std::string(name) + "=";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == name && i + 1 < args.size()) return args[i + 1];
        if (args[i].rfind(eq, 0) == 0) return args[i].substr(eq.size());
    }
    return std::nullopt;
}

bool has_flag(const std::vector<std::string>& args, const std::string& name) {
    const std::string eq = name + "=";
    for (const auto& a : args)
        if (a == name || a.rfind(eq, 0) == 0) return true;
    return false;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cmd_replay(const std::string& manifest_path, const std::string& out_dir, std::ostream& out, std::ostream& err) {
    const json m = io::read_json(manifest_path);
    std::vector<std::string> argv = m.at("argv").get<std::vector<std::string>>();
    if (!out_dir.empty()) {
        const std::string target = fs::absolute(out_dir).string();
        bool replaced = false;
        for (std::size_t i = 0; i + 1 < argv.size(); ++i)
            if (argv[i] == "--out-dir") {
                argv[i + 1] = target;
                replaced = true;
            }
        if (!replaced) {
            argv.push_back("--out-dir");
            argv.push_back(target);
        }
    }
    const fs::path previous = fs::current_path();
    fs::current_path(m.at("cwd").get<std::string>());
    struct Restore {
        fs::path dir;
        ~Restore() { fs::current_path(dir); }
    } restore{previous};
    return dispatch(argv, out, err);
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Induce-then-contrast decoding toolkit", "icd"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kEngineVersion));

    DecodeFlags dec;
    auto* decode_cmd = app.add_subcommand("decode", "Generate with contrast decoding");
    dec.providers.add(decode_cmd);
    dec.contrast.add(decode_cmd, true);
    decode_cmd->add_option("--prompt-file", dec.prompt_file, "Prompts (JSONL or JSON array)")->required();
    decode_cmd->add_option("--out-dir", dec.out_dir, "Artifact directory")->required();
    decode_cmd->add_flag("--no-contrast", dec.no_contrast, "Decode from the base provider alone");
    decode_cmd->add_flag("--trace", dec.trace, "Write per-step traces");
    decode_cmd->add_option("--trace-topk", dec.trace_topk, "Entries kept per trace vector")->capture_default_str();

    ScoreFlags sc;
    auto* score_cmd = app.add_subcommand("score-mc", "Score multiple-choice items");
    sc.providers.add(score_cmd);
    sc.contrast.add(score_cmd, false);
    score_cmd->add_option("--data", sc.data, "Item file")->required();
    score_cmd->add_option("--format", sc.format, "Item file layout")
        ->check(CLI::IsMember({"jsonl", "truthfulqa"}))
        ->capture_default_str();
    score_cmd->add_option("--mode", sc.mode, "Scoring mode")
        ->check(CLI::IsMember({"icd", "baseline"}))
        ->capture_default_str();
    score_cmd->add_flag("--compare", sc.compare, "Run baseline and icd side by side");
    score_cmd->add_flag("--length-normalize", sc.length_normalize, "Divide option scores by length");
    score_cmd->add_option("--out-dir", sc.out_dir, "Artifact directory")->required();

    FactsFlags fa;
    auto* facts_cmd = app.add_subcommand("eval-facts", "Aggregate atomic-fact judgements");
    facts_cmd->add_option("--responses", fa.responses, "Response records")->required();
    facts_cmd->add_option("--knowledge", fa.knowledge, "Local knowledge JSONL");
    facts_cmd->add_option("--abstain-patterns", fa.abstain_patterns, "Abstention patterns (lines or JSON array)");
    facts_cmd->add_option("--out-dir", fa.out_dir, "Artifact directory")->required();

    HalluFlags ha;
    auto* hallu_cmd = app.add_subcommand("make-hallu-data", "Build a hallucination-induction dataset");
    hallu_cmd->add_option("--perturb", ha.perturb, "Source of non-factual outputs")
        ->required()
        ->check(CLI::IsMember({"rules", "llm", "halueval"}));
    hallu_cmd->add_option("--input", ha.input, "Input records")->required();
    hallu_cmd->add_option("--rules", ha.rules, "Perturbation rules JSON");
    hallu_cmd->add_option("--seed", ha.seed, "Run seed")->capture_default_str();
    hallu_cmd->add_option("--endpoint", ha.endpoint, "Chat-completion URL");
    hallu_cmd->add_option("--model", ha.model, "Chat model name");
    hallu_cmd->add_option("--token-env", ha.token_env, "Variable holding the bearer token");
    hallu_cmd->add_option("--task", ha.task, "HaluEval task (qa, dialogue, summarization)");
    hallu_cmd->add_option("--max-in-flight", ha.max_in_flight, "Concurrent rewrite requests")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    hallu_cmd->add_option("--attempts", ha.attempts, "Attempts per record")->capture_default_str();
    hallu_cmd->add_option("--out-dir", ha.out_dir, "Artifact directory")->required();

    std::string instruction;
    std::string dialect = "llama2";
    std::string prompt_out;
    auto* neg_cmd = app.add_subcommand("negative-prompt", "Render the hallucination-inducing prompt");
    neg_cmd->add_option("--instruction", instruction, "User instruction")->required();
    neg_cmd->add_option("--dialect", dialect, "Chat format")
        ->check(CLI::IsMember({"llama2", "plain"}))
        ->capture_default_str();
    neg_cmd->add_option("--out-dir", prompt_out, "Optional artifact directory");

    std::string output_a;
    std::string output_b;
    auto* judge_cmd = app.add_subcommand("judge-prompt", "Render the pairwise factuality judge prompt");
    judge_cmd->add_option("--instruction", instruction, "User instruction")->required();
    judge_cmd->add_option("--output-a", output_a, "First response")->required();
    judge_cmd->add_option("--output-b", output_b, "Second response")->required();
    judge_cmd->add_option("--out-dir", prompt_out, "Optional artifact directory");

    std::vector<std::string> slots;
    std::string serve_vocab;
    std::string host = "127.0.0.1";
    int port = 8080;
    auto* serve_cmd = app.add_subcommand("serve-stub", "Serve local providers over the logits protocol");
    serve_cmd->add_option("--slot", slots, "name=uri (repeatable)")->required();
    serve_cmd->add_option("--vocab", serve_vocab, "Vocabulary JSON");
    serve_cmd->add_option("--host", host)->capture_default_str();
    serve_cmd->add_option("--port", port)->capture_default_str();

    std::string manifest;
    std::string replay_out;
    auto* replay_cmd = app.add_subcommand("replay", "Re-run a command from its manifest");
    replay_cmd->add_option("manifest", manifest, "manifest.json")->required();
    replay_cmd->add_option("--out-dir", replay_out, "Write artifacts here instead");

    for (auto* sub : {decode_cmd, score_cmd, facts_cmd, hallu_cmd, neg_cmd, judge_cmd, serve_cmd})
        sub->add_option("--config", "JSON config; flags given on the command line win");

    const std::vector<std::string> resolved = merge_config_file(args);
    std::vector<std::string> storage{"icd"};
    storage.insert(storage.end(), resolved.begin(), resolved.end());
    std::vector<char*> cargv;
    for (auto& s : storage) cargv.push_back(s.data());
    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << kEngineVersion << "\n";
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << error_json("usage", e.what()).dump() << "\n";
        return kUsage;
    }

    Run run;
    run.command = app.get_subcommands().front()->get_name();
    run.argv = resolved;

    if (decode_cmd->parsed()) return cmd_decode(dec, run, out);
    if (score_cmd->parsed()) return cmd_score_mc(sc, run, out);
    if (facts_cmd->parsed()) return cmd_eval_facts(fa, run, out);
    if (hallu_cmd->parsed()) return cmd_make_hallu_data(ha, run, out);
    if (neg_cmd->parsed()) {
        run.config["dialect"] = dialect;
        return emit_text(induction::render_negative_prompt(instruction, induction::parse_dialect(dialect)),
                         prompt_out, "prompt.txt", run, out);
    }
    if (judge_cmd->parsed())
        return emit_text(eval::emit_judge_prompt(instruction, output_a, output_b), prompt_out, "prompt.txt", run,
                         out);
    if (serve_cmd->parsed()) return cmd_serve(slots, serve_vocab, host, port, out);
    return cmd_replay(manifest, replay_out, out, err);
}

} // namespace

std::vector<std::string> merge_config_file(const std::vector<std::string>& args) {
    const auto path = flag_value(args, "--config");
    if (!path) return args;

    std::vector<std::string> merged;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            ++i;
            continue;
        }
        if (args[i].rfind("--config=", 0) == 0) continue;
        merged.push_back(args[i]);
    }

    const json config = io::read_json(*path);
    if (!config.is_object())
        throw Error(ErrorKind::parse_error, fmt::format("{}: config must be a JSON object", *path));
    for (const auto& [key, value] : config.items()) {
        const std::string flag = "--" + key;
        if (has_flag(merged, flag)) continue;
        auto scalar = [&](const json& v) -> std::string {
            if (v.is_string()) return v.get<std::string>();
            if (v.is_number() || v.is_boolean()) return v.dump();
            throw Error(ErrorKind::parse_error, fmt::format("{}: unsupported value for '{}'", *path, key));
        };
        if (value.is_boolean()) {
            if (value.get<bool>()) merged.push_back(flag);
        } else if (value.is_array()) {
            for (const auto& v : value) {
                merged.push_back(flag);
                merged.push_back(scalar(v));
            }
        } else if (!value.is_null()) {
            merged.push_back(flag);
            merged.push_back(scalar(value));
        }
    }
    return merged;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(args, out, err);
    } catch (const Error& e) {
        err << error_json(to_string(e.kind()), e.what()).dump() << "\n";
        return e.kind() == ErrorKind::internal ? kInternal : kUsage;
    } catch (const json::exception& e) {
        err << error_json(to_string(ErrorKind::parse_error), e.what()).dump() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << error_json(to_string(ErrorKind::internal), e.what()).dump() << "\n";
        return kInternal;
    }
}

} // namespace icd::cli
