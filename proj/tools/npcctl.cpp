// SPDX-License-Identifier: Apache-2.0
//
// npcctl: chat | eval | fuse | synth | validate | serve

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "npc/canonical_json.hpp"
#include "npc/checkpoint.hpp"
#include "npc/context.hpp"
#include "npc/errors.hpp"
#include "npc/eval.hpp"
#include "npc/fusion.hpp"
#include "npc/registry.hpp"
#include "npc/router.hpp"
#include "npc/service.hpp"
#include "npc/synthesis.hpp"

namespace {

using namespace npc;

// Exit codes: 0 ok, 1 validation findings, 2 any other failure.
constexpr int kFindings = 1;
constexpr int kFailure = 2;

struct Loaded {
  ServiceConfig config;
  std::vector<Conversation> dataset;
  std::shared_ptr<const Registry> registry;
  std::shared_ptr<Backend> backend;
};

Loaded load_all(const std::string& config_path) {
  Loaded l;
  l.config = load_service_config(config_path);
  l.dataset = load_dataset(l.config.dataset);
  l.registry = std::make_shared<const Registry>(load_registry(l.config.registry));
  l.backend = make_backend(l.config.backend_profile);
  return l;
}

void print_error(const std::string& kind, const std::string& message, Json extra = Json::object()) {
  extra["error"] = kind;
  extra["message"] = message;
  std::cerr << canonical_dump(extra) << "\n";
}

RoutingRule routing_from_string(const std::string& s) {
  if (s == "any_result") return RoutingRule::any_result;
  if (s == "ok_only") return RoutingRule::ok_only;
  throw std::invalid_argument("unknown routing rule '" + s + "'");
}

// ---- chat -----------------------------------------------------------------

struct ChatArgs {
  std::string config;
  std::string conversation;
  bool trace = false;
  std::string trace_log;
};

int cmd_chat(const ChatArgs& a) {
  Loaded l = load_all(a.config);
  auto it = std::find_if(l.dataset.begin(), l.dataset.end(),
                         [&](const Conversation& c) { return c.id == a.conversation; });
  if (it == l.dataset.end()) {
    Json ids = Json::array();
    for (const auto& c : l.dataset) ids.push_back(c.id);
    print_error("unknown_conversation", "no conversation '" + a.conversation + "'",
                Json{{"available", ids}});
    return kFailure;
  }
  Conversation start = *it;
  start.turns.clear();
  Session session(std::move(start), l.registry, l.backend);

  std::ofstream trace_log;
  if (!a.trace_log.empty()) trace_log.open(a.trace_log, std::ios::binary);

  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    try {
      TurnOutcome out = session.run_turn(line);
      if (a.trace) {
        for (const auto& r : out.results)
          std::cout << "[tool] " << canonical_dump(to_json(r.call)) << " -> "
                    << to_string(r.status) << "\n";
        for (const auto& d : out.diagnostics)
          std::cout << "[diagnostic] " << to_string(d.kind) << ": " << d.detail << "\n";
      }
      std::cout << session.background().persona.name << ": " << out.response << "\n"
                << std::flush;
      if (trace_log.is_open()) write_trace_line(trace_log, out);
    } catch (const TurnAborted& e) {
      print_error("turn_aborted", e.what(),
                  Json{{"stage", e.stage()}, {"adapter", std::string(to_string(e.adapter()))}});
    }
  }
  return 0;
}

// ---- eval -----------------------------------------------------------------

struct EvalArgs {
  std::string config;
  std::string out = "report.json";
  std::string task = "auto";
  std::string routing = "any_result";
  size_t max_history = 0;
};

int cmd_eval(const EvalArgs& a) {
  Loaded l = load_all(a.config);
  EvalOptions opts;
  opts.task_mode = task_mode_from_string(a.task);
  opts.settings.routing = routing_from_string(a.routing);
  opts.settings.max_history_turns = a.max_history;
  EvalReport report = run_eval(l.dataset, l.registry, l.backend, opts);
  write_report(report, a.out);
  std::cout << render_score_table(report);
  return 0;
}

// ---- fuse -----------------------------------------------------------------

struct FuseArgs {
  std::vector<std::string> inputs;
  std::vector<double> weights;
  std::string out;
  bool reference = false;
};

int cmd_fuse(const FuseArgs& a) {
  FusionPlan plan;
  for (const auto& p : a.inputs) plan.inputs.emplace_back(p);
  plan.weights = a.weights;
  plan.output = a.out;
  plan.kernel = a.reference ? FusionKernel::reference : FusionKernel::parallel;
  AdapterCheckpoint fused = average_checkpoints(plan);
  std::cout << canonical_dump(Json{{"output", a.out},
                                   {"tensors", fused.tensors.size()},
                                   {"rank", fused.metadata.rank},
                                   {"inputs", a.inputs.size()}})
            << "\n";
  return 0;
}

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
  std::string config;
  std::string strategy = "sequential_replace";
  std::string scenario = "without_results";
  std::string out;
  std::string examples;
  std::string model = "external";
  int workers = 1;
};

int cmd_synth(const SynthArgs& a) {
  Loaded l = load_all(a.config);
  SynthesisJob job;
  job.source = l.dataset;
  job.strategy = strategy_from_string(a.strategy);
  job.scenario = scenario_from_string(a.scenario);
  job.backend = l.backend;
  job.workers = a.workers;
  SynthesisResult result = synthesize(job);
  save_dataset(result.conversations, a.out);
  if (!a.examples.empty()) {
    std::ofstream ex(a.examples, std::ios::binary);
    write_training_examples(ex, emit_training_examples(result.conversations, job.scenario,
                                                       job.strategy, a.model,
                                                       l.registry.get()));
  }
  for (const auto& f : result.failures)
    print_error("synthesis_failure", f.error, Json{{"conversation_id", f.conversation_id}});
  std::cout << canonical_dump(Json{{"output", a.out},
                                   {"conversations", result.conversations.size()},
                                   {"failures", result.failures.size()}})
            << "\n";
  return result.failures.empty() ? 0 : kFailure;
}

// ---- validate -------------------------------------------------------------

struct ValidateArgs {
  std::string dataset;
  std::string registry;
};

int cmd_validate(const ValidateArgs& a) {
  const Registry registry = load_registry(a.registry);
  std::ifstream in(a.dataset, std::ios::binary);
  if (!in) throw ParseError(a.dataset, "cannot open dataset file");
  Json root;
  try {
    root = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(a.dataset, e.what());
  }
  if (!root.is_array()) throw ParseError(a.dataset, "dataset must be a JSON array");

  size_t blocking = 0;
  for (size_t i = 0; i < root.size(); ++i) {
    const std::string where = "/" + std::to_string(i);
    ValidationReport report;
    std::string id = root[i].is_object() ? root[i].value("id", std::string()) : std::string();
    try {
      report = validate_conversation(conversation_from_json(root[i], where), registry);
    } catch (const ParseError& e) {
      report.add("schema error", e.locator() + ": " + e.what());
    }
    for (const auto& f : report.findings) {
      std::cerr << canonical_dump(Json{{"conversation", id},
                                       {"index", i},
                                       {"kind", f.kind},
                                       {"detail", f.detail},
                                       {"blocking", f.blocking}})
                << "\n";
      if (f.blocking) ++blocking;
    }
  }
  std::cout << canonical_dump(Json{{"conversations", root.size()}, {"blocking_findings", blocking}})
            << "\n";
  return blocking ? kFindings : 0;
}

// ---- serve ----------------------------------------------------------------

struct ServeArgs {
  std::string config;
  std::string host;
  int port = 0;
};

Service* g_service = nullptr;

int cmd_serve(const ServeArgs& a) {
  Loaded l = load_all(a.config);
  Service::Options opts;
  opts.session_ttl = l.config.session_ttl;
  opts.cors_allowlist = l.config.cors_allowlist;
  Service service(std::move(l.dataset), l.registry, l.backend, opts);
  const std::string host = a.host.empty() ? l.config.host : a.host;
  const int port = a.port ? a.port : l.config.port;
  g_service = &service;
  std::signal(SIGINT, [](int) { g_service->stop(); });
  std::signal(SIGTERM, [](int) { g_service->stop(); });
  std::cerr << "listening on http://" << host << ":" << port << "\n";
  if (!service.listen(host, port)) {
    print_error("bind_failed", "cannot listen on " + host + ":" + std::to_string(port));
    return kFailure;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NPC dialogue pipeline tools"};
  app.require_subcommand(1);

  ChatArgs chat;
  auto* c = app.add_subcommand("chat", "Interactive dialogue with one conversation's NPC");
  c->add_option("-c,--config", chat.config, "Service config JSON")->required();
  c->add_option("conversation", chat.conversation, "Conversation id")->required();
  c->add_flag("--trace", chat.trace, "Print tool calls before each reply");
  c->add_option("--trace-log", chat.trace_log, "Append TurnOutcome JSONL here");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Score the pipeline against the dataset's gold turns");
  e->add_option("-c,--config", ev.config, "Service config JSON")->required();
  e->add_option("-o,--out", ev.out, "Report path");
  e->add_option("--task", ev.task, "auto | task1 | task2");
  e->add_option("--routing", ev.routing, "any_result | ok_only");
  e->add_option("--max-history", ev.max_history, "Turns kept in prompts (0 = all)");

  FuseArgs fu;
  auto* f = app.add_subcommand("fuse", "Weighted average of LoRA checkpoints");
  f->add_option("inputs", fu.inputs, "Input .safetensors files")->required()->expected(1, -1);
  f->add_option("-w,--weights", fu.weights, "Weights summing to 1 (default uniform)");
  f->add_option("-o,--out", fu.out, "Output path")->required();
  f->add_flag("--reference", fu.reference, "Use the serial reference kernel");

  SynthArgs sy;
  auto* s = app.add_subcommand("synth", "Regenerate NPC turns with the external models");
  s->add_option("-c,--config", sy.config, "Service config JSON")->required();
  s->add_option("--strategy", sy.strategy, "sequential_replace | whole_history");
  s->add_option("--scenario", sy.scenario, "function_call | with_results | without_results");
  s->add_option("-o,--out", sy.out, "Synthesized dataset path")->required();
  s->add_option("--examples", sy.examples, "Training examples JSONL path");
  s->add_option("--model", sy.model, "Model name recorded in provenance");
  s->add_option("-j,--workers", sy.workers, "Conversations synthesized concurrently");

  ValidateArgs va;
  auto* v = app.add_subcommand("validate", "Check a dataset against the function registry");
  v->add_option("dataset", va.dataset, "Dataset JSON")->required();
  v->add_option("-r,--registry", va.registry, "Registry JSON")->required();

  ServeArgs se;
  auto* sv = app.add_subcommand("serve", "Run the HTTP session service");
  sv->add_option("-c,--config", se.config, "Service config JSON")->required();
  sv->add_option("--host", se.host, "Override listen host");
  sv->add_option("--port", se.port, "Override listen port");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c) return cmd_chat(chat);
    if (*e) return cmd_eval(ev);
    if (*f) return cmd_fuse(fu);
    if (*s) return cmd_synth(sy);
    if (*v) return cmd_validate(va);
    if (*sv) return cmd_serve(se);
  } catch (const ParseError& ex) {
    print_error("parse_error", ex.what(), Json{{"locator", ex.locator()}});
  } catch (const InvariantError& ex) {
    print_error("invariant_error", ex.what());
  } catch (const CheckpointError& ex) {
    print_error("checkpoint_error", ex.what());
  } catch (const std::exception& ex) {
    print_error("error", ex.what());
  }
  return kFailure;
}
