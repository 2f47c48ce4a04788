// Copyright 2026 The ecamut Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Exit codes: 0 success, 1 validation or syntax
// error (including bad command-line usage), 2 runtime error.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ecamut/engine.hpp"
#include "ecamut/harness.hpp"
#include "ecamut/io.hpp"
#include "ecamut/model.hpp"
#include "ecamut/mutation.hpp"
#include "ecamut/testgen.hpp"
#include "ecamut/text.hpp"

namespace fs = std::filesystem;
using namespace ecamut;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kRuntime = 2;

/// Input problems the user has to fix in their files.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class F>
auto with_file(const std::string& path, F&& parse) {
  std::string text = read_text_file(path);
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw InputError(path + ":" + e.what());
  } catch (const FlowError& e) {
    throw InputError(path + ": " + e.what());
  }
}

Policy load_policy(const std::string& path) {
  return with_file(path, [](const std::string& t) { return parse_policy(t); });
}
ContextSchema load_schema(const std::string& path) {
  return with_file(path, [](const std::string& t) { return parse_schema(t); });
}
SystemModel load_sys(const std::string& path) {
  return with_file(path, [](const std::string& t) { return parse_system_model(t); });
}
ContextFlow load_flow(const std::string& path, const ContextSchema& schema) {
  return with_file(path, [&](const std::string& t) { return parse_flow(t, schema); });
}

void require_valid(const Policy& p, const ContextSchema& schema, const SystemModel& sys,
                   const std::string& what) {
  auto report = validate_policy(p, schema, sys);
  if (!report.ok()) throw InputError(what + " does not validate:\n" + report.to_string());
}

/// A directory holding suite.json is one suite; otherwise each
/// subdirectory holding suite.json is a suite, in name order.
std::vector<TestSuite> load_suites(const std::vector<std::string>& dirs, const ContextSchema& schema) {
  std::vector<TestSuite> suites;
  auto load = [&](const fs::path& d) {
    try {
      suites.push_back(read_suite(d, schema));
    } catch (const ParseError& e) {
      throw InputError(e.what());
    } catch (const FlowError& e) {
      throw InputError(d.string() + ": " + e.what());
    }
  };
  for (const auto& d : dirs) {
    if (fs::exists(fs::path(d) / "suite.json")) {
      load(d);
      continue;
    }
    if (!fs::is_directory(d)) throw InputError("not a suite directory: " + d);
    std::vector<fs::path> subs;
    for (const auto& e : fs::directory_iterator(d))
      if (e.is_directory() && fs::exists(e.path() / "suite.json")) subs.push_back(e.path());
    if (subs.empty()) throw InputError("no suites found under " + d);
    std::sort(subs.begin(), subs.end());
    for (const auto& s : subs) load(s);
  }
  return suites;
}

std::set<Operator> parse_ops(const std::string& list) {
  std::set<Operator> ops;
  std::string item;
  std::istringstream in(list);
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    auto op = parse_operator(item);
    if (!op) throw InputError("unknown operator '" + item + "'");
    ops.insert(*op);
  }
  if (ops.empty()) throw InputError("no operators selected");
  return ops;
}

struct Common {
  std::string schema;
  std::string sys;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mutation analysis for event-condition-action adaptation policies"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ecamut 1.0");

  // validate
  std::string v_policy;
  Common v;
  auto* validate = app.add_subcommand("validate", "Check a policy against a schema and system model");
  validate->add_option("policy", v_policy, "Policy file (.apl)")->required();
  validate->add_option("--schema", v.schema, "Context schema (.ctx)")->required();
  validate->add_option("--sys", v.sys, "System model (.sys)")->required();

  // mutate
  std::string m_policy, m_schema, m_ops = "icp,isv,imv,sra,mrcv", m_out;
  std::size_t m_imv_n = 2;
  auto* mutate = app.add_subcommand("mutate", "Generate mutants of a policy");
  mutate->add_option("policy", m_policy, "Policy file (.apl)")->required();
  mutate->add_option("--schema", m_schema, "Context schema (.ctx)")->required();
  mutate->add_option("--ops", m_ops, "Comma-separated operators")->capture_default_str();
  mutate->add_option("--imv-n", m_imv_n, "Couples per IMV mutant")->capture_default_str()->check(CLI::Range(2, 64));
  mutate->add_option("--out", m_out, "Output directory")->required();

  // run
  std::string r_policy, r_flow, r_trace_out, r_format = "text";
  Common r;
  auto* run = app.add_subcommand("run", "Simulate a policy on one context flow");
  run->add_option("policy", r_policy, "Policy file (.apl)")->required();
  run->add_option("--schema", r.schema, "Context schema (.ctx)")->required();
  run->add_option("--sys", r.sys, "System model (.sys)")->required();
  run->add_option("--flow", r_flow, "Context flow (.flow)")->required();
  run->add_option("--trace-out", r_trace_out, "Write the trace here instead of stdout");
  run->add_option("--trace-format", r_format, "text or json")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  // gen
  std::string g_schema, g_out;
  std::size_t g_flows = 10, g_len = 20, g_suites = 1;
  std::uint64_t g_seed = 1;
  auto* gen = app.add_subcommand("gen", "Generate seeded random test suites");
  gen->add_option("--schema", g_schema, "Context schema (.ctx)")->required();
  gen->add_option("--flows", g_flows, "Flows per suite")->capture_default_str();
  gen->add_option("--len", g_len, "Instances per flow")->capture_default_str();
  gen->add_option("--seed", g_seed, "Seed of the first suite; suite k uses seed+k")->capture_default_str();
  gen->add_option("--suites", g_suites, "Number of suites")->capture_default_str();
  gen->add_option("--out", g_out, "Output directory")->required();

  // analyze
  std::string a_policy, a_mutants, a_format = "text", a_out;
  std::vector<std::string> a_suites;
  unsigned a_jobs = 1;
  Common a;
  auto* analyze = app.add_subcommand("analyze", "Score test suites against a mutant set");
  analyze->add_option("policy", a_policy, "Policy file (.apl)")->required();
  analyze->add_option("--schema", a.schema, "Context schema (.ctx)")->required();
  analyze->add_option("--sys", a.sys, "System model (.sys)")->required();
  analyze->add_option("--mutants", a_mutants, "Mutant directory written by 'mutate'")->required();
  analyze->add_option("--suites", a_suites, "Suite directories written by 'gen'")->required();
  analyze->add_option("--format", a_format, "text, json or csv")
      ->check(CLI::IsMember({"text", "json", "csv"}))
      ->capture_default_str();
  analyze->add_option("--jobs", a_jobs, "Worker threads (0 = all cores)")->capture_default_str();
  analyze->add_option("--out", a_out, "Write the report here instead of stdout");

  // witness
  std::string w_policy, w_mutant;
  std::size_t w_max_len = 3;
  std::uint64_t w_budget = kDefaultBruteForceBudget;
  Common w;
  auto* witness = app.add_subcommand("witness", "Search exhaustively for a flow that kills a mutant");
  witness->add_option("policy", w_policy, "Original policy (.apl)")->required();
  witness->add_option("mutant", w_mutant, "Mutant policy (.apl)")->required();
  witness->add_option("--schema", w.schema, "Small-domain context schema (.ctx)")->required();
  witness->add_option("--sys", w.sys, "System model (.sys)")->required();
  witness->add_option("--max-len", w_max_len, "Longest flow to try")->capture_default_str();
  witness->add_option("--budget", w_budget, "Upper bound on instances^max-len")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    if (*validate) {
      auto schema = load_schema(v.schema);
      auto sys = load_sys(v.sys);
      auto policy = load_policy(v_policy);
      auto report = validate_policy(policy, schema, sys);
      if (!report.ok()) {
        std::cerr << report.to_string();
        return kInvalid;
      }
      std::cout << "ok: " << policy.size() << " rules\n";
    } else if (*mutate) {
      auto schema = load_schema(m_schema);
      auto policy = load_policy(m_policy);
      auto ops = parse_ops(m_ops);
      auto set = enumerate_mutants(policy, schema, ops, m_imv_n);
      write_mutant_set(set, m_out);
      std::cout << "raw " << set.raw_count << ", kept " << set.deduped_count << " mutants in " << m_out
                << "\n";
    } else if (*run) {
      auto schema = load_schema(r.schema);
      auto sys = load_sys(r.sys);
      auto policy = load_policy(r_policy);
      require_valid(policy, schema, sys, r_policy);
      auto flow = load_flow(r_flow, schema);
      auto trace = run_flow(policy, schema, sys, flow);
      std::string out = r_format == "json" ? trace_to_json(trace).dump(2) + "\n" : trace_to_text(trace);
      if (r_trace_out.empty()) {
        std::cout << out;
      } else {
        write_text_file(r_trace_out, out);
      }
    } else if (*gen) {
      auto schema = load_schema(g_schema);
      for (std::size_t k = 0; k < g_suites; ++k) {
        auto suite = random_suite(schema, g_flows, g_len, g_seed + k);
        char name[32];
        std::snprintf(name, sizeof name, "suite-%03zu", k);
        write_suite(suite, g_suites == 1 ? fs::path(g_out) : fs::path(g_out) / name);
      }
      std::cout << "wrote " << g_suites << " suite(s) to " << g_out << "\n";
    } else if (*analyze) {
      auto schema = load_schema(a.schema);
      auto sys = load_sys(a.sys);
      auto policy = load_policy(a_policy);
      require_valid(policy, schema, sys, a_policy);
      MutantSet mutants;
      try {
        mutants = read_mutant_set(a_mutants);
      } catch (const ParseError& e) {
        throw InputError(a_mutants + ": " + e.what());
      }
      if (!(mutants.original == policy))
        std::cerr << "warning: mutant set was generated from a different policy\n";
      auto suites = load_suites(a_suites, schema);
      auto analysis = run_analysis(policy, schema, sys, suites, mutants, a_jobs);
      auto fmt = a_format == "json" ? ReportFormat::Json
                 : a_format == "csv" ? ReportFormat::Csv
                                     : ReportFormat::Text;
      auto out = report(analysis, fmt);
      if (a_out.empty()) {
        std::cout << out;
      } else {
        write_text_file(a_out, out);
      }
    } else if (*witness) {
      auto schema = load_schema(w.schema);
      auto sys = load_sys(w.sys);
      auto policy = load_policy(w_policy);
      auto mutant = load_policy(w_mutant);
      require_valid(policy, schema, sys, w_policy);
      require_valid(mutant, schema, sys, w_mutant);
      auto verdict = brute_force_survivor_check(policy, mutant, schema, sys, w_max_len, w_budget);
      if (verdict.killable()) {
        std::cout << "killable: diverges at step " << *verdict.divergence_step + 1 << " of witness\n"
                  << serialize_flow(*verdict.witness);
      } else {
        std::cout << "equivalent up to length " << verdict.max_len << " (" << verdict.flows_explored
                  << " flows explored)\n";
      }
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const FlowError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kOk;
}
