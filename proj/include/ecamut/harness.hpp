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

// Mutation analysis: run test suites against the original policy and every
// mutant, decide kills, score suites, and search small domains exhaustively
// for witnesses against surviving mutants.

#ifndef ECAMUT_HARNESS_HPP
#define ECAMUT_HARNESS_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <iomanip>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ecamut/engine.hpp"
#include "ecamut/model.hpp"
#include "ecamut/mutation.hpp"
#include "ecamut/testgen.hpp"
#include "ecamut/text.hpp"
#include "json.hpp"

namespace ecamut {

/// Request lists compared as ordered (action, value) pairs; rule indices
/// are ignored.
inline bool same_requests(const StepRecord& a, const StepRecord& b) {
  return std::equal(a.requests.begin(), a.requests.end(), b.requests.begin(), b.requests.end(),
                    [](const ReconfigurationRequest& x, const ReconfigurationRequest& y) {
                      return x.action_property == y.action_property && x.value == y.value;
                    });
}

/// First step (0-based) at which the mutant's requests diverge, if any.
inline std::optional<std::size_t> kills(const Trace& original, const Trace& mutant) {
  if (original.size() != mutant.size())
    throw std::invalid_argument("trace lengths differ (" + std::to_string(original.size()) + " vs " +
                                std::to_string(mutant.size()) + ")");
  for (std::size_t s = 0; s < original.size(); ++s)
    if (!same_requests(original.steps[s], mutant.steps[s])) return s;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Scores
// ---------------------------------------------------------------------------

/// Non-negative fraction kept in lowest terms. A zero denominator means the
/// score is undefined (no mutants) and prints as "n/a".
struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 0;

  static Rational of(std::uint64_t n, std::uint64_t d) {
    if (d == 0) return {0, 0};
    auto g = std::gcd(n, d);
    return {n / g, d / g};
  }

  bool defined() const { return den != 0; }
  double value() const { return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0; }

  friend bool operator==(const Rational&, const Rational&) = default;
  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<unsigned __int128>(a.num) * b.den < static_cast<unsigned __int128>(b.num) * a.den;
  }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }

  std::string to_string() const {
    if (!defined()) return "n/a";
    return std::to_string(num) + "/" + std::to_string(den);
  }
};

struct Score {
  std::size_t killed = 0;
  std::size_t total = 0;

  Rational ratio() const { return Rational::of(killed, total); }

  friend bool operator==(const Score&, const Score&) = default;
};

struct KillMatrix {
  struct Column {
    std::size_t suite = 0;
    std::size_t flow = 0;
    friend bool operator==(const Column&, const Column&) = default;
  };

  std::vector<std::string> mutant_ids;  // rows
  std::vector<Column> columns;
  std::vector<std::vector<std::optional<std::size_t>>> cells;  // [row][col]: first divergence step

  bool killed(std::size_t row, std::size_t col) const { return cells[row][col].has_value(); }

  friend bool operator==(const KillMatrix&, const KillMatrix&) = default;
};

struct Survivor {
  std::string id;
  Operator op = Operator::ICP;
  std::string params;

  friend bool operator==(const Survivor&, const Survivor&) = default;
};

struct AnalysisReport {
  std::size_t mutant_count = 0;
  std::vector<Score> per_suite;
  Rational min_score;  // fractions of mutant_count
  Rational max_score;
  Rational avg_score;
  std::map<Operator, Score> per_operator;  // killed by any suite
  std::vector<Survivor> survivors;         // killed by no suite

  friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

struct Analysis {
  KillMatrix matrix;
  AnalysisReport report;
  std::vector<Operator> operators;  // per row, for export
  std::vector<std::string> params;  // per row, for export
};

namespace detail {

/// Calls fn(i) for i in [0, n) on `workers` threads. Each index is handled
/// exactly once; callers write results into per-index slots.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mu);
            if (!error) error = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

inline AnalysisReport summarize(const KillMatrix& m, const MutantSet& mutants, std::size_t suite_count) {
  AnalysisReport r;
  r.mutant_count = mutants.size();
  r.per_suite.assign(suite_count, Score{0, mutants.size()});

  std::vector<bool> ever_killed(mutants.size(), false);
  for (std::size_t row = 0; row < m.cells.size(); ++row) {
    std::vector<bool> by_suite(suite_count, false);
    for (std::size_t col = 0; col < m.columns.size(); ++col)
      if (m.killed(row, col)) by_suite[m.columns[col].suite] = true;
    for (std::size_t s = 0; s < suite_count; ++s)
      if (by_suite[s]) {
        ++r.per_suite[s].killed;
        ever_killed[row] = true;
      }
  }

  for (std::size_t row = 0; row < mutants.size(); ++row) {
    const auto& mu = mutants.mutants[row];
    auto& op = r.per_operator[mu.op];
    ++op.total;
    if (ever_killed[row]) {
      ++op.killed;
    } else {
      r.survivors.push_back({mu.id, mu.op, describe_params(mu.params)});
    }
  }

  if (suite_count > 0 && mutants.size() > 0) {
    std::size_t lo = r.per_suite.front().killed, hi = lo, sum = 0;
    for (const auto& s : r.per_suite) {
      lo = std::min(lo, s.killed);
      hi = std::max(hi, s.killed);
      sum += s.killed;
    }
    r.min_score = Rational::of(lo, mutants.size());
    r.max_score = Rational::of(hi, mutants.size());
    r.avg_score = Rational::of(sum, suite_count * mutants.size());
  }
  return r;
}

/// Runs every flow of every suite against the original and each mutant.
/// Results do not depend on `jobs` (0 = hardware concurrency).
inline Analysis run_analysis(const Policy& policy, const ContextSchema& schema, const SystemModel& sys,
                             const std::vector<TestSuite>& suites, const MutantSet& mutants,
                             unsigned jobs = 1) {
  Analysis out;
  auto& m = out.matrix;
  std::vector<const ContextFlow*> flows;
  for (std::size_t s = 0; s < suites.size(); ++s)
    for (std::size_t f = 0; f < suites[s].flows.size(); ++f) {
      m.columns.push_back({s, f});
      flows.push_back(&suites[s].flows[f]);
    }

  std::vector<Trace> originals(flows.size());
  const Simulator original(policy, schema, sys);
  detail::parallel_for(flows.size(), jobs, [&](std::size_t c) { originals[c] = original.run(*flows[c]); });

  m.mutant_ids.resize(mutants.size());
  m.cells.assign(mutants.size(), std::vector<std::optional<std::size_t>>(flows.size()));
  detail::parallel_for(mutants.size(), jobs, [&](std::size_t row) {
    const Mutant& mu = mutants.mutants[row];
    m.mutant_ids[row] = mu.id;
    const Simulator sim(mu.policy, schema, sys);
    for (std::size_t c = 0; c < flows.size(); ++c) m.cells[row][c] = kills(originals[c], sim.run(*flows[c]));
  });

  for (const auto& mu : mutants.mutants) {
    out.operators.push_back(mu.op);
    out.params.push_back(describe_params(mu.params));
  }
  out.report = summarize(m, mutants, suites.size());
  return out;
}

// ---------------------------------------------------------------------------
// Bounded exhaustive search for a killing flow
// ---------------------------------------------------------------------------

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Verdict {
  enum class Kind { Killable, EquivalentUpTo };

  Kind kind = Kind::EquivalentUpTo;
  std::optional<ContextFlow> witness;
  std::optional<std::size_t> divergence_step;
  std::size_t max_len = 0;
  std::uint64_t flows_explored = 0;

  bool killable() const { return kind == Kind::Killable; }
};

inline constexpr std::uint64_t kDefaultBruteForceBudget = 50'000'000;

/// Enumerates every valid flow of length 1..max_len in lexicographic order
/// (a flow precedes its extensions; instances ordered by value tuple) and
/// returns the first one on which the mutant's requests diverge from the
/// original's. Requires (number of instances)^max_len <= budget.
inline Verdict brute_force_survivor_check(const Policy& policy, const Policy& mutant,
                                          const ContextSchema& schema, const SystemModel& sys,
                                          std::size_t max_len,
                                          std::uint64_t budget = kDefaultBruteForceBudget) {
  // All instances in lexicographic order.
  std::uint64_t n = 1;
  for (const auto& p : schema.properties) {
    auto d = p.domain_size();
    if (d == 0 || n > budget / d) throw BudgetExceeded("instance space exceeds search budget");
    n *= d;
  }
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < max_len; ++i) {
    if (total > budget / n) throw BudgetExceeded("flow space exceeds search budget");
    total *= n;
  }

  std::vector<ContextInstance> instances;
  instances.reserve(n);
  ContextInstance cur;
  for (const auto& p : schema.properties) cur.push_back(p.lower);
  for (std::uint64_t k = 0; k < n; ++k) {
    instances.push_back(cur);
    for (std::size_t i = schema.arity(); i-- > 0;) {
      if (cur[i] < schema.properties[i].upper) {
        ++cur[i];
        break;
      }
      cur[i] = schema.properties[i].lower;
    }
  }

  const Simulator orig(policy, schema, sys);
  const Simulator mut(mutant, schema, sys);
  Verdict v;
  v.max_len = max_len;

  std::vector<std::size_t> path;
  // Depth-first: states along the current path are copied per level.
  auto dfs = [&](auto&& self, const EngineState& so, const EngineState& sm) -> bool {
    if (path.size() == max_len) return false;
    for (std::size_t k = 0; k < instances.size(); ++k) {
      if (!path.empty() && path.back() == k) continue;
      EngineState no = so, nm = sm;
      auto ro = orig.step(no, instances[k]);
      auto rm = mut.step(nm, instances[k]);
      ++v.flows_explored;
      path.push_back(k);
      if (!same_requests(ro, rm)) {
        ContextFlow w;
        for (auto i : path) w.instances.push_back(instances[i]);
        v.kind = Verdict::Kind::Killable;
        v.witness = std::move(w);
        v.divergence_step = path.size() - 1;
        return true;
      }
      if (self(self, no, nm)) return true;
      path.pop_back();
    }
    return false;
  };
  dfs(dfs, orig.initial(), mut.initial());
  return v;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline std::string percent(const Rational& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(0) << r.value() * 100.0 << "%";
  return os.str();
}

/// "93/130 ~ 71%"; the average keeps one decimal when it is not whole.
inline std::string score_cell(const Rational& r, std::size_t total, bool average = false) {
  if (!r.defined() || total == 0) return "n/a";
  double killed = r.value() * static_cast<double>(total);
  std::ostringstream os;
  if (average && std::abs(killed - std::round(killed)) > 1e-9) {
    os << std::fixed << std::setprecision(1) << killed;
  } else {
    os << static_cast<std::uint64_t>(std::llround(killed));
  }
  os << "/" << total << " \u2248 " << percent(r);
  return os.str();
}

inline std::string report_text(const Analysis& a) {
  const auto& r = a.report;
  std::vector<std::pair<std::string, std::string>> rows = {
      {"Test suite", "Random"},
      {"minimum mutation score", score_cell(r.min_score, r.mutant_count)},
      {"maximum mutation score", score_cell(r.max_score, r.mutant_count)},
      {"average mutation score", score_cell(r.avg_score, r.mutant_count, true)},
  };
  // Display width in code points; the score cells contain a UTF-8 glyph.
  auto width = [](const std::string& s) {
    return static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
  };
  auto pad = [&](const std::string& s, std::size_t w) { return s + std::string(w - width(s), ' '); };
  std::size_t w0 = 0, w1 = 0;
  for (const auto& [k, v] : rows) {
    w0 = std::max(w0, width(k));
    w1 = std::max(w1, width(v));
  }
  const auto line = "+" + std::string(w0 + 2, '-') + "+" + std::string(w1 + 2, '-') + "+\n";
  const auto dline = "+" + std::string(w0 + 2, '=') + "+" + std::string(w1 + 2, '=') + "+\n";
  std::ostringstream os;
  os << line;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << "| " << pad(rows[i].first, w0) << " | " << pad(rows[i].second, w1) << " |\n";
    os << (i == 0 ? dline : line);
  }

  os << "\nsuites: " << r.per_suite.size() << "  mutants: " << r.mutant_count << "\n";
  for (const auto& [op, s] : r.per_operator)
    os << "  " << std::left << std::setw(5) << to_string(op) << " " << s.killed << "/" << s.total << "\n";
  if (!r.survivors.empty()) {
    os << "survivors:\n";
    for (const auto& s : r.survivors) os << "  " << s.id << "  " << s.params << "\n";
  }
  return os.str();
}

inline nlohmann::json report_json(const Analysis& a) {
  const auto& r = a.report;
  auto rat = [](const Rational& q) -> nlohmann::json {
    if (!q.defined()) return "n/a";
    return {{"num", q.num}, {"den", q.den}, {"value", q.value()}};
  };
  nlohmann::json suites = nlohmann::json::array();
  for (const auto& s : r.per_suite) suites.push_back({{"killed", s.killed}, {"total", s.total}});
  nlohmann::json ops = nlohmann::json::object();
  for (const auto& [op, s] : r.per_operator)
    ops[std::string(to_string(op))] = {{"killed", s.killed}, {"total", s.total}};
  nlohmann::json survivors = nlohmann::json::array();
  for (const auto& s : r.survivors)
    survivors.push_back({{"id", s.id}, {"operator", std::string(to_string(s.op))}, {"params", s.params}});

  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : a.matrix.columns) cols.push_back({{"suite", c.suite}, {"flow", c.flow}});
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < a.matrix.mutant_ids.size(); ++i) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : a.matrix.cells[i]) cells.push_back(c ? nlohmann::json(*c) : nlohmann::json(nullptr));
    rows.push_back({{"id", a.matrix.mutant_ids[i]},
                    {"operator", std::string(to_string(a.operators[i]))},
                    {"params", a.params[i]},
                    {"first_divergence_step", cells}});
  }
  return {{"format", "ecamut-analysis/1"},
          {"mutant_count", r.mutant_count},
          {"min_score", rat(r.min_score)},
          {"max_score", rat(r.max_score)},
          {"avg_score", rat(r.avg_score)},
          {"per_suite", suites},
          {"per_operator", ops},
          {"survivors", survivors},
          {"kill_matrix", {{"columns", cols}, {"rows", rows}}}};
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// One row per (mutant, flow):
/// mutant_id,operator,params,suite,flow,killed,first_divergence_step
inline std::string report_csv(const Analysis& a) {
  std::string out = "mutant_id,operator,params,suite,flow,killed,first_divergence_step\n";
  for (std::size_t i = 0; i < a.matrix.mutant_ids.size(); ++i) {
    for (std::size_t c = 0; c < a.matrix.columns.size(); ++c) {
      const auto& cell = a.matrix.cells[i][c];
      out += csv_field(a.matrix.mutant_ids[i]) + "," + std::string(to_string(a.operators[i])) + "," +
             csv_field(a.params[i]) + "," + std::to_string(a.matrix.columns[c].suite) + "," +
             std::to_string(a.matrix.columns[c].flow) + "," + (cell ? "1" : "0") + "," +
             (cell ? std::to_string(*cell) : "") + "\n";
    }
  }
  return out;
}

enum class ReportFormat { Text, Json, Csv };

inline std::string report(const Analysis& a, ReportFormat f) {
  switch (f) {
    case ReportFormat::Text: return report_text(a);
    case ReportFormat::Json: return report_json(a).dump(2) + "\n";
    case ReportFormat::Csv: return report_csv(a);
  }
  return {};
}

}  // namespace ecamut

#endif  // ECAMUT_HARNESS_HPP
