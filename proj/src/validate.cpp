#include "gamecheck/validate.hpp"

#include <algorithm>
#include <exception>
#include <map>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gamecheck/semantics.hpp"

namespace gamecheck {

const char* kind_name(ViolationKind k) {
  switch (k) {
    case ViolationKind::Coverage: return "OP-COVERAGE";
    case ViolationKind::Conflict: return "OP-CONFLICT";
    case ViolationKind::Range: return "RANGE";
    case ViolationKind::CollisionConflict: return "COLLISION-CONFLICT";
    case ViolationKind::Evaluation: return "EVALUATION";
    case ViolationKind::EmptyInitial: return "INITIAL";
  }
  return "?";
}

bool ValidationReport::has(ViolationKind k) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == k; });
}

namespace {

using Key = std::pair<ViolationKind, std::string>;

struct Found {
  std::string message;
  bool has_witness = true;
  std::uint64_t first = 0;
  std::uint64_t count = 0;
};

using Findings = std::map<Key, Found>;

void note(Findings& f, ViolationKind kind, std::string subject, std::uint64_t code, const std::function<std::string()>& msg) {
  auto [it, fresh] = f.try_emplace({kind, std::move(subject)});
  if (fresh || code < it->second.first) {
    it->second.first = code;
    it->second.message = msg();
  }
  ++it->second.count;
}

void merge(Findings& into, Findings&& from) {
  for (auto& [k, v] : from) {
    auto [it, fresh] = into.try_emplace(k, v);
    if (fresh) continue;
    it->second.has_witness = it->second.has_witness && v.has_witness;
    if (v.first < it->second.first) {
      it->second.first = v.first;
      it->second.message = std::move(v.message);
    }
    it->second.count += v.count;
  }
}

struct ConflictPair {
  std::size_t a, b;
  std::string attrs;
};

class Scanner {
 public:
  explicit Scanner(const GameSpec& spec) : spec_(spec), stepper_(spec), codec_(spec) {
    for (std::size_t i = 0; i < spec.actions.size(); ++i) {
      for (std::size_t j = i + 1; j < spec.actions.size(); ++j) {
        const auto& a = spec.actions[i];
        const auto& b = spec.actions[j];
        bool disjoint = true;
        for (auto x : a.actor_index) {
          if (std::find(b.actor_index.begin(), b.actor_index.end(), x) != b.actor_index.end()) disjoint = false;
        }
        if (!disjoint) continue;
        std::string common;
        for (const auto& wa : a.writes) {
          for (const auto& wb : b.writes) {
            if (wa.index == wb.index) common += (common.empty() ? "" : ", ") + wa.target;
          }
        }
        if (!common.empty()) pairs_.push_back({i, j, common});
      }
    }
  }

  const StateCodec& codec() const { return codec_; }

  void scan(std::uint64_t begin, std::uint64_t end, Findings& out) const {
    Stepper::Scratch s;
    std::vector<Value> v(codec_.width());
    std::vector<char> admissible(spec_.actions.size());
    for (std::uint64_t code = begin; code < end; ++code) {
      codec_.decode(code, v);
      try {
        visit(code, v, s, admissible, out);
      } catch (const Error& e) {
        const std::string what = e.what();
        note(out, ViolationKind::Evaluation, e.code(), code,
             [&] { return what + " at " + format_state(spec_, v); });
      }
    }
  }

 private:
  void visit(std::uint64_t code, std::span<const Value> v, Stepper::Scratch& s, std::vector<char>& admissible,
             Findings& out) const {
    stepper_.compute_options(v, s);
    auto at = [&] { return " at " + format_state(spec_, v); };

    bool covered = true;
    for (std::size_t i = 0; i < spec_.actors.size(); ++i) {
      if (s.per_actor[i].empty()) {
        covered = false;
        note(out, ViolationKind::Coverage, spec_.actors[i], code,
             [&] { return "actor '" + spec_.actors[i] + "' has no admissible action" + at(); });
      }
    }

    std::fill(admissible.begin(), admissible.end(), 0);
    for (const auto& opt : s.options) {
      admissible[opt.action] = 1;
      const auto& a = spec_.actions[opt.action];
      for (std::size_t k = 0; k < a.writes.size(); ++k) {
        const Value val = s.value_buf[opt.value_begin + k];
        const auto& attr = spec_.attributes[a.writes[k].index];
        if (attr.contains(val)) continue;
        note(out, ViolationKind::Range, a.name + "." + attr.name, code, [&] {
          std::string c;
          for (std::size_t q = 0; q < a.choices.size(); ++q) {
            c += (q ? ", " : " with ") + a.choices[q].name + "=" + std::to_string(s.choice_buf[opt.choice_begin + q]);
          }
          return "action '" + a.name + "'" + c + " writes " + std::to_string(val) + " to '" + attr.name +
                 "' outside [" + std::to_string(attr.lo) + ", " + std::to_string(attr.hi) + "]" + at();
        });
      }
    }

    for (const auto& p : pairs_) {
      if (!admissible[p.a] || !admissible[p.b]) continue;
      const auto& na = spec_.actions[p.a].name;
      const auto& nb = spec_.actions[p.b].name;
      note(out, ViolationKind::Conflict, na + " / " + nb, code, [&] {
        return "actions '" + na + "' and '" + nb + "' are both admissible and write " + p.attrs + at();
      });
    }

    if (!covered) return;
    const std::size_t joint = stepper_.expand(v, s, [&](const StepView& view) {
      if (view.status == StepStatus::CollisionConflict) {
        const auto& a = spec_.collisions[view.other].name;
        const auto& b = spec_.collisions[view.source].name;
        note(out, ViolationKind::CollisionConflict, a + " / " + b, code, [&] {
          return "collisions '" + a + "' and '" + b + "' both write '" + spec_.attributes[view.attribute].name +
                 "'" + at() + " under " + format_joint_action(spec_, stepper_.joint_action(s, view.pick));
        });
      } else if (view.status == StepStatus::RangeViolation && view.source_is_collision) {
        const auto& c = spec_.collisions[view.source];
        const auto& attr = spec_.attributes[view.attribute];
        note(out, ViolationKind::Range, c.name + "." + attr.name, code, [&] {
          return "collision '" + c.name + "' writes " + std::to_string(view.value) + " to '" + attr.name +
                 "' outside [" + std::to_string(attr.lo) + ", " + std::to_string(attr.hi) + "]" + at() +
                 " under " + format_joint_action(spec_, stepper_.joint_action(s, view.pick));
        });
      }
    });
    if (joint == 0) {
      note(out, ViolationKind::Coverage, "joint action", code, [&] {
        return "every actor has an admissible action but no consistent joint action exists" + at();
      });
    }
  }

  const GameSpec& spec_;
  Stepper stepper_;
  StateCodec codec_;
  std::vector<ConflictPair> pairs_;
};

ValidationReport run(const GameSpec& spec, const ValidateOptions& opts, bool parallel) {
  ValidationReport report;
  Findings found;

  for (std::size_t i = 0; i < spec.actors.size(); ++i) {
    const bool any = std::any_of(spec.actions.begin(), spec.actions.end(), [&](const ActionDecl& a) {
      return std::find(a.actor_index.begin(), a.actor_index.end(), i) != a.actor_index.end();
    });
    if (!any) {
      note(found, ViolationKind::Coverage, spec.actors[i], 0,
           [&] { return "actor '" + spec.actors[i] + "' owns no action"; });
      found[{ViolationKind::Coverage, spec.actors[i]}].has_witness = false;
    }
  }

  const auto size = domain_product(spec);
  if (!size || *size > opts.cap) {
    const std::string why = size ? "|V| = " + std::to_string(*size) + " exceeds the enumeration cap " +
                                       std::to_string(opts.cap)
                                 : "|V| does not fit in 64 bits";
    if (opts.require_exhaustive) throw DomainTooLarge(why);
    report.skipped_reason = why;
  } else {
    report.exhaustive = true;
    report.vectors_checked = *size;
    const Scanner scanner(spec);
    if (spec.initial.constraints.empty() ? spec.initial.vectors.empty()
                                         : initial_vectors(spec, opts.cap).empty()) {
      note(found, ViolationKind::EmptyInitial, "initial", 0, [] { return "the initial set is empty"; });
      found[{ViolationKind::EmptyInitial, "initial"}].has_witness = false;
    }
#ifdef _OPENMP
    if (parallel && *size > 4096 && omp_get_max_threads() > 1) {
      const std::uint64_t n = *size;
      std::exception_ptr failure;
#pragma omp parallel
      {
        Findings local;
        try {
          const std::uint64_t t = omp_get_thread_num();
          const std::uint64_t nt = omp_get_num_threads();
          scanner.scan(n * t / nt, n * (t + 1) / nt, local);
        } catch (...) {
#pragma omp critical(gamecheck_validate_error)
          failure = std::current_exception();
        }
#pragma omp critical(gamecheck_validate_merge)
        merge(found, std::move(local));
      }
      if (failure) std::rethrow_exception(failure);
    } else {
      scanner.scan(0, *size, found);
    }
#else
    (void)parallel;
    scanner.scan(0, *size, found);
#endif
  }

  StateCodec codec;
  if (report.exhaustive) codec = StateCodec(spec);
  for (auto& [key, f] : found) {
    Violation v{key.first, key.second, std::move(f.message), std::nullopt, f.count};
    if (report.exhaustive && f.has_witness) v.witness = codec.decode(f.first);
    report.violations.push_back(std::move(v));
  }
  return report;
}

}  // namespace

ValidationReport validate_game(const GameSpec& spec, const ValidateOptions& opts) {
  return run(spec, opts, opts.parallel);
}

ValidationReport validate_game_serial(const GameSpec& spec, const ValidateOptions& opts) {
  return run(spec, opts, false);
}

std::string format_report(const GameSpec& spec, const ValidationReport& r) {
  std::string out;
  if (!r.exhaustive) out += "SKIPPED: per-vector checks (" + r.skipped_reason + ")\n";
  for (const auto& v : r.violations) {
    out += std::string(kind_name(v.kind)) + " [" + v.subject + "]: " + v.message;
    if (v.occurrences > 1) out += " (" + std::to_string(v.occurrences) + " vectors)";
    out += '\n';
    if (v.witness) out += "  witness " + format_state(spec, *v.witness) + '\n';
  }
  if (r.ok()) out += r.exhaustive ? "OK\n" : "OK (static checks only)\n";
  return out;
}

}  // namespace gamecheck
