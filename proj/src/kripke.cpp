#include "gamecheck/kripke.hpp"

#include <algorithm>
#include <exception>
#include <ostream>
#include <set>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gamecheck {

std::optional<StateId> KripkeGraph::find(std::span<const Value> v) const {
  if (!codec.in_domain(v)) return std::nullopt;
  const auto it = index.find(codec.encode(v));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

StateSet KripkeGraph::initial_set() const {
  StateSet s(size());
  for (auto i : initial) s.set(i);
  return s;
}

namespace {

// Successors of one frontier state: target codes plus packed joint-action
// keys ([action, choices...] per distinct pick, in actor order).
struct Expansion {
  std::vector<std::uint64_t> targets;
  std::vector<Value> keys;
  std::vector<std::uint32_t> key_end;
  std::exception_ptr error;
};

void expand_state(const Stepper& stepper, const StateCodec& codec, std::uint64_t code, Stepper::Scratch& s,
                  std::vector<Value>& v, Expansion& out) {
  const auto& spec = stepper.spec();
  codec.decode(code, v);
  stepper.compute_options(v, s);
  stepper.expand(v, s, [&](const StepView& view) {
    if (view.status != StepStatus::Ok) stepper.raise(view, v, s);
    out.targets.push_back(codec.encode(view.next));
    for (std::size_t i = 0; i < view.pick.size(); ++i) {
      const int o = view.pick[i];
      if (std::find(view.pick.begin(), view.pick.begin() + static_cast<std::ptrdiff_t>(i), o) !=
          view.pick.begin() + static_cast<std::ptrdiff_t>(i)) {
        continue;
      }
      const auto& opt = s.options[o];
      out.keys.push_back(opt.action);
      const auto nc = spec.actions[opt.action].choices.size();
      for (std::size_t k = 0; k < nc; ++k) out.keys.push_back(s.choice_buf[opt.choice_begin + k]);
    }
    out.key_end.push_back(static_cast<std::uint32_t>(out.keys.size()));
  });
}

void expand_frontier(const Stepper& stepper, const StateCodec& codec, std::span<const std::uint64_t> frontier,
                     std::vector<Expansion>& out, bool parallel) {
  out.assign(frontier.size(), Expansion{});
  const auto n = static_cast<std::int64_t>(frontier.size());
  auto body = [&](Stepper::Scratch& s, std::vector<Value>& v, std::int64_t i) {
    try {
      expand_state(stepper, codec, frontier[i], s, v, out[i]);
    } catch (...) {
      out[i].error = std::current_exception();
    }
  };
#ifdef _OPENMP
  if (parallel && n > 64 && omp_get_max_threads() > 1) {
#pragma omp parallel
    {
      Stepper::Scratch s;
      std::vector<Value> v(codec.width());
#pragma omp for schedule(dynamic, 64)
      for (std::int64_t i = 0; i < n; ++i) body(s, v, i);
    }
    return;
  }
#else
  (void)parallel;
#endif
  Stepper::Scratch s;
  std::vector<Value> v(codec.width());
  for (std::int64_t i = 0; i < n; ++i) body(s, v, i);
}

JointAction joint_from_key(const GameSpec& spec, std::span<const Value> key) {
  JointAction j;
  std::size_t p = 0;
  while (p < key.size()) {
    ActionPick pick;
    pick.action = static_cast<std::size_t>(key[p++]);
    const auto& a = spec.actions[pick.action];
    pick.choices.assign(key.begin() + static_cast<std::ptrdiff_t>(p),
                        key.begin() + static_cast<std::ptrdiff_t>(p + a.choices.size()));
    p += a.choices.size();
    pick.actors = a.actor_index;
    std::sort(pick.actors.begin(), pick.actors.end());
    j.picks.push_back(std::move(pick));
  }
  return j;
}

// Frontier states expanded per batch; bounds the memory held by pending
// successor lists on wide BFS levels.
constexpr std::size_t kChunk = 1 << 14;

KripkeGraph build(const GameSpec& spec, const BuildOptions& opts, bool parallel) {
  KripkeGraph g;
  g.spec = spec;
  g.codec = StateCodec(g.spec);
  const Stepper stepper(g.spec);

  std::vector<std::uint64_t> frontier;
  auto discover = [&](std::uint64_t code, std::size_t pending) -> StateId {
    const auto [it, fresh] = g.index.try_emplace(code, static_cast<StateId>(g.codes.size()));
    if (fresh) {
      if (g.codes.size() >= opts.max_states) {
        g.index.erase(it);
        throw StateCapExceeded(opts.max_states, g.codes.size(), pending);
      }
      g.codes.push_back(code);
    }
    return it->second;
  };

  for (const auto& v : initial_vectors(g.spec)) {
    const std::size_t before = g.codes.size();
    const StateId id = discover(g.codec.encode(v), 0);
    if (g.codes.size() > before) frontier.push_back(g.codes[id]);
    if (std::find(g.initial.begin(), g.initial.end(), id) == g.initial.end()) g.initial.push_back(id);
  }

  std::unordered_map<std::string, std::uint32_t> joint_ids;
  std::vector<Expansion> results;
  std::vector<std::uint64_t> next;
  g.succ_offsets.push_back(0);
  while (!frontier.empty()) {
    next.clear();
    for (std::size_t base = 0; base < frontier.size(); base += kChunk) {
      const std::size_t len = std::min(kChunk, frontier.size() - base);
      expand_frontier(stepper, g.codec, std::span(frontier).subspan(base, len), results, parallel);
      for (std::size_t c = 0; c < len; ++c) {
        const std::size_t f = base + c;
        auto& r = results[c];
        if (r.error) std::rethrow_exception(r.error);
        if (r.targets.empty()) {
          throw Error("Deadlock", "state " + format_state(g.spec, g.codec.decode(frontier[f])) + " has no successor");
        }
        std::uint32_t key_begin = 0;
        for (std::size_t k = 0; k < r.targets.size(); ++k) {
          const std::span<const Value> key(r.keys.data() + key_begin, r.key_end[k] - key_begin);
          key_begin = r.key_end[k];
          const std::string packed(reinterpret_cast<const char*>(key.data()), key.size_bytes());
          auto [jt, fresh_joint] = joint_ids.try_emplace(packed, static_cast<std::uint32_t>(g.joint_actions.size()));
          if (fresh_joint) g.joint_actions.push_back(joint_from_key(g.spec, key));
          const std::size_t before = g.codes.size();
          const StateId t = discover(r.targets[k], frontier.size() - f + next.size());
          if (g.codes.size() > before) next.push_back(r.targets[k]);
          g.succ.push_back({t, jt->second});
        }
        g.succ_offsets.push_back(g.succ.size());
        r = Expansion{};
      }
    }
    frontier.swap(next);
  }

  const std::size_t n = g.size();
  g.pred_offsets.assign(n + 1, 0);
  for (const auto& e : g.succ) ++g.pred_offsets[e.state + 1];
  for (std::size_t i = 0; i < n; ++i) g.pred_offsets[i + 1] += g.pred_offsets[i];
  g.pred.resize(g.succ.size());
  std::vector<std::size_t> fill(g.pred_offsets.begin(), g.pred_offsets.end() - 1);
  for (StateId s = 0; s < n; ++s) {
    for (const auto& e : g.successors(s)) g.pred[fill[e.state]++] = {s, e.joint};
  }

  g.labels = label_states(g, parallel);
  return g;
}

}  // namespace

std::vector<StateSet> label_states(const KripkeGraph& g, bool parallel) {
  const Stepper stepper(g.spec);
  const std::size_t np = g.spec.propositions.size();
  std::vector<StateSet> labels(np, StateSet(g.size()));
  if (np == 0) return labels;
  const auto words = static_cast<std::int64_t>(labels[0].word_count());
  auto body = [&](std::vector<Value>& v, std::vector<std::uint64_t>& acc, std::int64_t w) {
    std::fill(acc.begin(), acc.end(), 0);
    const std::size_t lo = static_cast<std::size_t>(w) * 64;
    const std::size_t hi = std::min(lo + 64, g.size());
    for (std::size_t s = lo; s < hi; ++s) {
      g.codec.decode(g.codes[s], v);
      for (std::size_t p = 0; p < np; ++p) {
        if (stepper.proposition(p, v)) acc[p] |= 1ULL << (s - lo);
      }
    }
    for (std::size_t p = 0; p < np; ++p) labels[p].set_word(static_cast<std::size_t>(w), acc[p]);
  };
#ifdef _OPENMP
  if (parallel && words > 16 && omp_get_max_threads() > 1) {
#pragma omp parallel
    {
      std::vector<Value> v(g.codec.width());
      std::vector<std::uint64_t> acc(np);
#pragma omp for schedule(static)
      for (std::int64_t w = 0; w < words; ++w) body(v, acc, w);
    }
    return labels;
  }
#else
  (void)parallel;
#endif
  std::vector<Value> v(g.codec.width());
  std::vector<std::uint64_t> acc(np);
  for (std::int64_t w = 0; w < words; ++w) body(v, acc, w);
  return labels;
}

KripkeGraph build_kripke(const GameSpec& spec, const BuildOptions& opts) { return build(spec, opts, opts.parallel); }

KripkeGraph build_kripke_serial(const GameSpec& spec, const BuildOptions& opts) { return build(spec, opts, false); }

GraphStats stats(const KripkeGraph& g) {
  GraphStats st;
  st.states = g.size();
  st.edges = g.succ.size();
  st.initial = g.initial.size();
  st.joint_actions = g.joint_actions.size();
  std::vector<StateId> targets;
  for (StateId s = 0; s < g.size(); ++s) {
    const auto out = g.successors(s);
    st.max_out_degree = std::max<std::uint64_t>(st.max_out_degree, out.size());
    targets.clear();
    for (const auto& e : out) targets.push_back(e.state);
    std::sort(targets.begin(), targets.end());
    st.transitions += static_cast<std::uint64_t>(std::unique(targets.begin(), targets.end()) - targets.begin());
  }
  for (std::size_t p = 0; p < g.labels.size(); ++p) {
    st.proposition_counts.emplace_back(g.spec.propositions[p].name, g.labels[p].count());
  }
  return st;
}

void dump_graph(const KripkeGraph& g, std::ostream& os) {
  os << "# states\n";
  for (StateId s = 0; s < g.size(); ++s) {
    os << s << '\t';
    const auto v = g.state(s);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) os << ',';
      os << g.spec.attributes[i].name << '=' << v[i];
    }
    os << '\n';
  }
  os << "# initial\n";
  for (auto s : g.initial) os << s << '\n';
  os << "# edges\n";
  for (StateId s = 0; s < g.size(); ++s) {
    for (const auto& e : g.successors(s)) {
      os << s << '\t' << e.state << '\t' << format_joint_action(g.spec, g.joint_actions[e.joint]) << '\n';
    }
  }
}

}  // namespace gamecheck
