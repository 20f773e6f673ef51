#include "gamecheck/spec_io.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "gamecheck/expr_parser.hpp"

namespace gamecheck {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IOError", "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("IOError", "cannot write '" + path.string() + "'");
  out << text;
}

namespace {

SourceLocation where(const YAML::Node& n) {
  const auto m = n.Mark();
  if (m.line < 0) return {};
  return {static_cast<std::size_t>(m.line) + 1, static_cast<std::size_t>(m.column) + 1};
}

YAML::Node load_yaml(std::string_view text) {
  try {
    return YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.msg, {static_cast<std::size_t>(e.mark.line) + 1, static_cast<std::size_t>(e.mark.column) + 1});
  }
}

void expect_map(const YAML::Node& n, const std::string& what) {
  if (!n.IsMap()) throw ParseError(what + " must be a mapping", where(n));
}

void expect_seq(const YAML::Node& n, const std::string& what) {
  if (!n.IsSequence()) throw ParseError(what + " must be a list", where(n));
}

std::string scalar(const YAML::Node& n, const std::string& what) {
  if (!n.IsScalar()) throw ParseError(what + " must be a scalar", where(n));
  return n.Scalar();
}

// Key/value pairs of a mapping in document order, rejecting duplicate and
// (when `allowed` is nonempty) unknown keys.
std::vector<std::pair<std::string, YAML::Node>> entries(const YAML::Node& n, const std::string& what,
                                                        std::initializer_list<const char*> allowed = {}) {
  expect_map(n, what);
  std::vector<std::pair<std::string, YAML::Node>> out;
  std::set<std::string> seen;
  for (auto it = n.begin(); it != n.end(); ++it) {
    const std::string key = scalar(it->first, "key in " + what);
    if (allowed.size() && std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; })) {
      throw UnknownKey("unknown key '" + key + "' in " + what, where(it->first));
    }
    if (!seen.insert(key).second) throw DuplicateName("duplicate key '" + key + "' in " + what, where(it->first));
    out.emplace_back(key, it->second);
  }
  return out;
}

const YAML::Node* field(const std::vector<std::pair<std::string, YAML::Node>>& e, const char* key) {
  for (const auto& [k, v] : e) {
    if (k == key) return &v;
  }
  return nullptr;
}

const YAML::Node& required(const std::vector<std::pair<std::string, YAML::Node>>& e, const char* key,
                           const YAML::Node& parent, const std::string& what) {
  const YAML::Node* n = field(e, key);
  if (!n) throw ParseError(what + " is missing '" + key + "'", where(parent));
  return *n;
}

Expr expression(const YAML::Node& n, const std::string& what) {
  return parse_expression(scalar(n, what), where(n));
}

// Integer-valued expression over the parameters declared so far.
Value constant(const YAML::Node& n, const std::vector<ParameterDecl>& params, const std::string& what) {
  const Expr e = map_refs(expression(n, what), [&](const Expr& ref) -> Expr {
    for (const auto& p : params) {
      if (p.name == ref.name() && !ref.is_pre()) return Expr::integer(p.value);
    }
    throw UnknownName(what + " refers to '" + ref.name() + "', which is not a parameter", where(n));
  });
  const Expr f = fold(e);
  if (f.op() != Op::Int) throw ParseError(what + " must be a constant integer expression", where(n));
  return f.literal();
}

std::pair<Value, Value> range(const YAML::Node& n, const std::vector<ParameterDecl>& params, const std::string& what) {
  if (!n.IsSequence() || n.size() != 2) throw ParseError(what + " range must be [lo, hi]", where(n));
  return {constant(n[0], params, what + " lower bound"), constant(n[1], params, what + " upper bound")};
}

std::vector<std::string> name_list(const YAML::Node& n, const std::string& what) {
  if (n.IsScalar()) return {n.Scalar()};
  expect_seq(n, what);
  std::vector<std::string> out;
  for (const auto& x : n) out.push_back(scalar(x, what));
  return out;
}

std::vector<Assignment> writes(const YAML::Node& n, const std::string& what) {
  std::vector<Assignment> out;
  for (const auto& [k, v] : entries(n, "writes of " + what)) {
    out.push_back({k, expression(v, "write to '" + k + "' in " + what), -1});
  }
  return out;
}

}  // namespace

GameSpec parse_game_spec(std::string_view text) {
  const YAML::Node root = load_yaml(text);
  if (!root || root.IsNull()) throw ParseError("empty game document");
  const auto top = entries(root, "game document",
                           {"actors", "parameters", "attributes", "actions", "collisions", "initial", "propositions",
                            "defaults", "provenance"});
  GameSpec spec;

  spec.actors = name_list(required(top, "actors", root, "game document"), "actors");

  if (const auto* n = field(top, "parameters"); n && !n->IsNull()) {
    expect_seq(*n, "parameters");
    for (const auto& item : *n) {
      const auto e = entries(item, "parameter", {"name", "value"});
      const std::string name = scalar(required(e, "name", item, "parameter"), "parameter name");
      const Value value = constant(required(e, "value", item, "parameter"), spec.parameters, "parameter '" + name + "'");
      spec.parameters.push_back({name, value});
    }
  }

  const YAML::Node& attrs = required(top, "attributes", root, "game document");
  expect_seq(attrs, "attributes");
  for (const auto& item : attrs) {
    const auto e = entries(item, "attribute", {"name", "owner", "range"});
    AttributeDecl a;
    a.name = scalar(required(e, "name", item, "attribute"), "attribute name");
    a.owner = scalar(required(e, "owner", item, "attribute '" + a.name + "'"), "owner");
    std::tie(a.lo, a.hi) = range(required(e, "range", item, "attribute '" + a.name + "'"), spec.parameters,
                                 "attribute '" + a.name + "'");
    spec.attributes.push_back(std::move(a));
  }

  const YAML::Node& acts = required(top, "actions", root, "game document");
  expect_seq(acts, "actions");
  for (const auto& item : acts) {
    const auto e = entries(item, "action", {"name", "actors", "choices", "guard", "writes"});
    ActionDecl a;
    a.name = scalar(required(e, "name", item, "action"), "action name");
    const std::string what = "action '" + a.name + "'";
    a.actors = name_list(required(e, "actors", item, what), "actors of " + what);
    if (const auto* c = field(e, "choices"); c && !c->IsNull()) {
      expect_seq(*c, "choices of " + what);
      for (const auto& ci : *c) {
        const auto ce = entries(ci, "choice", {"name", "range"});
        ChoiceDecl d;
        d.name = scalar(required(ce, "name", ci, "choice"), "choice name");
        std::tie(d.lo, d.hi) = range(required(ce, "range", ci, "choice '" + d.name + "'"), spec.parameters,
                                     "choice '" + d.name + "'");
        a.choices.push_back(std::move(d));
      }
    }
    if (const auto* g = field(e, "guard")) a.guard = expression(*g, "guard of " + what);
    a.writes = writes(required(e, "writes", item, what), what);
    spec.actions.push_back(std::move(a));
  }

  if (const auto* n = field(top, "collisions"); n && !n->IsNull()) {
    expect_seq(*n, "collisions");
    for (const auto& item : *n) {
      const auto e = entries(item, "collision", {"name", "guard", "writes"});
      CollisionDecl c;
      c.name = scalar(required(e, "name", item, "collision"), "collision name");
      const std::string what = "collision '" + c.name + "'";
      if (const auto* g = field(e, "guard")) c.guard = expression(*g, "guard of " + what);
      c.writes = writes(required(e, "writes", item, what), what);
      spec.collisions.push_back(std::move(c));
    }
  }

  const YAML::Node& init = required(top, "initial", root, "game document");
  expect_seq(init, "initial");
  for (const auto& item : init) {
    if (item.IsScalar()) {
      spec.initial.constraints.push_back(expression(item, "initial constraint"));
      continue;
    }
    const auto e = entries(item, "initial vector");
    std::vector<Value> v(spec.attributes.size());
    std::vector<char> set(spec.attributes.size(), 0);
    for (const auto& [k, val] : e) {
      const auto idx = spec.attribute_index(k);
      if (!idx) throw UnknownName("initial vector assigns unknown attribute '" + k + "'", where(val));
      v[*idx] = constant(val, spec.parameters, "initial value of '" + k + "'");
      set[*idx] = 1;
    }
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (!set[i]) {
        throw ParseError("initial vector does not assign '" + spec.attributes[i].name + "'", where(item));
      }
    }
    spec.initial.vectors.push_back(std::move(v));
  }

  if (const auto* n = field(top, "propositions"); n && !n->IsNull()) {
    for (const auto& [k, v] : entries(*n, "propositions")) {
      spec.propositions.push_back({k, expression(v, "proposition '" + k + "'")});
    }
  }

  if (const auto* n = field(top, "defaults"); n && !n->IsNull()) {
    for (const auto& [k, v] : entries(*n, "defaults")) spec.defaults.emplace_back(k, scalar(v, "default '" + k + "'"));
  }

  if (const auto* n = field(top, "provenance"); n && !n->IsNull()) {
    const auto e = entries(*n, "provenance", {"source_digest", "reduction_digest"});
    Provenance p;
    if (const auto* s = field(e, "source_digest")) p.source_digest = scalar(*s, "source_digest");
    if (const auto* s = field(e, "reduction_digest")) p.reduction_digest = scalar(*s, "reduction_digest");
    spec.provenance = p;
  }

  resolve_game(spec);
  return spec;
}

GameSpec load_game_spec(const std::filesystem::path& path) { return parse_game_spec(read_file(path)); }

namespace {

void emit_expr(YAML::Emitter& out, const Expr& e) { out << YAML::DoubleQuoted << to_string(e); }

void emit_writes(YAML::Emitter& out, const std::vector<Assignment>& ws) {
  out << YAML::Key << "writes" << YAML::Value << YAML::BeginMap;
  for (const auto& w : ws) {
    out << YAML::Key << w.target << YAML::Value;
    emit_expr(out, w.value);
  }
  out << YAML::EndMap;
}

void emit_range(YAML::Emitter& out, Value lo, Value hi) {
  out << YAML::Key << "range" << YAML::Value << YAML::Flow << YAML::BeginSeq << lo << hi << YAML::EndSeq;
}

}  // namespace

std::string serialize_game_spec(const GameSpec& spec) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "actors" << YAML::Value << YAML::Flow << spec.actors;

  if (!spec.parameters.empty()) {
    out << YAML::Key << "parameters" << YAML::Value << YAML::BeginSeq;
    for (const auto& p : spec.parameters) {
      out << YAML::Flow << YAML::BeginMap << YAML::Key << "name" << YAML::Value << p.name << YAML::Key << "value"
          << YAML::Value << p.value << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }

  out << YAML::Key << "attributes" << YAML::Value << YAML::BeginSeq;
  for (const auto& a : spec.attributes) {
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "name" << YAML::Value << a.name << YAML::Key << "owner"
        << YAML::Value << a.owner;
    emit_range(out, a.lo, a.hi);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "actions" << YAML::Value << YAML::BeginSeq;
  for (const auto& a : spec.actions) {
    out << YAML::BeginMap << YAML::Key << "name" << YAML::Value << a.name;
    out << YAML::Key << "actors" << YAML::Value << YAML::Flow << a.actors;
    if (!a.choices.empty()) {
      out << YAML::Key << "choices" << YAML::Value << YAML::BeginSeq;
      for (const auto& c : a.choices) {
        out << YAML::Flow << YAML::BeginMap << YAML::Key << "name" << YAML::Value << c.name;
        emit_range(out, c.lo, c.hi);
        out << YAML::EndMap;
      }
      out << YAML::EndSeq;
    }
    out << YAML::Key << "guard" << YAML::Value;
    emit_expr(out, a.guard);
    emit_writes(out, a.writes);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  if (!spec.collisions.empty()) {
    out << YAML::Key << "collisions" << YAML::Value << YAML::BeginSeq;
    for (const auto& c : spec.collisions) {
      out << YAML::BeginMap << YAML::Key << "name" << YAML::Value << c.name << YAML::Key << "guard" << YAML::Value;
      emit_expr(out, c.guard);
      emit_writes(out, c.writes);
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }

  out << YAML::Key << "initial" << YAML::Value << YAML::BeginSeq;
  for (const auto& v : spec.initial.vectors) {
    out << YAML::Flow << YAML::BeginMap;
    for (std::size_t i = 0; i < v.size(); ++i) out << YAML::Key << spec.attributes[i].name << YAML::Value << v[i];
    out << YAML::EndMap;
  }
  for (const auto& c : spec.initial.constraints) emit_expr(out, c);
  out << YAML::EndSeq;

  if (!spec.propositions.empty()) {
    out << YAML::Key << "propositions" << YAML::Value << YAML::BeginMap;
    for (const auto& p : spec.propositions) {
      out << YAML::Key << p.name << YAML::Value;
      emit_expr(out, p.predicate);
    }
    out << YAML::EndMap;
  }

  if (!spec.defaults.empty()) {
    out << YAML::Key << "defaults" << YAML::Value << YAML::BeginMap;
    for (const auto& [k, v] : spec.defaults) out << YAML::Key << k << YAML::Value << YAML::DoubleQuoted << v;
    out << YAML::EndMap;
  }

  if (spec.provenance) {
    out << YAML::Key << "provenance" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "source_digest" << YAML::Value << spec.provenance->source_digest;
    out << YAML::Key << "reduction_digest" << YAML::Value << spec.provenance->reduction_digest;
    out << YAML::EndMap;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

ReductionSpec parse_reduction(std::string_view text) {
  const YAML::Node root = load_yaml(text);
  ReductionSpec r;
  if (!root || root.IsNull()) return r;
  const auto top = entries(root, "reduction document", {"freeze", "drop_actions", "drop_collisions"});
  if (const auto* n = field(top, "freeze"); n && !n->IsNull()) {
    for (const auto& [k, v] : entries(*n, "freeze")) r.freeze.emplace_back(k, constant(v, {}, "frozen value of '" + k + "'"));
  }
  if (const auto* n = field(top, "drop_actions"); n && !n->IsNull()) {
    for (const auto& [k, v] : entries(*n, "drop_actions")) r.drop_actions.emplace_back(k, name_list(v, "actions of '" + k + "'"));
  }
  if (const auto* n = field(top, "drop_collisions"); n && !n->IsNull()) {
    r.drop_collisions = name_list(*n, "drop_collisions");
  }
  return r;
}

ReductionSpec load_reduction(const std::filesystem::path& path) { return parse_reduction(read_file(path)); }

ReductionSpec load_reduction(const std::filesystem::path& path, const GameSpec& spec) {
  auto r = load_reduction(path);
  check_reduction(spec, r);
  return r;
}

std::string serialize_reduction(const ReductionSpec& r) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "freeze" << YAML::Value << YAML::BeginMap;
  for (const auto& [k, v] : r.freeze) out << YAML::Key << k << YAML::Value << v;
  out << YAML::EndMap;
  out << YAML::Key << "drop_actions" << YAML::Value << YAML::BeginMap;
  for (const auto& [k, v] : r.drop_actions) out << YAML::Key << k << YAML::Value << YAML::Flow << v;
  out << YAML::EndMap;
  out << YAML::Key << "drop_collisions" << YAML::Value << YAML::Flow << r.drop_collisions;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::vector<NamedProperty> parse_properties(std::string_view text, const GameSpec& spec) {
  std::vector<NamedProperty> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError("expected 'name: formula'", {line_no, first + 1});
    std::string name = line.substr(first, colon - first);
    name.erase(name.find_last_not_of(" \t") + 1);
    if (!is_identifier(name)) throw ParseError("invalid property name '" + name + "'", {line_no, first + 1});
    for (const auto& p : out) {
      if (p.name == name) throw DuplicateName("duplicate property '" + name + "'", {line_no, first + 1});
    }
    std::string formula = line.substr(colon + 1);
    formula.erase(0, formula.find_first_not_of(" \t"));
    formula.erase(formula.find_last_not_of(" \t\r") + 1);
    try {
      out.push_back({name, formula, parse_ctl(formula, spec)});
    } catch (const InputError& e) {
      throw InputError(e.code(), e.what(), {line_no, colon + 2});
    }
  }
  return out;
}

std::vector<NamedProperty> load_properties(const std::filesystem::path& path, const GameSpec& spec) {
  return parse_properties(read_file(path), spec);
}

}  // namespace gamecheck
