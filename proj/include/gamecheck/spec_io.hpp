#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gamecheck/ctl.hpp"
#include "gamecheck/game.hpp"
#include "gamecheck/reducer.hpp"

namespace gamecheck {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view text);

// YAML game document -> resolved GameSpec. Does not run validate_game.
GameSpec parse_game_spec(std::string_view yaml);
GameSpec load_game_spec(const std::filesystem::path& path);
std::string serialize_game_spec(const GameSpec& spec);

// Reduction document; when `spec` is given the names are checked against it.
ReductionSpec parse_reduction(std::string_view yaml);
ReductionSpec load_reduction(const std::filesystem::path& path);
ReductionSpec load_reduction(const std::filesystem::path& path, const GameSpec& spec);
std::string serialize_reduction(const ReductionSpec& r);

// Property file: one `name: formula` per line, `#` comments, blank lines.
std::vector<NamedProperty> parse_properties(std::string_view text, const GameSpec& spec);
std::vector<NamedProperty> load_properties(const std::filesystem::path& path, const GameSpec& spec);

struct TagOccurrence {
  std::string name;
  std::size_t offset;  // position of the opening '@'
  friend bool operator==(const TagOccurrence&, const TagOccurrence&) = default;
};

// Tags are `@name@` with name in [A-Za-z_]+.
std::vector<TagOccurrence> scan_tags(std::string_view text);

using Bindings = std::map<std::string, std::string>;

// Single pass; generated bindings win over defaults; replacement text is not
// rescanned. Throws UnresolvedTag listing every unbound tag.
std::string render_template(std::string_view text, const Bindings& generated, const Bindings& defaults);

}  // namespace gamecheck
