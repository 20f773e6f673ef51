#include <algorithm>

#include "gamecheck/spec_io.hpp"

namespace gamecheck {

namespace {

bool tag_char(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }

}  // namespace

std::vector<TagOccurrence> scan_tags(std::string_view text) {
  std::vector<TagOccurrence> out;
  std::size_t i = text.find('@');
  while (i != std::string_view::npos) {
    const std::size_t j = text.find('@', i + 1);
    if (j == std::string_view::npos) throw UnbalancedTagDelimiter(i);
    const std::string_view name = text.substr(i + 1, j - i - 1);
    if (name.empty() || !std::all_of(name.begin(), name.end(), tag_char)) {
      throw InvalidTagIdentifier(std::string(name), i);
    }
    out.push_back({std::string(name), i});
    i = text.find('@', j + 1);
  }
  return out;
}

std::string render_template(std::string_view text, const Bindings& generated, const Bindings& defaults) {
  const auto tags = scan_tags(text);
  std::vector<std::string> missing;
  for (const auto& t : tags) {
    if (generated.contains(t.name) || defaults.contains(t.name)) continue;
    if (std::find(missing.begin(), missing.end(), t.name) == missing.end()) missing.push_back(t.name);
  }
  if (!missing.empty()) throw UnresolvedTag(missing);

  std::string out;
  std::size_t pos = 0;
  for (const auto& t : tags) {
    out.append(text.substr(pos, t.offset - pos));
    const auto g = generated.find(t.name);
    out += g != generated.end() ? g->second : defaults.at(t.name);
    pos = t.offset + t.name.size() + 2;
  }
  out.append(text.substr(pos));
  return out;
}

}  // namespace gamecheck
