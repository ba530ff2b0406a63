#include "annimpute/prompt/skeleton.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "annimpute/errors.hpp"
#include "annimpute/prompt/shots.hpp"
#include "annimpute/util/json_io.hpp"

namespace annimpute::prompt {

namespace {

constexpr std::array<std::string_view, kFillerSlots> kSlotNames{
    "orig_examples_header", "imputed_examples_header", "target_example_header", "instructions",
    "final_words"};

constexpr std::array<std::string_view, 4> kDataSlots{"dataset_description", "orig_examples",
                                                     "imputed_examples", "target_example"};

bool is_name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

struct Token {
  bool placeholder = false;
  std::string text;  // literal text or placeholder name
};

std::vector<Token> tokenize_line(std::string_view line) {
  std::vector<Token> out;
  std::string literal;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (c == '{') {
      const std::size_t close = line.find('}', i + 1);
      if (close == std::string_view::npos) throw DataError("template: unbalanced '{'");
      const std::string_view name = line.substr(i + 1, close - i - 1);
      if (name.empty() || !std::all_of(name.begin(), name.end(), is_name_char)) {
        throw DataError("template: bad placeholder '{" + std::string(name) + "}'");
      }
      if (!literal.empty()) out.push_back({false, std::move(literal)});
      literal.clear();
      out.push_back({true, std::string(name)});
      i = close + 1;
    } else if (c == '}') {
      throw DataError("template: unbalanced '}'");
    } else {
      literal.push_back(c);
      ++i;
    }
  }
  if (!literal.empty()) out.push_back({false, std::move(literal)});
  return out;
}

bool is_known_slot(std::string_view name) {
  return std::find(kSlotNames.begin(), kSlotNames.end(), name) != kSlotNames.end() ||
         std::find(kDataSlots.begin(), kDataSlots.end(), name) != kDataSlots.end();
}

}  // namespace

std::string_view to_string(Condition condition) {
  switch (condition) {
    case Condition::Combined: return "combined";
    case Condition::OriginalOnly: return "original_only";
    case Condition::ImputedOnly: return "imputed_only";
  }
  return "?";
}

Condition condition_from_string(std::string_view text) {
  if (text == "combined") return Condition::Combined;
  if (text == "original_only") return Condition::OriginalOnly;
  if (text == "imputed_only") return Condition::ImputedOnly;
  throw UsageError("unknown condition '" + std::string(text) + "'");
}

std::string_view slot_name(FillerSlot slot) { return kSlotNames[static_cast<std::size_t>(slot)]; }

std::string PromptVersion::str() const {
  std::string out = "v";
  for (std::size_t s = 0; s < kFillerSlots; ++s) {
    if (s > 0) out += '.';
    out += std::to_string(index[s]);
  }
  return out;
}

PromptVersion parse_version(std::string_view text, const FillerCatalog& catalog) {
  const std::string quoted = "version '" + std::string(text) + "'";
  if (text.empty() || text.front() != 'v') throw UsageError(quoted + " must start with 'v'");
  PromptVersion version;
  std::size_t pos = 1;
  for (std::size_t s = 0; s < kFillerSlots; ++s) {
    std::size_t end = text.find('.', pos);
    if (s + 1 == kFillerSlots) {
      if (end != std::string_view::npos) throw UsageError(quoted + " has too many fields");
      end = text.size();
    } else if (end == std::string_view::npos) {
      throw UsageError(quoted + " has too few fields");
    }
    int value = 0;
    const char* b = text.data() + pos;
    const char* e = text.data() + end;
    auto [ptr, ec] = std::from_chars(b, e, value);
    if (b == e || ec != std::errc{} || ptr != e) throw UsageError(quoted + " has a non-integer field");
    const auto options = static_cast<int>(catalog.options[s].size());
    if (value < -1 || value >= options) {
      throw UsageError(quoted + ": " + std::string(kSlotNames[s]) + " index " +
                       std::to_string(value) + " outside [-1, " + std::to_string(options) + ")");
    }
    version.index[s] = value;
    pos = end + 1;
  }
  return version;
}

std::vector<std::string> PromptSkeleton::placeholders() const {
  std::vector<std::string> names;
  std::size_t start = 0;
  while (start <= template_text.size()) {
    std::size_t end = template_text.find('\n', start);
    if (end == std::string::npos) end = template_text.size();
    for (const Token& t : tokenize_line(std::string_view(template_text).substr(start, end - start))) {
      if (t.placeholder && std::find(names.begin(), names.end(), t.text) == names.end()) {
        names.push_back(t.text);
      }
    }
    start = end + 1;
  }
  return names;
}

bool PromptSkeleton::serves(Condition condition) const {
  return std::find(conditions.begin(), conditions.end(), condition) != conditions.end();
}

const PromptSkeleton& SkeletonCatalog::find(std::string_view id) const {
  for (const auto& s : skeletons) {
    if (s.id == id) return s;
  }
  throw UsageError("unknown skeleton '" + std::string(id) + "'");
}

std::string render_template(std::string_view text,
                            const std::map<std::string, std::optional<std::string>>& values) {
  std::string out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    const bool has_newline = end != std::string_view::npos;
    if (!has_newline) end = text.size();
    const auto tokens = tokenize_line(text.substr(start, end - start));

    auto lookup = [&](const std::string& name) -> const std::optional<std::string>& {
      auto it = values.find(name);
      if (it == values.end()) throw DataError("template: no value for {" + name + "}");
      return it->second;
    };

    const bool lone_omitted = tokens.size() == 1 && tokens[0].placeholder &&
                              !lookup(tokens[0].text).has_value();
    if (!lone_omitted) {
      for (const Token& t : tokens) {
        if (!t.placeholder) {
          out += t.text;
        } else if (const auto& v = lookup(t.text)) {
          out += *v;
        }
      }
      if (has_newline) out += '\n';
    } else if (!has_newline && !out.empty() && out.back() == '\n') {
      // Omitted final line: drop the newline that introduced it.
      out.pop_back();
    }
    if (!has_newline) break;
    start = end + 1;
  }
  return out;
}

std::string format_examples(const std::vector<std::pair<std::string, int>>& shots,
                            const LabelSchema& schema) {
  std::string out;
  for (std::size_t k = 0; k < shots.size(); ++k) {
    if (k > 0) out += "\n\n";
    out += "Example " + std::to_string(k + 1) + ":\nText: " + shots[k].first +
           "\nAnnotation from annotator: " + schema.display(shots[k].second);
  }
  return out;
}

std::string format_target(std::string_view text) {
  return "Text: " + std::string(text) + "\nAnnotation from annotator:";
}

namespace {

std::vector<std::pair<std::string, int>> as_pairs(const std::vector<Shot>& shots) {
  std::vector<std::pair<std::string, int>> out;
  out.reserve(shots.size());
  for (const Shot& s : shots) out.emplace_back(s.text, s.label);
  return out;
}

}  // namespace

std::string build_prompt(const PromptSkeleton& skeleton, const FillerCatalog& catalog,
                         const PromptVersion& version, const ShotSet& shots,
                         std::string_view dataset_description, const LabelSchema& schema) {
  if (!skeleton.conditions.empty() && !skeleton.serves(shots.condition)) {
    throw UsageError("skeleton '" + skeleton.id + "' does not serve condition " +
                     std::string(to_string(shots.condition)));
  }
  std::map<std::string, std::optional<std::string>> values;
  values["dataset_description"] = std::string(dataset_description);
  values["orig_examples"] = shots.uses_original() ? format_examples(as_pairs(shots.original), schema)
                                                  : std::string();
  values["imputed_examples"] =
      shots.uses_imputed() ? format_examples(as_pairs(shots.imputed), schema) : std::string();
  values["target_example"] = format_target(shots.held_out.text);
  for (std::size_t s = 0; s < kFillerSlots; ++s) {
    const int idx = version.index[s];
    if (idx >= static_cast<int>(catalog.options[s].size())) {
      throw UsageError("version " + version.str() + " does not fit the filler catalog");
    }
    values[std::string(kSlotNames[s])] =
        idx < 0 ? std::nullopt : std::optional<std::string>(catalog.options[s][idx]);
  }
  return render_template(skeleton.template_text, values);
}

std::string build_prompt(const PromptSkeleton& skeleton, const FillerCatalog& catalog,
                         std::string_view version, const ShotSet& shots,
                         std::string_view dataset_description, const LabelSchema& schema) {
  return build_prompt(skeleton, catalog, parse_version(version, catalog), shots,
                      dataset_description, schema);
}

std::vector<PromptVersion> enumerate_versions(const PromptSkeleton& skeleton,
                                              const FillerCatalog& catalog) {
  const auto names = skeleton.placeholders();
  std::array<int, kFillerSlots> upper{};  // exclusive bound per slot
  for (std::size_t s = 0; s < kFillerSlots; ++s) {
    const bool used = std::find(names.begin(), names.end(), kSlotNames[s]) != names.end();
    upper[s] = used ? static_cast<int>(catalog.options[s].size()) : 0;
  }
  std::vector<PromptVersion> out;
  PromptVersion v;
  while (true) {
    out.push_back(v);
    std::size_t s = kFillerSlots;
    while (s > 0) {
      --s;
      if (v.index[s] + 1 < upper[s]) {
        ++v.index[s];
        for (std::size_t t = s + 1; t < kFillerSlots; ++t) v.index[t] = -1;
        break;
      }
      if (s == 0) return out;
    }
  }
}

FillerCatalog fillers_from_json(const nlohmann::json& j) {
  require_format(j, "annimpute.fillers", 1);
  FillerCatalog catalog;
  const auto& slots = j.at("slots");
  for (std::size_t s = 0; s < kFillerSlots; ++s) {
    const std::string name(kSlotNames[s]);
    if (!slots.contains(name)) throw DataError("fillers: missing slot " + name);
    catalog.options[s] = slots.at(name).get<std::vector<std::string>>();
  }
  return catalog;
}

nlohmann::json fillers_to_json(const FillerCatalog& catalog) {
  nlohmann::json slots = nlohmann::json::object();
  for (std::size_t s = 0; s < kFillerSlots; ++s) slots[std::string(kSlotNames[s])] = catalog.options[s];
  return {{"format", "annimpute.fillers"}, {"version", 1}, {"slots", slots}};
}

SkeletonCatalog skeletons_from_json(const nlohmann::json& j) {
  require_format(j, "annimpute.skeletons", 1);
  SkeletonCatalog catalog;
  std::set<std::string> ids;
  for (const auto& item : j.at("skeletons")) {
    PromptSkeleton s;
    s.id = item.at("id").get<std::string>();
    if (!ids.insert(s.id).second) throw DataError("skeletons: duplicate id " + s.id);
    s.template_text = item.at("template").get<std::string>();
    for (const auto& c : item.value("conditions", nlohmann::json::array())) {
      s.conditions.push_back(condition_from_string(c.get<std::string>()));
    }
    if (!s.conditions.empty()) {
      for (const auto& name : s.placeholders()) {
        if (!is_known_slot(name)) {
          throw DataError("skeleton " + s.id + ": placeholder {" + name + "} has no slot");
        }
      }
    }
    catalog.skeletons.push_back(std::move(s));
  }
  return catalog;
}

nlohmann::json skeletons_to_json(const SkeletonCatalog& catalog) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& s : catalog.skeletons) {
    nlohmann::json conditions = nlohmann::json::array();
    for (Condition c : s.conditions) conditions.push_back(std::string(to_string(c)));
    list.push_back({{"id", s.id}, {"conditions", conditions}, {"template", s.template_text}});
  }
  return {{"format", "annimpute.skeletons"}, {"version", 1}, {"skeletons", list}};
}

FillerCatalog load_fillers(const std::filesystem::path& path) {
  return fillers_from_json(read_json_file(path));
}

SkeletonCatalog load_skeletons(const std::filesystem::path& path) {
  return skeletons_from_json(read_json_file(path));
}

}  // namespace annimpute::prompt
