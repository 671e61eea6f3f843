#pragma once

// JSON configuration files for CLI11. A config file is one flat object whose
// keys are long option names ("theta-points" or "theta_points"); list values
// fill multi-valued options and object values are passed on as inline JSON
// text, so a cocycle can live inside the config. Writing the effective
// options back produces a file that parses to the same option strings.

#include <CLI11.hpp>
#include <json.hpp>
#include <string>
#include <vector>

namespace sl2lab::cli {

class JsonConfig : public CLI::Config {
 public:
  /// With a root app, keys are routed to the innermost parsed subcommand.
  explicit JsonConfig(const CLI::App* root = nullptr) : root_(root) {}

  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    return options_json(app, default_also).dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(input);
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
    std::vector<std::string> parents;
    for (const CLI::App* a = root_; a != nullptr;) {
      const auto subs = a->get_subcommands();
      a = subs.empty() ? nullptr : subs.front();
      if (a) parents.push_back(a->get_name());
    }
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : j.items()) {
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      for (auto& ch : item.name)
        if (ch == '_') ch = '-';
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar_text(v));
      } else {
        item.inputs.push_back(scalar_text(value));
      }
      items.push_back(std::move(item));
    }
    return items;
  }

  /// Options that were given (or all with defaults) as a JSON object.
  static nlohmann::json options_json(const CLI::App* app, bool default_also) {
    nlohmann::json out = nlohmann::json::object();
    for (const CLI::Option* opt : app->get_options()) {
      const std::string name = opt->get_single_name();
      if (opt->get_lnames().empty() || name == "help" || name == "config" || name == "save-config") continue;
      std::vector<std::string> values = opt->results();
      if (values.empty() && default_also && !opt->get_default_str().empty()) values = {opt->get_default_str()};
      if (values.empty()) continue;
      if (opt->get_expected_max() == 0) {
        out[name] = opt->as<bool>();
      } else if (opt->get_items_expected_max() > 1) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& v : values) a.push_back(text_value(v));
        out[name] = a;
      } else {
        out[name] = text_value(values.back());
      }
    }
    return out;
  }

 private:
  const CLI::App* root_ = nullptr;

  static std::string scalar_text(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  /// Numbers and inline documents are written as JSON values when that is
  /// lossless, everything else as strings.
  static nlohmann::json text_value(const std::string& s) {
    try {
      nlohmann::json v = nlohmann::json::parse(s);
      if ((v.is_number() && v.dump() == s) || v.is_object()) return v;
    } catch (const nlohmann::json::exception&) {
    }
    return s;
  }
};

}  // namespace sl2lab::cli
