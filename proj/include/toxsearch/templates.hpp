#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace toxsearch {

// "{key}" substitution; unknown keys are left in place.
std::string render_template(std::string_view tpl,
                            const std::map<std::string, std::string>& vars);

// Generator instruction templates, keyed by name. Files in
// <assets>/templates/<name>.txt override the embedded defaults.
class TemplateSet {
 public:
  TemplateSet();  // embedded defaults only
  explicit TemplateSet(const std::filesystem::path& assets_dir);

  const std::string& get(const std::string& name) const;

 private:
  std::map<std::string, std::string> templates_;
};

const std::map<std::string, std::string>& builtin_templates();

}  // namespace toxsearch
