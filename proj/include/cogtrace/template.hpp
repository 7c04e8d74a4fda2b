#pragma once

#include <map>
#include <string>
#include <string_view>

namespace cogtrace {

// Replaces every {{name}} placeholder with its value. A placeholder left
// unfilled after substitution raises TemplateError; variables the template
// does not mention are ignored.
std::string render_template(std::string_view tpl,
                            const std::map<std::string, std::string>& vars);

}  // namespace cogtrace
