#include "cogtrace/template.hpp"

#include "cogtrace/errors.hpp"

namespace cogtrace {

std::string render_template(std::string_view tpl,
                            const std::map<std::string, std::string>& vars) {
    std::string out;
    out.reserve(tpl.size());
    size_t pos = 0;
    while (pos < tpl.size()) {
        size_t open = tpl.find("{{", pos);
        if (open == std::string_view::npos) {
            out.append(tpl.substr(pos));
            break;
        }
        out.append(tpl.substr(pos, open - pos));
        size_t close = tpl.find("}}", open + 2);
        if (close == std::string_view::npos) {
            throw TemplateError("unterminated placeholder near position " +
                                std::to_string(open));
        }
        std::string name(tpl.substr(open + 2, close - open - 2));
        auto it = vars.find(name);
        if (it == vars.end()) {
            throw TemplateError("unfilled placeholder '{{" + name + "}}'");
        }
        out.append(it->second);
        pos = close + 2;
    }
    return out;
}

}  // namespace cogtrace
