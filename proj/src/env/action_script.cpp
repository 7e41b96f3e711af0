#include "taskchain/env/action_script.hpp"

#include <cctype>
#include <cmath>
#include <optional>
#include <sstream>
#include <variant>

#include "taskchain/core/errors.hpp"

namespace taskchain {

namespace {

struct Literal {
    enum class Kind { integer, real, string, identifier } kind = Kind::integer;
    long long integer = 0;
    double real = 0.0;
    std::string text;
};

struct Argument {
    std::optional<std::string> keyword;
    Literal value;
};

struct Call {
    std::string callee;
    std::vector<Argument> args;
};

class LineLexer {
public:
    explicit LineLexer(std::string_view s) : s_(s) {}

    // Returns an error message, or nullopt on success.
    std::optional<std::string> parse_call(Call& call) {
        skip_ws();
        std::string name;
        if (!read_identifier(name)) return "expected a function call";
        while (peek() == '.') {
            ++pos_;
            std::string part;
            if (!read_identifier(part)) return "expected a name after '.'";
            name += '.';
            name += part;
        }
        call.callee = name;
        skip_ws();
        if (peek() != '(') return "expected '(' after " + name;
        ++pos_;
        skip_ws();
        if (peek() != ')') {
            while (true) {
                Argument arg;
                if (auto err = parse_argument(arg)) return err;
                call.args.push_back(std::move(arg));
                skip_ws();
                if (peek() == ',') {
                    ++pos_;
                    skip_ws();
                    if (peek() == ')') break;  // trailing comma
                    continue;
                }
                if (peek() == ')') break;
                return "expected ',' or ')' in argument list";
            }
        }
        ++pos_;  // ')'
        skip_ws();
        if (peek() == ';') {
            ++pos_;
            skip_ws();
        }
        if (peek() == '#') pos_ = s_.size();
        if (pos_ != s_.size()) return "unexpected trailing text";
        return std::nullopt;
    }

private:
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool read_identifier(std::string& out) {
        if (pos_ >= s_.size()) return false;
        char c = s_[pos_];
        if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_')) return false;
        std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        out.assign(s_.substr(start, pos_ - start));
        return true;
    }

    std::optional<std::string> parse_argument(Argument& arg) {
        std::size_t save = pos_;
        std::string ident;
        if (read_identifier(ident)) {
            skip_ws();
            if (peek() == '=') {
                ++pos_;
                skip_ws();
                arg.keyword = ident;
                return parse_literal(arg.value);
            }
            pos_ = save;
        }
        return parse_literal(arg.value);
    }

    std::optional<std::string> parse_literal(Literal& lit) {
        char c = peek();
        if (c == '\'' || c == '"') return parse_string(lit);
        if (c == '-' || c == '+' || c == '.' || std::isdigit(static_cast<unsigned char>(c))) return parse_number(lit);
        std::string ident;
        if (read_identifier(ident)) {
            lit.kind = Literal::Kind::identifier;
            lit.text = ident;
            return std::nullopt;
        }
        return "expected a literal argument";
    }

    std::optional<std::string> parse_number(Literal& lit) {
        std::size_t start = pos_;
        if (peek() == '-' || peek() == '+') ++pos_;
        bool digits = false, dot = false;
        while (pos_ < s_.size()) {
            char c = s_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c))) {
                digits = true;
            } else if (c == '.' && !dot) {
                dot = true;
            } else {
                break;
            }
            ++pos_;
        }
        if (!digits) return "malformed number";
        std::string text(s_.substr(start, pos_ - start));
        try {
            if (dot) {
                lit.kind = Literal::Kind::real;
                lit.real = std::stod(text);
            } else {
                lit.kind = Literal::Kind::integer;
                lit.integer = std::stoll(text);
            }
        } catch (const std::exception&) {
            return "number out of range";
        }
        return std::nullopt;
    }

    std::optional<std::string> parse_string(Literal& lit) {
        char quote = s_[pos_++];
        std::string out;
        while (true) {
            if (pos_ >= s_.size()) return "unterminated string literal";
            char c = s_[pos_++];
            if (c == quote) break;
            if (c != '\\') {
                out += c;
                continue;
            }
            if (pos_ >= s_.size()) return "unterminated escape";
            char e = s_[pos_++];
            switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                case '\\': out += '\\'; break;
                case '\'': out += '\''; break;
                case '"': out += '"'; break;
                case 'x': {
                    if (pos_ + 2 > s_.size()) return "short \\x escape";
                    auto hex = [](char h) -> int {
                        if (h >= '0' && h <= '9') return h - '0';
                        if (h >= 'a' && h <= 'f') return h - 'a' + 10;
                        if (h >= 'A' && h <= 'F') return h - 'A' + 10;
                        return -1;
                    };
                    int hi = hex(s_[pos_]), lo = hex(s_[pos_ + 1]);
                    if (hi < 0 || lo < 0) return "bad \\x escape";
                    out += static_cast<char>(hi * 16 + lo);
                    pos_ += 2;
                    break;
                }
                default: return std::string("unsupported escape \\") + e;
            }
        }
        lit.kind = Literal::Kind::string;
        lit.text = std::move(out);
        return std::nullopt;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

// Binds positional and keyword arguments to a fixed parameter list.
class Binder {
public:
    Binder(const Call& call, std::vector<std::string> params, std::vector<std::string> ignorable = {})
        : call_(call), params_(std::move(params)), ignorable_(std::move(ignorable)),
          bound_(params_.size()) {}

    std::optional<std::string> bind() {
        std::size_t next = 0;
        bool seen_keyword = false;
        for (const auto& arg : call_.args) {
            if (!arg.keyword) {
                if (seen_keyword) return "positional argument after keyword argument";
                if (next >= params_.size()) return call_.callee + " takes at most " +
                                                   std::to_string(params_.size()) + " arguments";
                bound_[next++] = &arg.value;
                continue;
            }
            seen_keyword = true;
            bool matched = false;
            for (std::size_t i = 0; i < params_.size(); ++i) {
                if (params_[i] == *arg.keyword) {
                    if (bound_[i] != nullptr) return "argument '" + *arg.keyword + "' given twice";
                    bound_[i] = &arg.value;
                    matched = true;
                }
            }
            if (!matched) {
                bool skip = false;
                for (const auto& name : ignorable_) skip = skip || name == *arg.keyword;
                if (!skip) return "unexpected keyword '" + *arg.keyword + "' for " + call_.callee;
            }
        }
        return std::nullopt;
    }

    const Literal* get(std::size_t i) const { return bound_[i]; }

private:
    const Call& call_;
    std::vector<std::string> params_;
    std::vector<std::string> ignorable_;
    std::vector<const Literal*> bound_;
};

std::optional<std::string> as_int(const Literal* lit, const char* what, int& out) {
    if (lit == nullptr) return std::string("missing ") + what;
    if (lit->kind == Literal::Kind::integer) {
        if (lit->integer < -1000000000LL || lit->integer > 1000000000LL) return std::string(what) + " out of range";
        out = static_cast<int>(lit->integer);
        return std::nullopt;
    }
    if (lit->kind == Literal::Kind::real && std::isfinite(lit->real) && std::fabs(lit->real) < 1e9) {
        out = static_cast<int>(std::lround(lit->real));
        return std::nullopt;
    }
    return std::string(what) + " must be a number";
}

std::optional<std::string> as_string(const Literal* lit, const char* what, std::string& out) {
    if (lit == nullptr) return std::string("missing ") + what;
    if (lit->kind != Literal::Kind::string) return std::string(what) + " must be a string";
    out = lit->text;
    return std::nullopt;
}

// nullopt action + nullopt error = pacing line with no action.
struct LineOutcome {
    std::optional<ParsedAction> action;
    std::optional<std::string> error;
};

LineOutcome interpret(const Call& call) {
    LineOutcome out;
    auto fail = [&out](std::string msg) {
        out.error = std::move(msg);
        return out;
    };
    const std::string& f = call.callee;

    if (f == "pyautogui.click" || f == "pyautogui.doubleClick" || f == "pyautogui.moveTo" ||
        f == "pyautogui.dragTo") {
        std::vector<std::string> params = {"x", "y"};
        std::vector<std::string> ignorable;
        if (f == "pyautogui.click" || f == "pyautogui.dragTo") params.push_back("button");
        if (f == "pyautogui.moveTo" || f == "pyautogui.dragTo") ignorable.push_back("duration");
        Binder b(call, params, ignorable);
        if (auto e = b.bind()) return fail(*e);
        Point p;
        if (auto e = as_int(b.get(0), "x", p.x)) return fail(*e);
        if (auto e = as_int(b.get(1), "y", p.y)) return fail(*e);
        MouseButton button = MouseButton::left;
        if (params.size() == 3 && b.get(2) != nullptr) {
            std::string name;
            if (auto e = as_string(b.get(2), "button", name)) return fail(*e);
            if (name == "left") {
                button = MouseButton::left;
            } else if (name == "right") {
                button = MouseButton::right;
            } else {
                return fail("button must be 'left' or 'right'");
            }
        }
        if (f == "pyautogui.click") {
            out.action = act::Click{p, button};
        } else if (f == "pyautogui.doubleClick") {
            out.action = act::DoubleClick{p};
        } else if (f == "pyautogui.moveTo") {
            out.action = act::Move{p};
        } else {
            if (button != MouseButton::left) return fail("dragTo supports the left button only");
            out.action = act::Drag{std::nullopt, p};
        }
        return out;
    }
    if (f == "pyautogui.write") {
        Binder b(call, {"message"}, {"interval"});
        if (auto e = b.bind()) return fail(*e);
        std::string text;
        if (auto e = as_string(b.get(0), "text", text)) return fail(*e);
        out.action = act::Write{text};
        return out;
    }
    if (f == "pyautogui.scroll") {
        Binder b(call, {"clicks"});
        if (auto e = b.bind()) return fail(*e);
        int amount = 0;
        if (auto e = as_int(b.get(0), "amount", amount)) return fail(*e);
        out.action = act::Scroll{amount};
        return out;
    }
    if (f == "pyautogui.press") {
        Binder b(call, {"keys"});
        if (auto e = b.bind()) return fail(*e);
        std::string key;
        if (auto e = as_string(b.get(0), "key", key)) return fail(*e);
        if (key.empty()) return fail("key must be non-empty");
        out.action = act::Press{key};
        return out;
    }
    if (f == "pyautogui.hotkey") {
        act::Hotkey hk;
        for (const auto& arg : call.args) {
            if (arg.keyword) {
                if (*arg.keyword == "interval") continue;
                return fail("unexpected keyword '" + *arg.keyword + "' for hotkey");
            }
            std::string key;
            if (auto e = as_string(&arg.value, "key", key)) return fail(*e);
            if (key.empty()) return fail("key must be non-empty");
            hk.keys.push_back(key);
        }
        if (hk.keys.size() < 2) return fail("hotkey needs at least two keys");
        out.action = hk;
        return out;
    }
    if (f == "time.sleep") {
        Binder b(call, {"seconds"});
        if (auto e = b.bind()) return fail(*e);
        const Literal* lit = b.get(0);
        if (lit == nullptr) return fail("missing seconds");
        double seconds = 0;
        if (lit->kind == Literal::Kind::integer) {
            seconds = static_cast<double>(lit->integer);
        } else if (lit->kind == Literal::Kind::real) {
            seconds = lit->real;
        } else {
            return fail("seconds must be a number");
        }
        if (!(seconds > 0) || seconds > 60) return fail("sleep must be in (0, 60] seconds");
        if (seconds == static_cast<double>(kWaitSeconds)) out.action = act::Wait{};
        return out;
    }
    return fail("unknown callable '" + f + "'");
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string quote(std::string_view text) {
    std::string out = "\"";
    for (unsigned char c : text) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '"': out += "\\\""; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (c < 0x20 || c == 0x7f) {
                    static constexpr char kHex[] = "0123456789abcdef";
                    out += "\\x";
                    out += kHex[c >> 4];
                    out += kHex[c & 0xf];
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
    out += '"';
    return out;
}

}  // namespace

ScriptParse parse_action_script(std::string_view script) {
    ScriptParse result;
    std::vector<ScriptIssue> issues;
    std::vector<std::string> lines;
    {
        std::string current;
        for (char c : script) {
            if (c == '\n') {
                lines.push_back(current);
                current.clear();
            } else {
                current += c;
            }
        }
        lines.push_back(current);
    }

    int done_line = 0;
    int action_lines = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        int line_no = static_cast<int>(i) + 1;
        std::string line = trim(lines[i]);
        if (line.empty() || line[0] == '#' || line.rfind("```", 0) == 0) continue;
        if (line == "DONE") {
            done_line = line_no;
            continue;
        }
        ++action_lines;
        Call call;
        LineLexer lexer(line);
        if (auto err = lexer.parse_call(call)) {
            issues.push_back({line_no, *err});
            continue;
        }
        LineOutcome outcome = interpret(call);
        if (outcome.error) {
            issues.push_back({line_no, *outcome.error});
        } else if (outcome.action) {
            result.actions.push_back(std::move(*outcome.action));
        }
    }
    if (done_line != 0) {
        if (action_lines > 0) {
            issues.push_back({done_line, "DONE must be the only line of the script"});
        } else {
            result.done = true;
        }
    }
    if (!issues.empty()) throw ParseError(std::move(issues));
    return result;
}

bool script_accepted(std::string_view script) {
    try {
        parse_action_script(script);
        return true;
    } catch (const ParseError&) {
        return false;
    }
}

std::string render_action(const ParsedAction& action) {
    std::ostringstream out;
    std::visit(
        [&out](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, act::Click>) {
                out << "pyautogui.click(" << v.at.x << ", " << v.at.y;
                if (v.button == MouseButton::right) out << ", button='right'";
                out << ")";
            } else if constexpr (std::is_same_v<T, act::DoubleClick>) {
                out << "pyautogui.doubleClick(" << v.at.x << ", " << v.at.y << ")";
            } else if constexpr (std::is_same_v<T, act::Move>) {
                out << "pyautogui.moveTo(" << v.to.x << ", " << v.to.y << ")";
            } else if constexpr (std::is_same_v<T, act::Write>) {
                out << "pyautogui.write(" << quote(v.text) << ")";
            } else if constexpr (std::is_same_v<T, act::Drag>) {
                if (v.from) out << "pyautogui.moveTo(" << v.from->x << ", " << v.from->y << ")\n";
                out << "pyautogui.dragTo(" << v.to.x << ", " << v.to.y << ")";
            } else if constexpr (std::is_same_v<T, act::Scroll>) {
                out << "pyautogui.scroll(" << v.amount << ")";
            } else if constexpr (std::is_same_v<T, act::Press>) {
                out << "pyautogui.press(" << quote(v.key) << ")";
            } else if constexpr (std::is_same_v<T, act::Hotkey>) {
                out << "pyautogui.hotkey(";
                for (std::size_t i = 0; i < v.keys.size(); ++i) out << (i ? ", " : "") << quote(v.keys[i]);
                out << ")";
            } else {
                out << "time.sleep(" << kWaitSeconds << ")";
            }
        },
        action);
    return out.str();
}

std::string render_actions(const std::vector<ParsedAction>& actions) {
    std::string out;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        if (i) out += '\n';
        out += render_action(actions[i]);
    }
    return out;
}

std::string describe_action(const ParsedAction& action) {
    std::string line = render_action(action);
    for (auto prefix : {"pyautogui.", "time."}) {
        std::size_t pos;
        while ((pos = line.find(prefix)) != std::string::npos) line.erase(pos, std::string_view(prefix).size());
    }
    for (auto& c : line) {
        if (c == '\n') c = ';';
    }
    return line;
}

}  // namespace taskchain
