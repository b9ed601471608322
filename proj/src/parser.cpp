#include "focalctx/parser.hpp"

#include "focalctx/errors.hpp"
#include "focalctx/lexer.hpp"
#include "focalctx/type_names.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <thread>
#include <utility>

namespace focalctx {

bool ParseResult::has_errors() const
{
    return std::any_of(diagnostics.begin(), diagnostics.end(), [](const ParseDiagnostic& d) {
        return d.severity == ParseDiagnostic::Severity::Error;
    });
}

namespace {

struct SyntaxError {
    std::string message;
    Position pos;
};

struct ParsedType {
    std::string dotted;
    int dims = 0;
};

/// What the parser knows about an expression it just consumed.
struct ExprInfo {
    enum class Shape { Other, Name, Qualified, This, Super, Typed, Call };

    Shape shape = Shape::Other;
    std::optional<TypeName> type;
    std::string name; // Shape::Name only
    bool is_local = false;
    std::size_t call_index = 0; // Shape::Call only
    std::size_t begin = 0;
    std::size_t end = 0;
};

struct Collector {
    std::vector<CallSite> calls;
    std::vector<FieldAccessSite> fields;
    bool partial = false;
};

int numeric_rank(const std::optional<TypeName>& t)
{
    if (!t || !t->is_primitive) {
        return 0;
    }
    const std::string& s = t->text;
    if (s == "double") {
        return 4;
    }
    if (s == "float") {
        return 3;
    }
    if (s == "long") {
        return 2;
    }
    if (s == "int" || s == "short" || s == "byte" || s == "char") {
        return 1;
    }
    return 0;
}

std::optional<TypeName> promote(const std::optional<TypeName>& a, const std::optional<TypeName>& b)
{
    const int ra = numeric_rank(a);
    const int rb = numeric_rank(b);
    if (ra == 0 || rb == 0) {
        return std::nullopt;
    }
    static constexpr std::string_view names[] = {"", "int", "long", "float", "double"};
    return primitive_type(names[std::max(ra, rb)]);
}

bool is_string(const std::optional<TypeName>& t)
{
    return t && t->text == "java.lang.String";
}

int binary_precedence(std::string_view op)
{
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "|") return 3;
    if (op == "^") return 4;
    if (op == "&") return 5;
    if (op == "==" || op == "!=") return 6;
    if (op == "<" || op == ">" || op == "<=" || op == ">=" || op == "instanceof") return 7;
    if (op == "<<" || op == ">>" || op == ">>>") return 8;
    if (op == "+" || op == "-") return 9;
    if (op == "*" || op == "/" || op == "%") return 10;
    return -1;
}

bool is_assignment_op(std::string_view op)
{
    return op == "=" || op == "+=" || op == "-=" || op == "*=" || op == "/=" || op == "%=" ||
           op == "&=" || op == "|=" || op == "^=" || op == "<<=" || op == ">>=" || op == ">>>=";
}

std::optional<Modifier> modifier_keyword(std::string_view word)
{
    static const std::map<std::string_view, Modifier> table = {
        {"public", Modifier::Public},       {"protected", Modifier::Protected},
        {"private", Modifier::Private},     {"static", Modifier::Static},
        {"final", Modifier::Final},         {"abstract", Modifier::Abstract},
        {"native", Modifier::Native},       {"synchronized", Modifier::Synchronized},
        {"transient", Modifier::Transient}, {"volatile", Modifier::Volatile},
        {"strictfp", Modifier::Strictfp},   {"default", Modifier::Default},
    };
    auto it = table.find(word);
    if (it == table.end()) {
        return std::nullopt;
    }
    return it->second;
}

class Parser {
public:
    Parser(std::string_view source, std::string path, ParseOptions options, std::vector<Token> tokens,
           std::vector<ParseDiagnostic> diagnostics)
        : src_(source), options_(options), tokens_(std::move(tokens)), diags_(std::move(diagnostics))
    {
        unit_.path = std::move(path);
        unit_.raw_source = std::string(source);
        collector_ = &scratch_;
    }

    ParseResult run()
    {
        if (!options_.lenient) {
            check_braces();
        }
        parse_header();
        scope_.package_name = unit_.package_name;
        scope_.imports = unit_.imports;
        scope_.declared_types = prescan_declared_types();

        while (!at_eof()) {
            if (accept(";")) {
                continue;
            }
            if (tok().text == "module" || (tok().text == "open" && tok(1).text == "module")) {
                warn("module declarations are not supported; skipped", tok().pos);
                break;
            }
            const std::size_t start = idx_;
            const ScopeMark mark = mark_scope();
            try {
                const Position start_pos = tok().pos;
                Modifiers mods = parse_modifiers();
                if (!at_type_declaration()) {
                    throw SyntaxError{"expected a type declaration", tok().pos};
                }
                ClassModel cls;
                if (parse_type_declaration(std::move(mods), "", cls, start_pos, false)) {
                    unit_.types.push_back(std::move(cls));
                }
            } catch (const SyntaxError& e) {
                error(e.message, e.pos);
                restore_scope(mark);
                idx_ = start;
                recover(false);
            }
        }
        return ParseResult{std::move(unit_), std::move(diags_)};
    }

private:
    struct ScopeMark {
        std::size_t type_params;
        std::string current_class;
        std::size_t locals;
        Collector* collector;
    };

    // ---- token helpers -------------------------------------------------

    const Token& tok(std::size_t ahead = 0) const
    {
        return tokens_[std::min(idx_ + ahead, tokens_.size() - 1)];
    }

    bool at_eof() const { return tok().kind == TokenKind::EndOfFile; }

    static bool is_punct(const Token& t, std::string_view text)
    {
        return (t.kind == TokenKind::Operator || t.kind == TokenKind::Identifier) && t.text == text;
    }

    bool at(std::string_view text) const { return is_punct(tok(), text); }
    bool at(std::size_t ahead, std::string_view text) const { return is_punct(tok(ahead), text); }

    static bool is_name(const Token& t)
    {
        return t.kind == TokenKind::Identifier && !is_keyword(t.text);
    }

    bool at_name() const { return is_name(tok()); }

    void advance()
    {
        if (!at_eof()) {
            ++idx_;
        }
    }

    bool accept(std::string_view text)
    {
        if (at(text)) {
            advance();
            return true;
        }
        return false;
    }

    void expect(std::string_view text)
    {
        if (!at(text)) {
            throw SyntaxError{"expected '" + std::string(text) + "' but found '" +
                                  (at_eof() ? std::string("end of input") : tok().text) + "'",
                              tok().pos};
        }
        advance();
    }

    /// Closing brace of a block; missing braces at end of input are tolerated in lenient mode.
    void expect_close()
    {
        if (options_.lenient && at_eof()) {
            return;
        }
        expect("}");
    }

    std::string expect_name()
    {
        if (!at_name()) {
            throw SyntaxError{"expected an identifier but found '" +
                                  (at_eof() ? std::string("end of input") : tok().text) + "'",
                              tok().pos};
        }
        std::string name = tok().text;
        advance();
        return name;
    }

    std::size_t prev_end() const { return idx_ == 0 ? 0 : tokens_[idx_ - 1].end; }
    int prev_line() const { return idx_ == 0 ? 1 : tokens_[idx_ - 1].pos.line; }

    void error(const std::string& message, Position pos)
    {
        diags_.push_back({ParseDiagnostic::Severity::Error, message, pos});
    }

    void warn(const std::string& message, Position pos)
    {
        diags_.push_back({ParseDiagnostic::Severity::Warning, message, pos});
    }

    ScopeMark mark_scope() const
    {
        return {scope_.type_params.size(), scope_.current_class, locals_.size(), collector_};
    }

    void restore_scope(const ScopeMark& mark)
    {
        scope_.type_params.resize(mark.type_params);
        scope_.current_class = mark.current_class;
        locals_.resize(mark.locals);
        collector_ = mark.collector;
    }

    // ---- whole-file passes ---------------------------------------------

    void check_braces() const
    {
        std::vector<Position> open;
        for (const Token& t : tokens_) {
            if (t.kind != TokenKind::Operator) {
                continue;
            }
            if (t.text == "{") {
                open.push_back(t.pos);
            } else if (t.text == "}") {
                if (open.empty()) {
                    throw ParseError("unbalanced '}'", t.pos.line, t.pos.column);
                }
                open.pop_back();
            }
        }
        if (!open.empty()) {
            throw ParseError("unclosed '{'", open.back().line, open.back().column);
        }
    }

    std::set<std::string> prescan_declared_types() const
    {
        std::set<std::string> declared;
        std::vector<std::pair<std::string, int>> stack;
        std::string pending;
        int depth = 0;
        for (std::size_t i = 0; i < tokens_.size(); ++i) {
            const Token& t = tokens_[i];
            const bool after_dot = i > 0 && tokens_[i - 1].text == ".";
            if (t.kind == TokenKind::Identifier && !after_dot && i + 1 < tokens_.size() &&
                is_name(tokens_[i + 1])) {
                if (t.text == "class" || t.text == "interface" || t.text == "enum") {
                    pending = tokens_[i + 1].text;
                } else if (t.text == "record" && i + 2 < tokens_.size() &&
                           (tokens_[i + 2].text == "(" || tokens_[i + 2].text == "<")) {
                    pending = tokens_[i + 1].text;
                }
            }
            if (t.kind != TokenKind::Operator) {
                continue;
            }
            if (t.text == "{") {
                ++depth;
                if (!pending.empty()) {
                    std::string qualified;
                    if (!stack.empty()) {
                        qualified = stack.back().first + "." + pending;
                    } else if (!unit_.package_name.empty()) {
                        qualified = unit_.package_name + "." + pending;
                    } else {
                        qualified = pending;
                    }
                    declared.insert(qualified);
                    stack.emplace_back(std::move(qualified), depth);
                    pending.clear();
                }
            } else if (t.text == "}") {
                if (!stack.empty() && stack.back().second == depth) {
                    stack.pop_back();
                }
                --depth;
            }
        }
        return declared;
    }

    void parse_header()
    {
        const std::size_t start = idx_;
        try {
            parse_modifiers();
            if (accept("package")) {
                unit_.package_name = parse_dotted_name();
                expect(";");
            } else {
                idx_ = start;
            }
        } catch (const SyntaxError& e) {
            error(e.message, e.pos);
            idx_ = start;
            recover(false);
        }

        while (at("import") || at(";")) {
            if (accept(";")) {
                continue;
            }
            const std::size_t import_start = idx_;
            try {
                advance();
                ImportDecl imp;
                imp.is_static = accept("static");
                imp.name = expect_name();
                while (accept(".")) {
                    if (accept("*")) {
                        imp.is_wildcard = true;
                        break;
                    }
                    imp.name += "." + expect_name();
                }
                expect(";");
                unit_.imports.push_back(std::move(imp));
            } catch (const SyntaxError& e) {
                error(e.message, e.pos);
                idx_ = import_start;
                recover(false);
            }
        }
    }

    std::string parse_dotted_name()
    {
        std::string name = expect_name();
        while (at(".") && is_name(tok(1))) {
            advance();
            name += "." + tok().text;
            advance();
        }
        return name;
    }

    /// Skips to the end of the current declaration or statement: past a ';'
    /// at nesting depth 0, past the brace closing a group opened here, or up
    /// to (not past) a '}' closing the enclosing block.
    void recover(bool stop_before_close)
    {
        int braces = 0;
        int parens = 0;
        while (!at_eof()) {
            if (at("{")) {
                ++braces;
            } else if (at("}")) {
                if (braces == 0) {
                    if (!stop_before_close) {
                        advance();
                    }
                    return;
                }
                if (--braces == 0) {
                    advance();
                    return;
                }
            } else if (at("(")) {
                ++parens;
            } else if (at(")")) {
                parens = std::max(0, parens - 1);
            } else if (at(";") && braces == 0 && parens == 0) {
                advance();
                return;
            }
            advance();
        }
    }

    // ---- declarations --------------------------------------------------

    void skip_annotation(Modifiers* mods)
    {
        expect("@");
        std::string name = parse_dotted_name();
        if (mods != nullptr) {
            mods->annotations.emplace_back(simple_name_of(name));
        }
        if (at("(")) {
            skip_balanced("(", ")");
        }
    }

    void skip_balanced(std::string_view open, std::string_view close)
    {
        expect(open);
        int depth = 1;
        while (depth > 0) {
            if (at_eof()) {
                throw SyntaxError{"unbalanced '" + std::string(open) + "'", tok().pos};
            }
            if (at(open)) {
                ++depth;
            } else if (at(close)) {
                --depth;
            }
            advance();
        }
    }

    Modifiers parse_modifiers()
    {
        Modifiers mods;
        while (true) {
            if (at("@") && !at(1, "interface")) {
                skip_annotation(&mods);
                continue;
            }
            if (tok().kind != TokenKind::Identifier) {
                break;
            }
            if (auto m = modifier_keyword(tok().text)) {
                // `default:` and `default ->` in switches are not modifiers.
                if (*m == Modifier::Default && (at(1, ":") || at(1, "->"))) {
                    break;
                }
                mods.set(*m);
                advance();
                continue;
            }
            if (tok().text == "sealed" && tok(1).kind == TokenKind::Identifier) {
                mods.set(Modifier::Sealed);
                advance();
                continue;
            }
            if (tok().text == "non" && at(1, "-") && tok(2).text == "sealed") {
                mods.set(Modifier::NonSealed);
                advance();
                advance();
                advance();
                continue;
            }
            break;
        }
        return mods;
    }

    bool at_type_declaration() const
    {
        return at("class") || at("interface") || at("enum") || (at("@") && at(1, "interface")) ||
               (tok().text == "record" && is_name(tok(1)) && (at(2, "(") || at(2, "<")));
    }

    void skip_declaration_body()
    {
        while (!at_eof() && !at("{")) {
            advance();
        }
        skip_balanced("{", "}");
    }

    std::map<std::string, std::string> parse_type_params()
    {
        std::map<std::string, std::string> params;
        expect("<");
        std::vector<std::pair<std::string, std::optional<ParsedType>>> raw;
        do {
            while (at("@")) {
                skip_annotation(nullptr);
            }
            std::string name = expect_name();
            std::optional<ParsedType> bound;
            if (accept("extends")) {
                bound = parse_type(false);
                while (accept("&")) {
                    parse_type(false);
                }
            }
            raw.emplace_back(std::move(name), std::move(bound));
        } while (accept(","));
        expect(">");

        // Bounds may mention the parameters themselves; erase those to Object.
        for (const auto& [name, bound] : raw) {
            params[name] = "java.lang.Object";
        }
        scope_.type_params.push_back(params);
        for (const auto& [name, bound] : raw) {
            if (bound) {
                params[name] = canonical_type(scope_, bound->dotted, bound->dims).text;
            }
        }
        scope_.type_params.pop_back();
        return params;
    }

    /// Returns false when the declaration kind is recognized but skipped.
    bool parse_type_declaration(Modifiers mods, const std::string& outer, ClassModel& out,
                                Position start, bool inline_mode)
    {
        if (at("@")) {
            warn("annotation type declarations are skipped", tok().pos);
            advance();
            advance();
            expect_name();
            skip_declaration_body();
            return false;
        }
        if (tok().text == "record") {
            warn("record declarations are skipped", tok().pos);
            skip_declaration_body();
            return false;
        }

        if (accept("class")) {
            out.kind = ClassKind::Class;
        } else if (accept("interface")) {
            out.kind = ClassKind::Interface;
        } else if (accept("enum")) {
            out.kind = ClassKind::Enum;
        } else {
            throw SyntaxError{"expected a type declaration", tok().pos};
        }
        out.modifiers = std::move(mods);
        out.simple_name = expect_name();
        if (!outer.empty()) {
            out.qualified_name = outer + "." + out.simple_name;
        } else if (!unit_.package_name.empty()) {
            out.qualified_name = unit_.package_name + "." + out.simple_name;
        } else {
            out.qualified_name = out.simple_name;
        }

        const ScopeMark mark = mark_scope();
        scope_.current_class = out.qualified_name;
        if (at("<")) {
            scope_.type_params.push_back(parse_type_params());
        }
        if (accept("extends")) {
            do {
                ParsedType t = parse_type(false);
                TypeName canonical = canonical_type(scope_, t.dotted, t.dims);
                if (out.kind == ClassKind::Class) {
                    out.superclass = std::move(canonical);
                } else {
                    out.interfaces.push_back(std::move(canonical));
                }
            } while (accept(","));
        }
        if (accept("implements")) {
            do {
                ParsedType t = parse_type(false);
                out.interfaces.push_back(canonical_type(scope_, t.dotted, t.dims));
            } while (accept(","));
        }
        if (tok().text == "permits") {
            advance();
            do {
                parse_type(false);
            } while (accept(","));
        }

        if (out.kind == ClassKind::Enum) {
            parse_enum_body(out, inline_mode);
        } else {
            expect("{");
            parse_members(out, inline_mode);
            expect_close();
        }
        out.source_span = {start.line, prev_line()};
        restore_scope(mark);
        return true;
    }

    void parse_enum_body(ClassModel& cls, bool inline_mode)
    {
        expect("{");
        while (at_name() || at("@")) {
            Modifiers annotations = parse_modifiers();
            FieldModel constant;
            constant.location = tok().pos;
            constant.name = expect_name();
            constant.declared_type = object_type(cls.qualified_name);
            constant.modifiers = std::move(annotations);
            constant.modifiers.set(Modifier::Public);
            constant.modifiers.set(Modifier::Static);
            constant.modifiers.set(Modifier::Final);
            Collector* saved = collector_;
            if (!inline_mode) {
                collector_ = &scratch_;
            }
            if (at("(")) {
                parse_arguments();
            }
            if (at("{")) {
                parse_anonymous_body();
            }
            collector_ = saved;
            cls.fields.push_back(std::move(constant));
            if (!accept(",")) {
                break;
            }
        }
        if (accept(";")) {
            parse_members(cls, inline_mode);
        }
        expect_close();
    }

    void parse_members(ClassModel& cls, bool inline_mode)
    {
        while (!at("}") && !at_eof()) {
            const std::size_t start = idx_;
            const ScopeMark mark = mark_scope();
            try {
                parse_member(cls, inline_mode);
            } catch (const SyntaxError& e) {
                if (inline_mode) {
                    warn(e.message, e.pos);
                    mark.collector->partial = true;
                } else {
                    error(e.message, e.pos);
                }
                restore_scope(mark);
                idx_ = start;
                recover(true);
            }
        }
    }

    void parse_member(ClassModel& cls, bool inline_mode)
    {
        if (accept(";")) {
            return;
        }
        if (at("{") || (at("static") && at(1, "{"))) {
            accept("static");
            parse_detached_block(inline_mode);
            return;
        }

        const Position start = tok().pos;
        Modifiers mods = parse_modifiers();
        if (at_type_declaration()) {
            ClassModel nested;
            if (parse_type_declaration(std::move(mods), cls.qualified_name, nested, start, inline_mode) &&
                !inline_mode) {
                cls.nested.push_back(std::move(nested));
            }
            return;
        }

        const std::size_t type_param_depth = scope_.type_params.size();
        if (at("<")) {
            scope_.type_params.push_back(parse_type_params());
        }

        if (!cls.simple_name.empty() && tok().text == cls.simple_name && at(1, "(")) {
            advance();
            MethodModel ctor;
            ctor.name = cls.simple_name;
            ctor.is_constructor = true;
            ctor.return_type = object_type(cls.qualified_name);
            ctor.modifiers = std::move(mods);
            parse_method_rest(ctor, ParsedType{}, start, inline_mode);
            if (!inline_mode) {
                cls.methods.push_back(std::move(ctor));
            }
        } else {
            ParsedType type = parse_type(false);
            const Position name_pos = tok().pos;
            std::string name = expect_name();
            if (at("(")) {
                MethodModel method;
                method.name = std::move(name);
                method.modifiers = std::move(mods);
                parse_method_rest(method, type, start, inline_mode);
                if (!inline_mode) {
                    cls.methods.push_back(std::move(method));
                }
            } else {
                parse_field_declarators(cls, type, std::move(mods), std::move(name), name_pos, inline_mode);
            }
        }
        scope_.type_params.resize(type_param_depth);
    }

    void parse_field_declarators(ClassModel& cls, const ParsedType& type, Modifiers mods,
                                 std::string first_name, Position first_pos, bool inline_mode)
    {
        Collector* saved = collector_;
        if (!inline_mode) {
            collector_ = &scratch_;
        }
        std::string name = std::move(first_name);
        Position pos = first_pos;
        while (true) {
            int dims = type.dims;
            while (at("[") && at(1, "]")) {
                advance();
                advance();
                ++dims;
            }
            if (accept("=")) {
                push_locals();
                parse_variable_initializer();
                pop_locals();
            }
            FieldModel field;
            field.name = std::move(name);
            field.declared_type = canonical_type(scope_, type.dotted, dims);
            field.modifiers = mods;
            field.location = pos;
            cls.fields.push_back(std::move(field));
            if (!accept(",")) {
                break;
            }
            pos = tok().pos;
            name = expect_name();
        }
        expect(";");
        collector_ = saved;
    }

    void parse_method_rest(MethodModel& method, ParsedType return_type, Position start, bool inline_mode)
    {
        expect("(");
        std::set<std::string> seen;
        if (!at(")")) {
            do {
                parse_modifiers();
                ParsedType pt = parse_type(true);
                if (accept("this")) {
                    continue; // receiver parameter
                }
                const Position pos = tok().pos;
                std::string pname = expect_name();
                while (at("[") && at(1, "]")) {
                    advance();
                    advance();
                    ++pt.dims;
                }
                if (!seen.insert(pname).second) {
                    throw SyntaxError{"duplicate parameter '" + pname + "'", pos};
                }
                method.parameters.push_back({std::move(pname), canonical_type(scope_, pt.dotted, pt.dims)});
            } while (accept(","));
        }
        expect(")");
        while (at("[") && at(1, "]")) {
            advance();
            advance();
            ++return_type.dims;
        }
        if (!method.is_constructor) {
            method.return_type = canonical_type(scope_, return_type.dotted, return_type.dims);
        }
        if (accept("throws")) {
            do {
                parse_type(false);
            } while (accept(","));
        }

        if (accept("default")) {
            while (!at(";") && !at_eof()) {
                advance();
            }
        }

        if (at("{")) {
            const std::size_t body_begin = tok().offset;
            Collector body;
            Collector* saved_collector = collector_;
            std::vector<std::map<std::string, TypeName>> saved_locals;
            if (!inline_mode) {
                collector_ = &body;
                saved_locals.swap(locals_);
            }
            push_locals();
            for (const Parameter& p : method.parameters) {
                declare_local(p.name, p.type);
            }
            parse_block();
            pop_locals();
            if (!inline_mode) {
                collector_ = saved_collector;
                locals_.swap(saved_locals);
                method.invocations = std::move(body.calls);
                method.field_accesses = std::move(body.fields);
                method.partial = body.partial;
            }
            method.body_source = std::string(src_.substr(body_begin, prev_end() - body_begin));
        } else {
            expect(";");
        }
        method.source_span = {start.line, prev_line()};
    }

    /// Instance and static initializer blocks. Their call sites belong to no method.
    void parse_detached_block(bool inline_mode)
    {
        Collector* saved = collector_;
        std::vector<std::map<std::string, TypeName>> saved_locals;
        if (!inline_mode) {
            collector_ = &scratch_;
            saved_locals.swap(locals_);
        }
        parse_block();
        if (!inline_mode) {
            collector_ = saved;
            locals_.swap(saved_locals);
        }
    }

    /// Anonymous class bodies: members are parsed, but their call sites are
    /// credited to whatever method encloses the expression.
    void parse_anonymous_body()
    {
        expect("{");
        ClassModel scratch;
        scratch.qualified_name = scope_.current_class;
        push_locals();
        parse_members(scratch, true);
        pop_locals();
        expect_close();
    }

    // ---- types ---------------------------------------------------------

    bool at_type_start() const
    {
        return at("@") || (tok().kind == TokenKind::Identifier &&
                           (!is_keyword(tok().text) || is_primitive_type(tok().text) || at("void")));
    }

    void skip_type_arguments()
    {
        expect("<");
        int depth = 1;
        while (depth > 0) {
            const Token& t = tok();
            if (t.kind == TokenKind::EndOfFile) {
                throw SyntaxError{"unterminated type arguments", t.pos};
            }
            if (t.text == "<") {
                ++depth;
            } else if (t.text == ">") {
                --depth;
            } else if (t.kind == TokenKind::Identifier) {
                if (is_keyword(t.text) && t.text != "extends" && t.text != "super" &&
                    !is_primitive_type(t.text)) {
                    throw SyntaxError{"unexpected '" + t.text + "' in type arguments", t.pos};
                }
            } else if (!(t.text == "." || t.text == "," || t.text == "?" || t.text == "[" ||
                         t.text == "]" || t.text == "&" || t.text == "@")) {
                throw SyntaxError{"unexpected '" + t.text + "' in type arguments", t.pos};
            }
            advance();
        }
    }

    ParsedType parse_type(bool allow_varargs)
    {
        while (at("@")) {
            skip_annotation(nullptr);
        }
        if (!at_type_start()) {
            throw SyntaxError{"expected a type but found '" +
                                  (at_eof() ? std::string("end of input") : tok().text) + "'",
                              tok().pos};
        }
        ParsedType type;
        type.dotted = tok().text;
        const bool primitive = is_primitive_type(type.dotted) || type.dotted == "void";
        advance();
        if (!primitive) {
            while (true) {
                if (at("<")) {
                    skip_type_arguments();
                }
                if (at(".") && is_name(tok(1))) {
                    advance();
                    type.dotted += "." + tok().text;
                    advance();
                    continue;
                }
                if (at(".") && at(1, "@")) {
                    advance();
                    while (at("@")) {
                        skip_annotation(nullptr);
                    }
                    type.dotted += "." + expect_name();
                    continue;
                }
                break;
            }
        }
        while (at("[") && at(1, "]")) {
            advance();
            advance();
            ++type.dims;
        }
        if (allow_varargs && accept("...")) {
            ++type.dims;
        }
        return type;
    }

    TypeName canonical(const ParsedType& t) { return canonical_type(scope_, t.dotted, t.dims); }

    // ---- locals --------------------------------------------------------

    void push_locals() { locals_.emplace_back(); }
    void pop_locals()
    {
        if (!locals_.empty()) {
            locals_.pop_back();
        }
    }

    void declare_local(const std::string& name, TypeName type)
    {
        if (locals_.empty()) {
            push_locals();
        }
        locals_.back()[name] = std::move(type);
    }

    const TypeName* find_local(const std::string& name) const
    {
        for (auto it = locals_.rbegin(); it != locals_.rend(); ++it) {
            if (auto found = it->find(name); found != it->end()) {
                return &found->second;
            }
        }
        return nullptr;
    }

    // ---- statements ----------------------------------------------------

    void parse_block()
    {
        expect("{");
        push_locals();
        parse_block_statements();
        pop_locals();
        expect_close();
    }

    void parse_block_statements()
    {
        while (!at("}") && !at_eof()) {
            parse_statement_recovering();
        }
    }

    void parse_statement_recovering()
    {
        const std::size_t start = idx_;
        const ScopeMark mark = mark_scope();
        try {
            parse_statement();
        } catch (const SyntaxError& e) {
            warn(e.message, e.pos);
            restore_scope(mark);
            collector_->partial = true;
            idx_ = start;
            recover(true);
        }
    }

    bool looks_like_local_declaration()
    {
        const std::size_t save = idx_;
        bool result = false;
        try {
            while (at("final") || (at("@") && !at(1, "interface"))) {
                if (at("@")) {
                    skip_annotation(nullptr);
                } else {
                    advance();
                }
            }
            if (at_type_start() && !at("void")) {
                parse_type(false);
                result = is_name(tok()) &&
                         (at(1, "=") || at(1, ",") || at(1, ";") || at(1, ":") || at(1, "[") ||
                          at(1, ")"));
            }
        } catch (const SyntaxError&) {
            result = false;
        }
        idx_ = save;
        return result;
    }

    bool at_local_type_declaration()
    {
        std::size_t ahead = 0;
        while (tok(ahead).text == "abstract" || tok(ahead).text == "final" ||
               tok(ahead).text == "static" || tok(ahead).text == "strictfp") {
            ++ahead;
        }
        const Token& t = tok(ahead);
        return t.kind == TokenKind::Identifier && is_name(tok(ahead + 1)) &&
               (t.text == "class" || t.text == "interface" || t.text == "enum");
    }

    void parse_statement()
    {
        if (at("{")) {
            parse_block();
            return;
        }
        if (accept(";")) {
            return;
        }
        const std::string& word = tok().text;
        if (tok().kind == TokenKind::Identifier) {
            if (word == "if") {
                advance();
                parse_paren_expression();
                parse_statement();
                if (accept("else")) {
                    parse_statement();
                }
                return;
            }
            if (word == "while") {
                advance();
                parse_paren_expression();
                parse_statement();
                return;
            }
            if (word == "do") {
                advance();
                parse_statement();
                expect("while");
                parse_paren_expression();
                expect(";");
                return;
            }
            if (word == "for") {
                parse_for();
                return;
            }
            if (word == "try") {
                parse_try();
                return;
            }
            if (word == "switch") {
                advance();
                parse_paren_expression();
                parse_switch_body();
                return;
            }
            if (word == "synchronized") {
                advance();
                parse_paren_expression();
                parse_block();
                return;
            }
            if (word == "return" || word == "throw") {
                advance();
                if (!at(";")) {
                    parse_expression();
                }
                expect(";");
                return;
            }
            if (word == "break" || word == "continue") {
                advance();
                if (at_name()) {
                    advance();
                }
                expect(";");
                return;
            }
            if (word == "assert") {
                advance();
                parse_expression();
                if (accept(":")) {
                    parse_expression();
                }
                expect(";");
                return;
            }
            if (word == "yield" && !at(1, "=") && !at(1, "(") && !at(1, ".") && !at(1, "[") &&
                !at(1, "++") && !at(1, "--") && !at(1, ";")) {
                advance();
                parse_expression();
                expect(";");
                return;
            }
            if (at_local_type_declaration()) {
                const Position start = tok().pos;
                Modifiers mods = parse_modifiers();
                ClassModel local;
                parse_type_declaration(std::move(mods), scope_.current_class, local, start, true);
                return;
            }
            if (is_name(tok()) && at(1, ":")) {
                advance();
                advance();
                parse_statement();
                return;
            }
        }
        if (looks_like_local_declaration()) {
            parse_local_declaration();
            expect(";");
            return;
        }
        parse_expression();
        expect(";");
    }

    /// `[final] Type name [= init] {, name [= init]}` without the terminator.
    void parse_local_declaration()
    {
        parse_modifiers();
        ParsedType type = parse_type(false);
        const bool inferred = type.dotted == "var" && type.dims == 0;
        do {
            std::string name = expect_name();
            int dims = type.dims;
            while (at("[") && at(1, "]")) {
                advance();
                advance();
                ++dims;
            }
            TypeName declared = inferred ? TypeName{} : canonical_type(scope_, type.dotted, dims);
            if (accept("=")) {
                ExprInfo init = parse_variable_initializer();
                if (inferred && init.type) {
                    declared = *init.type;
                }
            }
            declare_local(name, std::move(declared));
        } while (accept(","));
    }

    ExprInfo parse_variable_initializer()
    {
        if (at("{")) {
            ExprInfo info;
            info.begin = tok().offset;
            advance();
            while (!at("}")) {
                parse_variable_initializer();
                if (!accept(",")) {
                    break;
                }
            }
            expect("}");
            info.end = prev_end();
            return info;
        }
        return parse_expression();
    }

    void parse_paren_expression()
    {
        expect("(");
        parse_expression();
        expect(")");
    }

    void parse_for()
    {
        expect("for");
        expect("(");
        push_locals();
        bool enhanced = false;
        if (!at(";")) {
            if (looks_like_local_declaration()) {
                const std::size_t save = idx_;
                parse_modifiers();
                ParsedType type = parse_type(false);
                const std::string name = expect_name();
                if (at(":")) {
                    advance();
                    ExprInfo iterable = parse_expression();
                    TypeName element;
                    if (type.dotted != "var") {
                        element = canonical(type);
                    } else if (iterable.type && iterable.type->text.size() > 2 &&
                               iterable.type->text.ends_with("[]")) {
                        element = TypeName{iterable.type->text.substr(0, iterable.type->text.size() - 2), false};
                        element.is_primitive = is_primitive_type(element.text);
                    }
                    declare_local(name, std::move(element));
                    enhanced = true;
                } else {
                    idx_ = save;
                    parse_local_declaration();
                }
            } else {
                do {
                    parse_expression();
                } while (accept(","));
            }
        }
        if (!enhanced) {
            expect(";");
            if (!at(";")) {
                parse_expression();
            }
            expect(";");
            if (!at(")")) {
                do {
                    parse_expression();
                } while (accept(","));
            }
        }
        expect(")");
        parse_statement();
        pop_locals();
    }

    void parse_try()
    {
        expect("try");
        push_locals();
        if (accept("(")) {
            while (!at(")")) {
                if (looks_like_local_declaration()) {
                    parse_local_declaration();
                } else {
                    parse_expression();
                }
                if (!accept(";")) {
                    break;
                }
            }
            expect(")");
        }
        parse_block();
        while (accept("catch")) {
            expect("(");
            push_locals();
            parse_modifiers();
            ParsedType first = parse_type(false);
            while (accept("|")) {
                parse_type(false);
            }
            declare_local(expect_name(), canonical(first));
            expect(")");
            parse_block();
            pop_locals();
        }
        if (accept("finally")) {
            parse_block();
        }
        pop_locals();
    }

    void parse_switch_body()
    {
        expect("{");
        push_locals();
        while (!at("}") && !at_eof()) {
            if (at("case") || (at("default") && (at(1, ":") || at(1, "->")))) {
                const std::size_t start = idx_;
                const ScopeMark mark = mark_scope();
                try {
                    parse_switch_label();
                } catch (const SyntaxError& e) {
                    warn(e.message, e.pos);
                    restore_scope(mark);
                    collector_->partial = true;
                    idx_ = start;
                    recover(true);
                }
                continue;
            }
            parse_statement_recovering();
        }
        pop_locals();
        expect_close();
    }

    void parse_switch_label()
    {
        if (accept("default")) {
            // handled below
        } else {
            expect("case");
            do {
                if (!accept("default")) {
                    parse_ternary();
                }
            } while (accept(","));
        }
        if (accept("->")) {
            if (at("{")) {
                parse_block();
            } else if (at("throw")) {
                parse_statement();
            } else {
                parse_expression();
                expect(";");
            }
            return;
        }
        expect(":");
    }

    // ---- expressions ---------------------------------------------------

    std::pair<std::string, std::size_t> peek_operator() const
    {
        const Token& t = tok();
        if (t.kind == TokenKind::Identifier && t.text == "instanceof") {
            return {"instanceof", 1};
        }
        if (t.kind != TokenKind::Operator) {
            return {"", 0};
        }
        if (t.text != ">") {
            return {t.text, 1};
        }
        // Reassemble >, >>, >>>, >=, >>=, >>>= from adjacent tokens.
        std::string op = ">";
        std::size_t n = 1;
        while (n < 3 && tok(n).kind == TokenKind::Operator && tok(n).text == ">" &&
               tok(n).offset == tok(n - 1).end) {
            op += ">";
            ++n;
        }
        if (tok(n).kind == TokenKind::Operator && tok(n).text == "=" && tok(n).offset == tok(n - 1).end) {
            op += "=";
            ++n;
        }
        return {op, n};
    }

    void consume(std::size_t n)
    {
        for (std::size_t i = 0; i < n; ++i) {
            advance();
        }
    }

    std::size_t matching_paren(std::size_t open_index) const
    {
        int depth = 0;
        for (std::size_t i = open_index; i < tokens_.size(); ++i) {
            const Token& t = tokens_[i];
            if (t.kind != TokenKind::Operator) {
                continue;
            }
            if (t.text == "(") {
                ++depth;
            } else if (t.text == ")") {
                if (--depth == 0) {
                    return i;
                }
            }
        }
        return tokens_.size() - 1;
    }

    bool at_lambda() const
    {
        if (is_name(tok()) && at(1, "->")) {
            return true;
        }
        if (at("(")) {
            const std::size_t close = matching_paren(idx_);
            return close + 1 < tokens_.size() && is_punct(tokens_[close + 1], "->");
        }
        return false;
    }

    ExprInfo parse_lambda()
    {
        ExprInfo info;
        info.begin = tok().offset;
        push_locals();
        if (at_name()) {
            declare_local(tok().text, TypeName{});
            advance();
        } else {
            expect("(");
            if (!at(")")) {
                do {
                    if (is_name(tok()) && (at(1, ",") || at(1, ")"))) {
                        declare_local(tok().text, TypeName{});
                        advance();
                    } else {
                        parse_modifiers();
                        ParsedType type = parse_type(true);
                        std::string name = expect_name();
                        declare_local(name, type.dotted == "var" ? TypeName{} : canonical(type));
                    }
                } while (accept(","));
            }
            expect(")");
        }
        expect("->");
        if (at("{")) {
            parse_block();
        } else {
            parse_expression();
        }
        pop_locals();
        info.end = prev_end();
        return info;
    }

    ExprInfo parse_expression()
    {
        if (at_lambda()) {
            return parse_lambda();
        }
        ExprInfo lhs = parse_ternary();
        auto [op, n] = peek_operator();
        if (n > 0 && is_assignment_op(op)) {
            consume(n);
            ExprInfo rhs = parse_expression();
            lhs.end = rhs.end;
            lhs.shape = ExprInfo::Shape::Other;
        }
        return lhs;
    }

    ExprInfo parse_ternary()
    {
        ExprInfo cond = parse_binary(1);
        if (!at("?")) {
            return cond;
        }
        advance();
        ExprInfo a = parse_expression();
        expect(":");
        ExprInfo b = at_lambda() ? parse_lambda() : parse_ternary();
        ExprInfo info;
        info.begin = cond.begin;
        info.end = b.end;
        if (a.type && b.type && *a.type == *b.type) {
            info.type = a.type;
        } else if (numeric_rank(a.type) > 0 && numeric_rank(b.type) > 0) {
            info.type = promote(a.type, b.type);
        }
        return info;
    }

    ExprInfo parse_binary(int min_precedence)
    {
        ExprInfo lhs = parse_unary();
        while (true) {
            auto [op, n] = peek_operator();
            const int prec = n > 0 ? binary_precedence(op) : -1;
            if (prec < min_precedence) {
                break;
            }
            consume(n);
            if (op == "instanceof") {
                accept("final");
                ParsedType type = parse_type(false);
                if (at("(")) {
                    skip_balanced("(", ")");
                } else if (at_name()) {
                    declare_local(tok().text, canonical(type));
                    advance();
                }
                lhs.end = prev_end();
                lhs.type = primitive_type("boolean");
                lhs.shape = ExprInfo::Shape::Other;
                continue;
            }
            ExprInfo rhs = parse_binary(prec + 1);
            std::optional<TypeName> type;
            if (prec <= 2 || prec == 6 || prec == 7) {
                type = primitive_type("boolean");
            } else if (op == "+" && (is_string(lhs.type) || is_string(rhs.type))) {
                type = object_type("java.lang.String");
            } else if (prec >= 3 && prec <= 5 && lhs.type && rhs.type && lhs.type->text == "boolean" &&
                       rhs.type->text == "boolean") {
                type = primitive_type("boolean");
            } else if (prec == 8) {
                type = promote(lhs.type, primitive_type("int"));
            } else {
                type = promote(lhs.type, rhs.type);
            }
            lhs.end = rhs.end;
            lhs.type = std::move(type);
            lhs.shape = ExprInfo::Shape::Other;
        }
        return lhs;
    }

    bool starts_operand(bool allow_sign) const
    {
        const Token& t = tok();
        switch (t.kind) {
        case TokenKind::IntLiteral:
        case TokenKind::FloatLiteral:
        case TokenKind::CharLiteral:
        case TokenKind::StringLiteral:
            return true;
        case TokenKind::Identifier:
            return !is_keyword(t.text) || t.text == "this" || t.text == "super" || t.text == "new" ||
                   t.text == "true" || t.text == "false" || t.text == "null" || t.text == "switch" ||
                   is_primitive_type(t.text);
        case TokenKind::Operator:
            return t.text == "(" || t.text == "!" || t.text == "~" ||
                   (allow_sign && (t.text == "+" || t.text == "-" || t.text == "++" || t.text == "--"));
        case TokenKind::EndOfFile:
            return false;
        }
        return false;
    }

    std::optional<ExprInfo> try_cast()
    {
        const std::size_t save = idx_;
        ParsedType type;
        try {
            expect("(");
            type = parse_type(false);
            while (accept("&")) {
                parse_type(false);
            }
            if (!at(")")) {
                idx_ = save;
                return std::nullopt;
            }
            advance();
        } catch (const SyntaxError&) {
            idx_ = save;
            return std::nullopt;
        }
        const bool primitive = is_primitive_type(type.dotted) && type.dims == 0;
        if (!starts_operand(primitive)) {
            idx_ = save;
            return std::nullopt;
        }
        ExprInfo operand = at_lambda() ? parse_lambda() : parse_unary();
        ExprInfo info;
        info.begin = tokens_[save].offset;
        info.end = operand.end;
        info.shape = ExprInfo::Shape::Typed;
        info.type = canonical(type);
        return info;
    }

    ExprInfo parse_unary()
    {
        const Token& t = tok();
        if (t.kind == TokenKind::Operator &&
            (t.text == "+" || t.text == "-" || t.text == "++" || t.text == "--" || t.text == "!" ||
             t.text == "~")) {
            const std::string op = t.text;
            const std::size_t begin = t.offset;
            advance();
            ExprInfo operand = parse_unary();
            ExprInfo info;
            info.begin = begin;
            info.end = operand.end;
            if (op == "!") {
                info.type = primitive_type("boolean");
            } else if (op == "++" || op == "--") {
                info.type = operand.type;
            } else {
                info.type = promote(operand.type, primitive_type("int"));
            }
            return info;
        }
        if (at("(")) {
            if (auto cast = try_cast()) {
                return *cast;
            }
        }
        return parse_postfix(parse_primary());
    }

    ExprInfo literal(TypeName type)
    {
        ExprInfo info;
        info.begin = tok().offset;
        info.end = tok().end;
        info.shape = ExprInfo::Shape::Typed;
        info.type = std::move(type);
        advance();
        return info;
    }

    ExprInfo parse_primary()
    {
        const Token& t = tok();
        switch (t.kind) {
        case TokenKind::IntLiteral: {
            const char last = t.text.back();
            return literal(primitive_type(last == 'l' || last == 'L' ? "long" : "int"));
        }
        case TokenKind::FloatLiteral: {
            const char last = t.text.back();
            const bool is_float = (last == 'f' || last == 'F') && t.text.rfind("0x", 0) != 0;
            return literal(primitive_type(is_float ? "float" : "double"));
        }
        case TokenKind::CharLiteral:
            return literal(primitive_type("char"));
        case TokenKind::StringLiteral:
            return literal(object_type("java.lang.String"));
        case TokenKind::EndOfFile:
            throw SyntaxError{"unexpected end of input", t.pos};
        default:
            break;
        }

        ExprInfo info;
        info.begin = t.offset;

        if (t.kind == TokenKind::Operator) {
            if (t.text == "(") {
                advance();
                ExprInfo inner = parse_expression();
                expect(")");
                info.type = inner.type;
                info.end = prev_end();
                return info;
            }
            throw SyntaxError{"unexpected '" + t.text + "'", t.pos};
        }

        const std::string word = t.text;
        if (word == "true" || word == "false") {
            return literal(primitive_type("boolean"));
        }
        if (word == "null") {
            advance();
            info.end = prev_end();
            return info;
        }
        if (word == "this") {
            advance();
            if (at("(")) {
                parse_arguments(); // explicit constructor invocation
                info.end = prev_end();
                return info;
            }
            info.shape = ExprInfo::Shape::This;
            if (!scope_.current_class.empty()) {
                info.type = object_type(scope_.current_class);
            }
            info.end = prev_end();
            return info;
        }
        if (word == "super") {
            advance();
            if (at("(")) {
                parse_arguments();
                info.end = prev_end();
                return info;
            }
            info.shape = ExprInfo::Shape::Super;
            info.end = prev_end();
            return info;
        }
        if (word == "new") {
            return parse_creation(info.begin);
        }
        if (word == "switch") {
            advance();
            parse_paren_expression();
            parse_switch_body();
            info.end = prev_end();
            return info;
        }
        if (is_primitive_type(word) || word == "void") {
            // int.class, int[].class
            parse_type(false);
            expect(".");
            expect("class");
            info.type = object_type("java.lang.Class");
            info.end = prev_end();
            return info;
        }
        if (is_keyword(word)) {
            throw SyntaxError{"unexpected '" + word + "'", t.pos};
        }

        const Position pos = t.pos;
        if (at(1, "(")) {
            advance();
            return finish_call(word, pos, nullptr, info.begin);
        }
        if (at(1, "[") && at(2, "]")) {
            // String[].class, String[]::new
            ParsedType type = parse_type(false);
            info.type = canonical(type);
            if (accept(".")) {
                expect("class");
                info.type = object_type("java.lang.Class");
            }
            info.end = prev_end();
            return info;
        }

        advance();
        info.end = prev_end();
        info.shape = ExprInfo::Shape::Name;
        info.name = word;
        const TypeName* local = find_local(word);
        info.is_local = local != nullptr;
        if (local != nullptr && !local->empty()) {
            info.type = *local;
        }
        collector_->fields.push_back({word, std::nullopt, pos, info.is_local});
        return info;
    }

    ExprInfo parse_creation(std::size_t begin)
    {
        expect("new");
        if (at("<")) {
            skip_type_arguments();
        }
        while (at("@")) {
            skip_annotation(nullptr);
        }
        ParsedType type;
        type.dotted = expect_name_or_primitive();
        while (true) {
            if (at("<")) {
                skip_type_arguments();
            }
            if (at(".") && is_name(tok(1))) {
                advance();
                type.dotted += "." + tok().text;
                advance();
                continue;
            }
            break;
        }
        ExprInfo info;
        info.begin = begin;
        info.shape = ExprInfo::Shape::Typed;
        if (at("[")) {
            while (at("[")) {
                advance();
                if (!at("]")) {
                    parse_expression();
                }
                expect("]");
                ++type.dims;
            }
            if (at("{")) {
                parse_variable_initializer();
            }
        } else {
            parse_arguments();
            if (at("{")) {
                parse_anonymous_body();
            }
        }
        info.type = canonical(type);
        info.end = prev_end();
        return info;
    }

    std::string expect_name_or_primitive()
    {
        if (tok().kind == TokenKind::Identifier && (is_primitive_type(tok().text) || !is_keyword(tok().text))) {
            std::string name = tok().text;
            advance();
            return name;
        }
        throw SyntaxError{"expected a type name", tok().pos};
    }

    std::vector<ArgumentInfo> parse_arguments()
    {
        std::vector<ArgumentInfo> args;
        expect("(");
        if (!at(")")) {
            do {
                ExprInfo arg = parse_expression();
                ArgumentInfo info;
                info.type = arg.type;
                if (arg.shape == ExprInfo::Shape::Name && !arg.is_local) {
                    info.bare_name = arg.name;
                }
                if (arg.shape == ExprInfo::Shape::Call) {
                    info.call = arg.call_index;
                }
                args.push_back(std::move(info));
            } while (accept(","));
        }
        expect(")");
        return args;
    }

    ReceiverKind receiver_kind(const ExprInfo& receiver) const
    {
        switch (receiver.shape) {
        case ExprInfo::Shape::This:
            return ReceiverKind::This;
        case ExprInfo::Shape::Super:
            return ReceiverKind::Super;
        case ExprInfo::Shape::Name:
            return receiver.is_local ? ReceiverKind::Local : ReceiverKind::Name;
        case ExprInfo::Shape::Qualified:
            return ReceiverKind::QualifiedName;
        case ExprInfo::Shape::Typed:
            return ReceiverKind::Typed;
        case ExprInfo::Shape::Call:
            return ReceiverKind::Expression;
        case ExprInfo::Shape::Other:
            return receiver.type ? ReceiverKind::Typed : ReceiverKind::Expression;
        }
        return ReceiverKind::Expression;
    }

    /// Called with the callee identifier consumed and '(' current.
    ExprInfo finish_call(const std::string& name, Position pos, const ExprInfo* receiver, std::size_t begin)
    {
        const std::size_t index = collector_->calls.size();
        Collector* owner = collector_;
        {
            CallSite site;
            site.callee_name = name;
            site.span = pos;
            if (receiver != nullptr) {
                site.receiver_kind = receiver_kind(*receiver);
                site.receiver_expr = std::string(src_.substr(receiver->begin, receiver->end - receiver->begin));
                if (receiver->type && site.receiver_kind != ReceiverKind::This) {
                    site.receiver_type = receiver->type;
                }
                if (receiver->shape == ExprInfo::Shape::Call) {
                    site.receiver_call = receiver->call_index;
                }
            }
            owner->calls.push_back(std::move(site));
        }
        std::vector<ArgumentInfo> args = parse_arguments();
        owner->calls[index].argument_count = args.size();
        owner->calls[index].arguments = std::move(args);

        ExprInfo info;
        info.shape = ExprInfo::Shape::Call;
        info.call_index = index;
        info.begin = begin;
        info.end = prev_end();
        return info;
    }

    ExprInfo parse_postfix(ExprInfo expr)
    {
        while (true) {
            if (at(".")) {
                advance();
                if (at("<")) {
                    skip_type_arguments();
                    const Position pos = tok().pos;
                    std::string name = expect_name();
                    if (!at("(")) {
                        throw SyntaxError{"expected '(' after explicit type arguments", tok().pos};
                    }
                    expr = finish_call(name, pos, &expr, expr.begin);
                    continue;
                }
                if (accept("class")) {
                    expr.type = object_type("java.lang.Class");
                    expr.shape = ExprInfo::Shape::Typed;
                    expr.end = prev_end();
                    continue;
                }
                if (accept("this")) {
                    expr.shape = ExprInfo::Shape::Other;
                    expr.end = prev_end();
                    continue;
                }
                if (at("new")) {
                    const std::size_t begin = expr.begin;
                    expr = parse_creation(tok().offset);
                    expr.begin = begin;
                    continue;
                }
                if (accept("super")) {
                    expr.shape = ExprInfo::Shape::Super;
                    expr.type.reset();
                    expr.end = prev_end();
                    continue;
                }
                const Position pos = tok().pos;
                std::string name = expect_name();
                if (at("(")) {
                    expr = finish_call(name, pos, &expr, expr.begin);
                    continue;
                }
                collector_->fields.push_back(
                    {name, std::string(src_.substr(expr.begin, expr.end - expr.begin)), pos, false});
                const bool chain = expr.shape == ExprInfo::Shape::Qualified || expr.shape == ExprInfo::Shape::This ||
                                   (expr.shape == ExprInfo::Shape::Name && !expr.is_local);
                expr.shape = chain ? ExprInfo::Shape::Qualified : ExprInfo::Shape::Other;
                expr.type.reset();
                expr.end = prev_end();
                continue;
            }
            if (at("[")) {
                advance();
                parse_expression();
                expect("]");
                if (expr.type && expr.type->text.ends_with("[]")) {
                    std::string element = expr.type->text.substr(0, expr.type->text.size() - 2);
                    const bool primitive = is_primitive_type(element);
                    expr.type = TypeName{std::move(element), primitive};
                } else {
                    expr.type.reset();
                }
                expr.shape = ExprInfo::Shape::Other;
                expr.end = prev_end();
                continue;
            }
            if (at("::")) {
                advance();
                if (at("<")) {
                    skip_type_arguments();
                }
                if (!accept("new")) {
                    expect_name();
                }
                expr.shape = ExprInfo::Shape::Other;
                expr.type.reset();
                expr.end = prev_end();
                continue;
            }
            if (at("++") || at("--")) {
                advance();
                expr.shape = ExprInfo::Shape::Other;
                expr.end = prev_end();
                continue;
            }
            break;
        }
        return expr;
    }

    std::string_view src_;
    ParseOptions options_;
    std::vector<Token> tokens_;
    std::vector<ParseDiagnostic> diags_;
    std::size_t idx_ = 0;
    CompilationUnitModel unit_;
    TypeScope scope_;
    std::vector<std::map<std::string, TypeName>> locals_;
    Collector scratch_;
    Collector* collector_ = nullptr;
};

} // namespace

ParseResult parse_unit(std::string_view source, std::string path, ParseOptions options)
{
    LexResult lexed = lex(source);
    std::vector<ParseDiagnostic> diagnostics;
    for (const LexDiagnostic& d : lexed.diagnostics) {
        if (d.fatal && !options.lenient) {
            throw ParseError(d.message, d.pos.line, d.pos.column);
        }
        diagnostics.push_back({ParseDiagnostic::Severity::Warning, d.message, d.pos});
    }
    Parser parser(source, std::move(path), options, std::move(lexed.tokens), std::move(diagnostics));
    return parser.run();
}

std::vector<std::filesystem::path> list_source_files(const std::filesystem::path& root,
                                                     const std::vector<std::string>& ignore_dirs)
{
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    std::error_code ec;
    fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
    if (ec) {
        throw IoError("cannot read " + root.string() + ": " + ec.message());
    }
    for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) {
            throw IoError("cannot read " + root.string() + ": " + ec.message());
        }
        const fs::directory_entry& entry = *it;
        const std::string name = entry.path().filename().string();
        if (entry.is_directory()) {
            if (std::find(ignore_dirs.begin(), ignore_dirs.end(), name) != ignore_dirs.end()) {
                it.disable_recursion_pending();
            }
            continue;
        }
        if (entry.is_regular_file() && entry.path().extension() == ".java") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

namespace {

struct FileOutcome {
    std::optional<ParseResult> result;
    std::string failure;
};

FileOutcome parse_file(const std::filesystem::path& file, const std::filesystem::path& root)
{
    FileOutcome outcome;
    const std::string relative = std::filesystem::relative(file, root).generic_string();
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        outcome.failure = "cannot open file";
        return outcome;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        outcome.result = parse_unit(buffer.str(), relative);
    } catch (const ParseError& e) {
        outcome.failure = e.what();
    }
    return outcome;
}

} // namespace

ProjectParse parse_project(const std::filesystem::path& root, const ProjectParseOptions& options)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(root, ec)) {
        throw IoError("project root is not a readable directory: " + root.string());
    }
    const std::vector<fs::path> files = list_source_files(root, options.ignore_dirs);

    std::vector<FileOutcome> outcomes(files.size());
    const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(files.size())));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < files.size(); ++i) {
            outcomes[i] = parse_file(files[i], root);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        for (unsigned w = 0; w < jobs; ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < files.size(); i = next++) {
                    outcomes[i] = parse_file(files[i], root);
                }
            });
        }
        for (std::thread& t : workers) {
            t.join();
        }
    }

    ProjectParse project;
    for (std::size_t i = 0; i < files.size(); ++i) {
        const std::string relative = fs::relative(files[i], root).generic_string();
        if (!outcomes[i].result) {
            project.failures.push_back({relative, outcomes[i].failure});
            continue;
        }
        if (!outcomes[i].result->diagnostics.empty()) {
            project.diagnostics.push_back({relative, outcomes[i].result->diagnostics});
        }
        project.units.push_back(std::move(outcomes[i].result->unit));
    }
    return project;
}

} // namespace focalctx
