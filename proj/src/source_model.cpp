#include "focalctx/source_model.hpp"

#include "focalctx/errors.hpp"

#include <algorithm>
#include <limits>

namespace focalctx {

bool Modifiers::has_annotation(std::string_view name) const
{
    return std::find(annotations.begin(), annotations.end(), name) != annotations.end();
}

int line_count(std::string_view text)
{
    if (text.empty()) {
        return 0;
    }
    int lines = static_cast<int>(std::count(text.begin(), text.end(), '\n'));
    if (text.back() != '\n') {
        ++lines;
    }
    return lines;
}

std::string span_text(const CompilationUnitModel& unit, SourceSpan span)
{
    const std::string& src = unit.raw_source;
    const int lines = line_count(src);
    if (span.start_line < 1 || span.end_line < span.start_line || span.end_line > lines) {
        throw RangeError("span " + std::to_string(span.start_line) + ".." +
                         std::to_string(span.end_line) + " outside " + unit.path + " (" +
                         std::to_string(lines) + " lines)");
    }

    std::size_t begin = 0;
    for (int line = 1; line < span.start_line; ++line) {
        begin = src.find('\n', begin) + 1;
    }
    std::size_t end = begin;
    for (int line = span.start_line; line <= span.end_line; ++line) {
        const std::size_t nl = src.find('\n', end);
        if (nl == std::string::npos) {
            end = src.size();
            break;
        }
        end = (line == span.end_line) ? nl : nl + 1;
    }
    std::string out = src.substr(begin, end - begin);
    if (!out.empty() && out.back() == '\r') {
        out.pop_back();
    }
    return out;
}

std::string strip_common_indent(std::string_view text)
{
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (true) {
        const std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            lines.push_back(text.substr(pos));
            break;
        }
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }

    std::size_t indent = std::numeric_limits<std::size_t>::max();
    for (std::string_view line : lines) {
        const std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string_view::npos) {
            continue;
        }
        indent = std::min(indent, first);
    }
    if (indent == std::numeric_limits<std::size_t>::max()) {
        indent = 0;
    }

    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string_view line = lines[i];
        out.append(line.size() >= indent ? line.substr(indent) : std::string_view{});
        if (i + 1 < lines.size()) {
            out.push_back('\n');
        }
    }
    return out;
}

std::string_view to_string(ClassKind kind)
{
    switch (kind) {
    case ClassKind::Class:
        return "class";
    case ClassKind::Interface:
        return "interface";
    case ClassKind::Enum:
        return "enum";
    }
    return "class";
}

namespace {

void visit_class(const ClassModel& cls, const std::function<void(const ClassModel&)>& visit)
{
    visit(cls);
    for (const ClassModel& inner : cls.nested) {
        visit_class(inner, visit);
    }
}

} // namespace

void for_each_class(const CompilationUnitModel& unit,
                    const std::function<void(const ClassModel&)>& visit)
{
    for (const ClassModel& cls : unit.types) {
        visit_class(cls, visit);
    }
}

} // namespace focalctx
