#include <algorithm>
#include <cctype>
#include <set>

#include "hyperres/adapters/formats.hpp"

namespace hyperres
{
    namespace
    {
        struct Token
        {
            enum class Kind
            {
                String,
                Ident,
                Op,     // = != < <= > >=
                Punct,  // [ ] { } ( ) | & ! :
                End,
            };

            Kind kind;
            std::string text;
            std::size_t line;
        };

        std::vector<Token> lex(std::string_view s)
        {
            std::vector<Token> out;
            std::size_t i = 0;
            std::size_t line = 1;
            auto fail = [&](const std::string& what) { throw UnsupportedConstruct(what, line); };
            while (i < s.size())
            {
                const char c = s[i];
                if (c == '\n')
                {
                    ++line;
                    ++i;
                }
                else if (std::isspace(static_cast<unsigned char>(c)))
                {
                    ++i;
                }
                else if (c == '#')
                {
                    while (i < s.size() && s[i] != '\n')
                    {
                        ++i;
                    }
                }
                else if (s.substr(i, 2) == "(*")
                {
                    const auto end = s.find("*)", i + 2);
                    if (end == std::string_view::npos)
                    {
                        throw MalformedDocument("unterminated comment", line);
                    }
                    line += static_cast<std::size_t>(std::count(s.begin() + i, s.begin() + end, '\n'));
                    i = end + 2;
                }
                else if (c == '"')
                {
                    const bool triple = s.substr(i, 3) == "\"\"\"";
                    const std::string_view close = triple ? "\"\"\"" : "\"";
                    const std::size_t start_line = line;
                    i += close.size();
                    std::string text;
                    while (i < s.size() && s.substr(i, close.size()) != close)
                    {
                        if (s[i] == '\\' && i + 1 < s.size())
                        {
                            ++i;
                        }
                        if (s[i] == '\n')
                        {
                            ++line;
                        }
                        text += s[i++];
                    }
                    if (i >= s.size())
                    {
                        throw MalformedDocument("unterminated string", start_line);
                    }
                    i += close.size();
                    out.push_back({Token::Kind::String, std::move(text), start_line});
                }
                else if (c == '<' || c == '>' || c == '=' || (c == '!' && i + 1 < s.size() && s[i + 1] == '='))
                {
                    std::string op(1, c);
                    if (i + 1 < s.size() && s[i + 1] == '=')
                    {
                        op += '=';
                    }
                    i += op.size();
                    out.push_back({Token::Kind::Op, std::move(op), line});
                }
                else if (std::string_view("[]{}()|&!:").find(c) != std::string_view::npos)
                {
                    out.push_back({Token::Kind::Punct, std::string(1, c), line});
                    ++i;
                }
                else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == '+')
                {
                    const auto start = i;
                    while (i < s.size()
                           && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_' || s[i] == '-' || s[i] == '.'
                               || s[i] == '+'))
                    {
                        ++i;
                    }
                    out.push_back({Token::Kind::Ident, std::string(s.substr(start, i - start)), line});
                }
                else
                {
                    fail(std::string("unexpected character '") + c + "'");
                }
            }
            out.push_back({Token::Kind::End, "", line});
            return out;
        }

        // Fields outside dependency resolution; their values are skipped.
        const std::set<std::string> informational = {
            "opam-version", "synopsis", "description", "maintainer", "authors",  "license",
            "homepage",     "bug-reports", "dev-repo",  "doc",        "tags",     "build",
            "install",      "remove",   "url",         "extra-files", "messages", "post-messages",
            "flags",        "x-commit-hash", "x-maintenance-intent",
        };

        struct Item
        {
            Requirement req;
            bool with_test = false;
        };

        class Parser
        {
        public:
            Parser(std::vector<Token> tokens, Bundle& b)
                : m_t(std::move(tokens))
                , m_b(b)
            {
            }

            void run()
            {
                while (peek().kind != Token::Kind::End)
                {
                    const auto& name = take();
                    if (name.kind != Token::Kind::Ident)
                    {
                        throw MalformedDocument("expected a field name", name.line);
                    }
                    if (peek_at().is("{"))
                    {
                        if (!informational.contains(name.text))
                        {
                            throw UnsupportedConstruct("section '" + name.text + "'", name.line);
                        }
                        skip_value();
                        continue;
                    }
                    expect(":");
                    field(name);
                }
            }

        private:
            struct Peek
            {
                const Token& t;
                bool is(std::string_view s) const
                {
                    return (t.kind == Token::Kind::Punct || t.kind == Token::Kind::Op) && t.text == s;
                }
            };

            Peek peek_at(std::size_t k = 0) const
            {
                return {m_t[std::min(m_pos + k, m_t.size() - 1)]};
            }

            const Token& peek() const
            {
                return peek_at().t;
            }

            const Token& take()
            {
                const auto& t = m_t[m_pos];
                if (t.kind != Token::Kind::End)
                {
                    ++m_pos;
                }
                return t;
            }

            void expect(std::string_view s)
            {
                if (!peek_at().is(s))
                {
                    throw MalformedDocument("expected '" + std::string(s) + "'", peek().line);
                }
                ++m_pos;
            }

            PackageRecord& current(std::size_t line)
            {
                if (m_b.packages.empty())
                {
                    throw MalformedDocument("field before the package name", line);
                }
                return m_b.packages.back();
            }

            std::string string_value()
            {
                const auto& t = take();
                if (t.kind != Token::Kind::String)
                {
                    throw MalformedDocument("expected a string", t.line);
                }
                return t.text;
            }

            void field(const Token& name)
            {
                const auto& f = name.text;
                if (f == "name")
                {
                    m_b.packages.emplace_back();
                    m_b.packages.back().name = string_value();
                    m_b.packages.back().line = name.line;
                }
                else if (f == "version")
                {
                    const auto line = peek().line;
                    auto& r = current(name.line);
                    r.version = string_value();
                    try
                    {
                        check_version(m_b.scheme, r.version);
                    }
                    catch (const MalformedVersion& e)
                    {
                        throw MalformedDocument(e.what(), line);
                    }
                }
                else if (f == "depends")
                {
                    auto& r = current(name.line);
                    for (auto& item : formula_list())
                    {
                        (item.with_test ? r.test_depends : r.depends).push_back(std::move(item.req));
                    }
                }
                else if (f == "depopts" || f == "conflicts")
                {
                    auto& r = current(name.line);
                    for (auto& item : formula_list())
                    {
                        if (item.with_test || item.req.post || !item.req.variable.empty())
                        {
                            throw UnsupportedConstruct("filters in " + f, name.line);
                        }
                        (f == "depopts" ? r.depopts : r.conflicts).push_back(std::move(item.req));
                    }
                }
                else if (f == "depexts")
                {
                    depexts(current(name.line));
                }
                else if (informational.contains(f))
                {
                    skip_value();
                }
                else
                {
                    throw UnsupportedConstruct("field '" + f + "'", name.line);
                }
            }

            void skip_value()
            {
                int depth = 0;
                do
                {
                    const auto& t = take();
                    if (t.kind == Token::Kind::End)
                    {
                        throw MalformedDocument("unterminated value", t.line);
                    }
                    if (t.kind == Token::Kind::Punct && (t.text == "[" || t.text == "{" || t.text == "("))
                    {
                        ++depth;
                    }
                    else if (t.kind == Token::Kind::Punct && (t.text == "]" || t.text == "}" || t.text == ")"))
                    {
                        --depth;
                    }
                } while (depth > 0);
            }

            std::vector<Item> formula_list()
            {
                std::vector<Item> out;
                expect("[");
                while (!peek_at().is("]"))
                {
                    if (peek().kind == Token::Kind::End)
                    {
                        throw MalformedDocument("unterminated list", peek().line);
                    }
                    out.push_back(disjunction());
                }
                expect("]");
                return out;
            }

            Item disjunction()
            {
                std::vector<Item> parts{conjunction()};
                while (peek_at().is("|"))
                {
                    ++m_pos;
                    parts.push_back(conjunction());
                }
                return combine(Requirement::Kind::Or, std::move(parts));
            }

            Item conjunction()
            {
                std::vector<Item> parts{unary()};
                while (peek_at().is("&"))
                {
                    ++m_pos;
                    parts.push_back(unary());
                }
                return combine(Requirement::Kind::And, std::move(parts));
            }

            Item combine(Requirement::Kind kind, std::vector<Item> parts)
            {
                if (parts.size() == 1)
                {
                    return std::move(parts.front());
                }
                std::vector<Requirement> children;
                for (auto& p : parts)
                {
                    if (p.with_test)
                    {
                        throw UnsupportedConstruct("with-test inside a compound formula", peek().line);
                    }
                    children.push_back(std::move(p.req));
                }
                return {Requirement::node(kind, std::move(children)), false};
            }

            Item unary()
            {
                const auto& t = peek();
                if (peek_at().is("!"))
                {
                    throw UnsupportedConstruct("negated package formula", t.line);
                }
                if (peek_at().is("("))
                {
                    ++m_pos;
                    auto inner = disjunction();
                    expect(")");
                    if (peek_at().is("{"))
                    {
                        throw UnsupportedConstruct("filter on a parenthesized formula", peek().line);
                    }
                    return inner;
                }
                if (t.kind != Token::Kind::String)
                {
                    throw MalformedDocument("expected a package name", t.line);
                }
                ++m_pos;
                Item item{Requirement::atom(t.text), false};
                if (peek_at().is("{"))
                {
                    filter(item);
                }
                return item;
            }

            static CmpOp op_of(const std::string& op)
            {
                if (op == "=")
                {
                    return CmpOp::Eq;
                }
                if (op == "!=")
                {
                    return CmpOp::Ne;
                }
                if (op == "<")
                {
                    return CmpOp::Lt;
                }
                if (op == "<=")
                {
                    return CmpOp::Le;
                }
                if (op == ">")
                {
                    return CmpOp::Gt;
                }
                return CmpOp::Ge;
            }

            /// `{ term (&|| term)* }` where a term is `op "v"`, a flag, or `var = "value"`.
            void filter(Item& item)
            {
                const auto open_line = peek().line;
                expect("{");
                std::vector<VersionConstraint> ands;
                std::vector<VersionConstraint> ors;
                bool saw_or = false;
                bool saw_other = false;
                for (;;)
                {
                    const auto& t = take();
                    if (t.kind == Token::Kind::Op)
                    {
                        const auto v = string_value();
                        ands.push_back(VersionConstraint::compare(op_of(t.text), v));
                    }
                    else if (t.kind == Token::Kind::Ident || t.kind == Token::Kind::String)
                    {
                        saw_other = true;
                        if (peek_at().is("="))
                        {
                            ++m_pos;
                            if (!item.req.variable.empty())
                            {
                                throw UnsupportedConstruct("two variable conditions on one package", t.line);
                            }
                            item.req.variable = t.text;
                            item.req.value = string_value();
                        }
                        else if (peek().kind == Token::Kind::Op || peek_at().is(":"))
                        {
                            throw UnsupportedConstruct("variable comparison '" + t.text + " " + peek().text + "'", t.line);
                        }
                        else if (t.text == "post")
                        {
                            item.req.post = true;
                        }
                        else if (t.text == "with-test")
                        {
                            item.with_test = true;
                        }
                        else if (t.text != "build")
                        {
                            throw UnsupportedConstruct("filter '" + t.text + "'", t.line);
                        }
                    }
                    else
                    {
                        throw UnsupportedConstruct("filter construct '" + t.text + "'", t.line);
                    }
                    if (peek_at().is("}"))
                    {
                        ++m_pos;
                        break;
                    }
                    if (peek_at().is("|"))
                    {
                        saw_or = true;
                        ors.push_back(ands.size() == 1 ? ands.front() : VersionConstraint::all_of(ands));
                        ands.clear();
                    }
                    else if (!peek_at().is("&"))
                    {
                        throw MalformedDocument("expected '&', '|' or '}' in filter", peek().line);
                    }
                    ++m_pos;
                }
                if (saw_or && saw_other)
                {
                    throw UnsupportedConstruct("'|' mixed with flags or variables in a filter", open_line);
                }
                if (saw_or)
                {
                    ors.push_back(ands.size() == 1 ? ands.front() : VersionConstraint::all_of(ands));
                    item.req.constraint = VersionConstraint::any_of(std::move(ors));
                }
                else if (ands.size() == 1)
                {
                    item.req.constraint = std::move(ands.front());
                }
                else
                {
                    item.req.constraint = VersionConstraint::all_of(std::move(ands));
                }
            }

            /// `[ ["pkg" ...] {os-distribution = "distro"} ... ]`: packages of the distro's ecosystem.
            void depexts(PackageRecord& r)
            {
                expect("[");
                while (!peek_at().is("]"))
                {
                    const auto line = peek().line;
                    std::vector<std::string> names;
                    if (peek_at().is("["))
                    {
                        ++m_pos;
                        while (!peek_at().is("]"))
                        {
                            names.push_back(string_value());
                        }
                        ++m_pos;
                    }
                    else
                    {
                        names.push_back(string_value());
                    }
                    if (!peek_at().is("{"))
                    {
                        throw UnsupportedConstruct("depext without an os-distribution filter", line);
                    }
                    Item probe{Requirement::atom(""), false};
                    filter(probe);
                    if (probe.req.variable != "os-distribution" || probe.with_test || probe.req.post
                        || probe.req.constraint.kind != VersionConstraint::Kind::And
                        || !probe.req.constraint.children.empty())
                    {
                        throw UnsupportedConstruct("depext filter other than os-distribution = \"...\"", line);
                    }
                    for (auto& n : names)
                    {
                        auto req = Requirement::atom(std::move(n));
                        req.ecosystem = probe.req.value;
                        req.variable = probe.req.variable;
                        req.value = probe.req.value;
                        r.depends.push_back(std::move(req));
                    }
                }
                ++m_pos;
            }

            std::vector<Token> m_t;
            std::size_t m_pos = 0;
            Bundle& m_b;
        };
    }

    Bundle parse_opam_subset(std::string_view text, const std::string& ecosystem)
    {
        Bundle b;
        b.ecosystem = ecosystem;
        b.scheme = VersionScheme::Debian;
        Parser(lex(text), b).run();
        for (const auto& r : b.packages)
        {
            if (r.version.empty())
            {
                throw MalformedDocument("package " + r.name + " has no version", r.line);
            }
        }
        return b;
    }
}
