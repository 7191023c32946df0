#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>

#include "hyperres/adapters/bundle.hpp"

namespace hyperres
{
    /// A parse failure tied to an input line (1-based; 0 when unknown).
    class ParseError : public Error
    {
    public:
        ParseError(const std::string& what, std::size_t line)
            : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what)
            , m_line(line)
        {
        }

        [[nodiscard]] std::size_t line() const noexcept
        {
            return m_line;
        }

    private:
        std::size_t m_line;
    };

    class MalformedStanza : public ParseError
    {
    public:
        using ParseError::ParseError;
    };

    class MalformedManifest : public ParseError
    {
    public:
        using ParseError::ParseError;
    };

    class UnsupportedConstruct : public ParseError
    {
    public:
        using ParseError::ParseError;
    };

    class MalformedDocument : public ParseError
    {
    public:
        using ParseError::ParseError;
    };

    class SchemaVersionMismatch : public Error
    {
    public:
        using Error::Error;
    };

    /// Reads a whole stream, for the parsers below.
    [[nodiscard]] std::string read_all(std::istream& in);

    /**
     * Debian Packages index. Pre-Depends are dependencies, Recommends are
     * optional dependencies, Breaks are conflicts, Suggests are dropped
     * with a warning.
     */
    [[nodiscard]] Bundle parse_debian_packages(std::string_view text, const std::string& ecosystem = "debian");

    /// Cargo registry index (one JSON object per line) or Cargo.toml manifests.
    [[nodiscard]] Bundle parse_cargo_metadata(std::string_view text, const std::string& ecosystem = "cargo");

    /// The opam subset documented in docs/formats.md.
    [[nodiscard]] Bundle parse_opam_subset(std::string_view text, const std::string& ecosystem = "opam");

    inline constexpr const char* interchange_schema = "hyperres/1";

    [[nodiscard]] Repository load_interchange(std::string_view text);

    /// Canonical JSON, byte-stable for equal inputs.
    [[nodiscard]] std::string dump_interchange(const Repository& repo);
}
