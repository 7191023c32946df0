#include <cstdlib>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "hyperres/adapters/formats.hpp"
#include "hyperres/cli/cli.hpp"
#include "hyperres/cli/pipeline.hpp"
#include "hyperres/core/graph_io.hpp"
#include "hyperres/core/plan.hpp"
#include "hyperres/core/verify.hpp"
#include "hyperres/encodings/features.hpp"
#include "hyperres/solver/cnf.hpp"

namespace hyperres
{
    namespace
    {
        class Io
        {
        public:
            Io(std::istream& in, std::ostream& out)
                : m_in(in)
                , m_out(out)
            {
            }

            std::string read(const std::string& path)
            {
                if (path == "-")
                {
                    return read_all(m_in);
                }
                std::ifstream f(path, std::ios::binary);
                if (!f)
                {
                    throw Error("cannot open " + path);
                }
                return read_all(f);
            }

            void write(const std::string& path, const std::string& text)
            {
                if (path.empty() || path == "-")
                {
                    m_out << text;
                    return;
                }
                std::ofstream f(path, std::ios::binary);
                if (!f)
                {
                    throw Error("cannot write " + path);
                }
                f << text;
            }

        private:
            std::istream& m_in;
            std::ostream& m_out;
        };

        enum class Format
        {
            Debian,
            Cargo,
            Opam,
            Interchange,
        };

        Format format_from_string(const std::string& s)
        {
            if (s == "debian")
            {
                return Format::Debian;
            }
            if (s == "cargo")
            {
                return Format::Cargo;
            }
            if (s == "opam")
            {
                return Format::Opam;
            }
            if (s == "interchange")
            {
                return Format::Interchange;
            }
            throw Error("unknown format '" + s + "' (expected debian, cargo, opam or interchange)");
        }

        /// `[format:]path`; without a prefix the extension decides and Debian is the fallback.
        std::pair<Format, std::string> repo_spec(const std::string& spec)
        {
            if (const auto colon = spec.find(':'); colon != std::string::npos)
            {
                const auto prefix = spec.substr(0, colon);
                if (prefix == "debian" || prefix == "cargo" || prefix == "opam" || prefix == "interchange")
                {
                    return {format_from_string(prefix), spec.substr(colon + 1)};
                }
            }
            auto ends = [&](std::string_view ext) { return spec.ends_with(ext); };
            if (ends(".json"))
            {
                return {Format::Interchange, spec};
            }
            if (ends(".opam"))
            {
                return {Format::Opam, spec};
            }
            if (ends(".toml") || ends(".jsonl"))
            {
                return {Format::Cargo, spec};
            }
            return {Format::Debian, spec};
        }

        Bundle parse_bundle(Format f, const std::string& text)
        {
            switch (f)
            {
                case Format::Debian:
                    return parse_debian_packages(text);
                case Format::Cargo:
                    return parse_cargo_metadata(text);
                case Format::Opam:
                    return parse_opam_subset(text);
                case Format::Interchange:
                    break;
            }
            throw Error("interchange documents are not bundles");
        }

        Repository load_repos(Io& io, const std::vector<std::string>& specs)
        {
            std::vector<Repository> docs;
            std::vector<Bundle> bundles;
            for (const auto& spec : specs)
            {
                const auto [format, path] = repo_spec(spec);
                const auto text = io.read(path);
                try
                {
                    if (format == Format::Interchange)
                    {
                        docs.push_back(load_interchange(text));
                    }
                    else
                    {
                        bundles.push_back(parse_bundle(format, text));
                    }
                }
                catch (const Error& e)
                {
                    throw Error(path + ": " + e.what());
                }
            }
            return materialize(bundles, merge_repositories(docs));
        }

        struct Problem
        {
            Repository repo;
            ResolutionHypergraph h;
            PackageSet query;
            PipelineConfig config;
        };

        Problem load_problem(
            Io& io,
            const std::vector<std::string>& repos,
            const std::vector<std::string>& queries,
            const std::string& pipeline
        )
        {
            Problem p;
            p.repo = load_repos(io, repos);
            if (!pipeline.empty())
            {
                try
                {
                    p.config = parse_pipeline(io.read(pipeline));
                }
                catch (const Error& e)
                {
                    throw Error(pipeline + ": " + e.what());
                }
            }
            auto out = apply_pipeline(p.repo, p.config);
            p.h = std::move(out.hypergraph);
            p.query = std::move(out.query);
            p.query.insert(p.config.query.begin(), p.config.query.end());
            for (const auto& q : queries)
            {
                p.query.insert(PackageId::parse(q));
            }
            for (const auto& q : p.query)
            {
                if (!p.h.contains(q))
                {
                    throw Error("query package " + q.str() + " is not in the repository");
                }
            }
            return p;
        }

        void print_warnings(const ResolutionHypergraph& h, std::ostream& err)
        {
            for (const auto& w : h.warnings())
            {
                err << "warning: " << w << '\n';
            }
        }

        std::string render_plan(const ResolutionHypergraph& h, const DeploymentPlan& plan)
        {
            std::ostringstream os;
            for (const auto& p : plan.order)
            {
                if (!h.is_virtual(p))
                {
                    os << p.str() << '\n';
                }
                for (const auto& [a, b] : plan.broken_edges)
                {
                    if (a == p)
                    {
                        os << "# broken-cycle " << a.str() << " -> " << b.str() << '\n';
                    }
                }
            }
            return os.str();
        }

        struct Options
        {
            std::vector<std::string> repos;
            std::vector<std::string> queries;
            std::string pipeline;
            std::string policy;
            std::string format;
            bool break_cycles = false;
            std::string out;
            std::string solution;
            std::string dimacs;
            std::string varmap;
            std::string import_format;
            std::string import_path = "-";
        };

        DecisionOrder pick_policy(const Options& o, const PipelineConfig& cfg)
        {
            if (!o.policy.empty())
            {
                return decision_order_from_string(o.policy);
            }
            if (cfg.policy)
            {
                return *cfg.policy;
            }
            if (const char* env = std::getenv("HYPERRES_POLICY"); env != nullptr && *env != '\0')
            {
                return decision_order_from_string(env);
            }
            return DecisionOrder::HighestVersionFirst;
        }

        int cmd_import(Io& io, const Options& o)
        {
            const auto format = format_from_string(o.import_format);
            const auto text = io.read(o.import_path);
            const auto repo = format == Format::Interchange ? load_interchange(text) : materialize({parse_bundle(format, text)});
            io.write(o.out, dump_interchange(repo));
            return ExitSuccess;
        }

        int cmd_resolve(Io& io, const Options& o, std::ostream& err)
        {
            const auto p = load_problem(io, o.repos, o.queries, o.pipeline);
            print_warnings(p.h, err);
            const SolvePolicy policy{pick_policy(o, p.config)};
            SolveResult res;
            if (p.h.has_feature_tables())
            {
                const auto lowered = lower_features(p.h);
                res = solve(lowered, p.query, policy);
                if (res.satisfiable)
                {
                    res.graph = extract_feature_solution(p.h, res.graph);
                }
            }
            else
            {
                res = solve(p.h, p.query, policy);
            }
            if (!res.satisfiable)
            {
                err << res.diagnostic() << '\n';
                return ExitUnsatisfiable;
            }
            const auto post = post_edges(p.h, res.graph);
            const auto format = !o.format.empty() ? o.format : p.config.format.value_or("json");
            if (format == "plan")
            {
                const bool brk = o.break_cycles || p.config.break_cycles.value_or(false);
                try
                {
                    io.write(o.out, render_plan(p.h, topo_plan(res.graph, post, brk)));
                }
                catch (const CycleError& e)
                {
                    err << e.what() << '\n';
                    return ExitUnsatisfiable;
                }
            }
            else if (format == "dot")
            {
                io.write(o.out, dump_dot(res.graph, post));
            }
            else
            {
                io.write(o.out, dump_graph_json(res.graph, post));
            }
            return ExitSuccess;
        }

        int cmd_verify(Io& io, const Options& o, std::ostream& out)
        {
            const auto p = load_problem(io, o.repos, o.queries, o.pipeline);
            const auto g = load_graph_json(io.read(o.solution));
            for (const auto& v : g.vertices)
            {
                if (!p.h.contains(v))
                {
                    throw Error("solution names unknown package " + v.str());
                }
            }
            for (const auto& [a, b] : g.edges)
            {
                if (!p.h.contains(a) || !p.h.contains(b))
                {
                    throw Error("solution edge " + a.str() + " -> " + b.str() + " names an unknown package");
                }
            }
            const auto report =
                p.h.has_feature_tables() ? verify_features(p.h, p.query, g) : verify_resolution(p.h, p.query, g);
            out << format_report(report);
            return report.valid() ? ExitSuccess : ExitUnsatisfiable;
        }

        int cmd_encode(Io& io, const Options& o)
        {
            const auto p = load_problem(io, o.repos, o.queries, o.pipeline);
            const auto cnf = encode_cnf(p.h, p.query);
            io.write(o.dimacs, export_dimacs(cnf.formula));
            if (!o.varmap.empty())
            {
                io.write(o.varmap, export_varmap(p.h, cnf));
            }
            return ExitSuccess;
        }
    }

    int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err)
    {
        CLI::App app{"hyperres: cross-ecosystem dependency resolution over hypergraphs", "hyperres"};
        app.require_subcommand(1);
        Options o;

        auto* imp = app.add_subcommand("import", "Parse metadata into an interchange document");
        imp->add_option("format", o.import_format, "debian, cargo, opam or interchange")->required();
        imp->add_option("input", o.import_path, "Input file, - for stdin");
        imp->add_option("--out", o.out, "Output file (default stdout)");

        auto add_problem = [&](CLI::App* c)
        {
            c->add_option("--repo", o.repos, "Repository file, optionally prefixed with its format and ':'");
            c->add_option("--query", o.queries, "Query package <ecosystem>:<name>@<version>");
            c->add_option("--pipeline", o.pipeline, "Pipeline configuration file");
        };

        auto* res = app.add_subcommand("resolve", "Resolve a query");
        add_problem(res);
        res->add_option("--policy", o.policy, "highest, lowest or declaration");
        res->add_option("--format", o.format, "json, dot or plan")->check(CLI::IsMember({"json", "dot", "plan"}));
        res->add_flag("--break-cycles", o.break_cycles, "Break remaining cycles in plans");
        res->add_option("--out", o.out, "Output file (default stdout)");

        auto* ver = app.add_subcommand("verify", "Check a candidate solution");
        add_problem(ver);
        ver->add_option("--solution", o.solution, "Solution in graph-JSON form")->required();

        auto* enc = app.add_subcommand("encode", "Export the CNF encoding");
        add_problem(enc);
        enc->add_option("--dimacs", o.dimacs, "DIMACS output (default stdout)");
        enc->add_option("--varmap", o.varmap, "Variable map output");

        try
        {
            std::vector<std::string> reversed(args.rbegin(), args.rend());
            app.parse(reversed);
        }
        catch (const CLI::CallForHelp&)
        {
            out << app.help();
            return ExitSuccess;
        }
        catch (const CLI::ParseError& e)
        {
            err << "error: " << e.what() << "\n\n" << app.help();
            return ExitUsage;
        }

        Io io(in, out);
        try
        {
            if (imp->parsed())
            {
                return cmd_import(io, o);
            }
            if (res->parsed())
            {
                if (o.repos.empty())
                {
                    err << "error: resolve needs at least one --repo\n";
                    return ExitUsage;
                }
                return cmd_resolve(io, o, err);
            }
            if (ver->parsed())
            {
                return cmd_verify(io, o, out);
            }
            return cmd_encode(io, o);
        }
        catch (const Error& e)
        {
            err << "error: " << e.what() << '\n';
            return ExitUsage;
        }
    }
}
