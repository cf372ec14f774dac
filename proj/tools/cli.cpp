#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sumrange/battery.hpp"
#include "sumrange/errors.hpp"
#include "sumrange/family.hpp"
#include "sumrange/family_io.hpp"
#include "sumrange/family_verify.hpp"
#include "sumrange/lemmas.hpp"
#include "sumrange/schedule.hpp"
#include "sumrange/trace.hpp"

namespace sumrange::cli {

namespace {

struct Key {
    const char* name;
    const char* help;
};

const std::vector<Key> kKeys = {
    {"flavor", "family flavor: kadets, three-kadets, multi"},
    {"levels", "truncation depth L"},
    {"r", "number of sum-range points for --flavor multi"},
    {"sizes", "comma-separated |M_1|,|M_2|,... override"},
    {"family", "family file to read"},
    {"schedule", "schedule label: sigma, tau, p00, p10, p11, divergent, point:K, shuffle, identity"},
    {"target", "target point, e.g. 0,1,1 (defaults to the schedule's limit)"},
    {"p", "moment order"},
    {"seed", "random seed"},
    {"cases", "random instances per suite"},
    {"suite", "lemma suite: l0, l1, l2, drift, all"},
    {"matrix", "matrix file, or rows inline as '1 0;0 1'"},
    {"out", "output file (written atomically)"},
    {"jobs", "worker threads"},
};

// Option values as given on the command line, completed from --config.
class Settings {
public:
    std::map<std::string, std::string> values;

    bool has(const std::string& key) const { return values.count(key) && !values.at(key).empty(); }
    std::string text(const std::string& key, const std::string& fallback = {}) const
    {
        return has(key) ? values.at(key) : fallback;
    }
    std::int64_t integer(const std::string& key, std::int64_t fallback, std::int64_t lo, std::int64_t hi) const
    {
        if (!has(key)) return fallback;
        const std::string& t = values.at(key);
        std::int64_t v = 0;
        try {
            std::size_t used = 0;
            v = std::stoll(t, &used);
            if (used != t.size()) throw std::invalid_argument(t);
        } catch (const std::exception&) {
            throw ConfigError("--" + key + " expects an integer, got '" + t + "'");
        }
        if (v < lo || v > hi) {
            throw ConfigError("--" + key + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        }
        return v;
    }
    std::uint64_t seed() const
    {
        if (!has("seed")) return 7;
        const std::string& t = values.at("seed");
        try {
            std::size_t used = 0;
            const unsigned long long v = std::stoull(t, &used);
            if (used != t.size() || t.front() == '-') throw std::invalid_argument(t);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("--seed expects a non-negative integer, got '" + t + "'");
        }
    }
    unsigned jobs() const { return static_cast<unsigned>(integer("jobs", 1, 1, 256)); }
};

std::string trim(std::string s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::map<std::string, std::string> read_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::set<std::string> known{"command"};
    for (const Key& k : kKeys) known.insert(k.name);
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(number) + ": expected key=value");
        }
        std::string key = trim(line.substr(0, eq));
        if (!known.count(key)) throw ConfigError(path + ":" + std::to_string(number) + ": unknown key '" + key + "'");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

std::vector<std::string> split_list(const std::string& text)
{
    std::string t = text;
    for (char& c : t) {
        if (c == ',' || c == '(' || c == ')') c = ' ';
    }
    std::istringstream in(t);
    std::vector<std::string> out;
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

std::optional<IndexSets> parse_sizes(const Settings& s)
{
    if (!s.has("sizes")) return std::nullopt;
    std::vector<std::int64_t> sizes;
    for (const auto& w : split_list(s.text("sizes"))) {
        try {
            std::size_t used = 0;
            sizes.push_back(std::stoll(w, &used));
            if (used != w.size()) throw std::invalid_argument(w);
        } catch (const std::exception&) {
            throw ConfigError("bad size '" + w + "'");
        }
    }
    return IndexSets(std::move(sizes));
}

SumRangePoint parse_point(const std::string& text)
{
    SumRangePoint p;
    try {
        for (const auto& w : split_list(text)) p.values.push_back(Rational::parse(w));
    } catch (const ParseError& e) {
        throw ConfigError(std::string("bad target: ") + e.what());
    }
    if (p.values.empty()) throw ConfigError("empty target");
    return p;
}

Family build_from(const Settings& s)
{
    const std::string flavor = s.text("flavor", "kadets");
    const int levels = static_cast<int>(s.integer("levels", 4, 1, 64));
    const std::optional<IndexSets> sizes = parse_sizes(s);
    if (flavor == "kadets") {
        if (s.has("r") && s.integer("r", 2, 2, 2) != 2) throw ConfigError("kadets has r = 2");
        return sizes ? build_kadets(levels, *sizes) : build_kadets(levels);
    }
    if (flavor == "three-kadets") {
        if (sizes) throw ConfigError("three-kadets uses |M_n| = n; --sizes is not accepted");
        return build_three_kadets(levels);
    }
    if (flavor == "multi") {
        const int r = static_cast<int>(s.integer("r", 3, 2, 64));
        return sizes ? build_multipoint(r, levels, *sizes) : build_multipoint(r, levels);
    }
    throw ConfigError("unknown flavor '" + flavor + "' (kadets, three-kadets, multi)");
}

Family obtain_family(const Settings& s)
{
    if (s.has("family")) return load_family(s.text("family"));
    return build_from(s);
}

template <typename Fn>
void write_output(const Settings& s, std::ostream& out, const Fn& writer)
{
    if (s.has("out")) {
        write_atomically(s.text("out"), [&](std::ostream& os) { writer(os); });
    } else {
        writer(out);
    }
}

// ---------------------------------------------------------------- commands

int cmd_build(const Settings& s, std::ostream& out, std::ostream& err)
{
    const Family family = build_from(s);
    write_output(s, out, [&](std::ostream& os) { write_family(os, family); });
    err << "built " << to_string(family.flavor()) << " L=" << family.depth() << ": " << family.size() << " terms on "
        << family.domain().size() << " cubes\n";
    return kExitOk;
}

int cmd_verify(const Settings& s, std::ostream& out, std::ostream&)
{
    const Family family = obtain_family(s);
    const AxiomReport report = verify_family(family, s.jobs());
    report.write_text(out);
    if (s.has("out")) write_atomically(s.text("out"), [&](std::ostream& os) { report.write_csv(os); });
    return report.passed() ? kExitOk : kExitFailure;
}

int cmd_trace(const Settings& s, std::ostream& out, std::ostream& err)
{
    const Family family = obtain_family(s);
    if (!s.has("schedule")) throw ConfigError("trace needs --schedule");
    const Schedule schedule = schedule_by_label(family, s.text("schedule"), s.seed());
    SumRangePoint target;
    if (s.has("target")) {
        target = parse_point(s.text("target"));
    } else if (schedule.target) {
        target = *schedule.target;
    } else {
        target.values.assign(family.domain().size(), Rational(0));
    }
    const unsigned p = static_cast<unsigned>(s.integer("p", 1, 1, 64));
    TraceSummary summary(family, schedule);
    write_output(s, out, [&](std::ostream& os) {
        TraceCsvWriter csv(os);
        run_trace(family, schedule, target, p, [&](const TraceRow& row) {
            csv(row);
            summary(row);
        });
    });
    std::ostream& report = s.has("out") ? out : err;
    report << "target " << target.str() << ", p " << p << "\n";
    summary.write_text(report);
    return kExitOk;
}

int cmd_lemmas(const Settings& s, std::ostream& out, std::ostream&)
{
    const std::string suite = s.text("suite", "all");
    const auto cases = static_cast<std::size_t>(s.integer("cases", 500, 0, 10'000'000));
    const SuiteReport report = run_suite(suite, cases, s.seed(), s.jobs());
    report.write_text(out);
    for (const SuiteRow& row : report.rows) {
        if (report.suite == "drift" || row.instance.rfind("drift:", 0) == 0) {
            out << "  " << row.instance << ": " << row.note;
            for (const auto& [name, value] : row.witnesses) {
                if (name == "k" || name == "l" || name == "drift_sum" || name == "combined") {
                    out << ' ' << name << '=' << value.str();
                }
            }
            out << '\n';
        }
    }
    if (s.has("out")) write_atomically(s.text("out"), [&](std::ostream& os) { report.write_csv(os); });
    return report.passed() ? kExitOk : kExitFailure;
}

int cmd_transform(const Settings& s, std::ostream& out, std::ostream&)
{
    const Family base = obtain_family(s);
    if (!s.has("matrix")) throw ConfigError("transform needs --matrix");
    const std::string m = s.text("matrix");
    const TransformSpec t = std::filesystem::exists(m) ? load_transform(m) : parse_transform(m);
    const Family transformed = apply_transform(base, t);
    if (s.has("out")) save_family(s.text("out"), transformed);

    const std::vector<SumRangePoint> points = expected_sum_range(base);
    const std::vector<Schedule> schedules = convergent_schedules(transformed);
    bool ok = schedules.size() == points.size();
    std::set<std::string> distinct;
    for (std::size_t i = 0; i < schedules.size() && i < points.size(); ++i) {
        const SumRangePoint expected = transform_point(points[i], t);
        const MarkerEvaluation ev = evaluate_markers(transformed, schedules[i], expected);
        const bool match = ev.limit && *ev.limit == expected;
        ok = ok && match;
        if (ev.limit) distinct.insert(ev.limit->str());
        out << schedules[i].label << ": base " << points[i].str() << " -> "
            << (ev.limit ? ev.limit->str() : std::string("no cube-wise limit")) << ", expected " << expected.str()
            << (match ? "" : "  MISMATCH") << '\n';
    }
    out << distinct.size() << " distinct limit points of " << points.size() << "; "
        << (ok ? "all equal (I+T)(base points)" : "limits differ from (I+T)(base points)") << '\n';
    return ok ? kExitOk : kExitFailure;
}

int cmd_demo(const Settings& s, std::ostream& out, std::ostream&)
{
    BatteryOptions opt;
    opt.jobs = s.jobs();
    opt.seed = s.seed();
    opt.cases = static_cast<std::size_t>(s.integer("cases", 500, 0, 10'000'000));
    std::ostringstream lines;
    bool ok = true;
    run_battery(opt, [&](const CriterionResult& r) {
        write_criterion_line(out, r);
        write_criterion_line(lines, r);
        out.flush();
        ok = ok && r.passed;
    });
    if (s.has("out")) write_atomically(s.text("out"), [&](std::ostream& os) { os << lines.str(); });
    return ok ? kExitOk : kExitFailure;
}

struct Command {
    const char* name;
    const char* help;
    std::vector<std::string> keys;
    int (*run)(const Settings&, std::ostream&, std::ostream&);
};

const std::vector<Command>& commands()
{
    static const std::vector<Command> list = {
        {"build", "build a truncated family and write its family file", {"flavor", "levels", "r", "sizes", "out"},
         cmd_build},
        {"verify", "check every axiom of a family; exit 1 on any failure",
         {"family", "flavor", "levels", "r", "sizes", "out", "jobs"}, cmd_verify},
        {"trace", "write the partial-sum trace CSV of a schedule",
         {"family", "flavor", "levels", "r", "sizes", "schedule", "target", "p", "seed", "out"}, cmd_trace},
        {"lemmas", "run a lemma suite and write its report", {"suite", "cases", "seed", "out", "jobs"}, cmd_lemmas},
        {"transform", "build d + T P(d) and check its limits against (I+T)(base points)",
         {"family", "flavor", "levels", "r", "sizes", "matrix", "out"}, cmd_transform},
        {"demo", "run the acceptance battery", {"jobs", "seed", "cases", "out"}, cmd_demo},
    };
    return list;
}

const char* help_of(const std::string& key)
{
    for (const Key& k : kKeys) {
        if (key == k.name) return k.help;
    }
    return "";
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"sumrange: exact experiments on rearrangements of conditionally convergent series of step functions"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "key=value file; command-line flags take precedence");

    std::map<std::string, Settings> settings;
    std::map<std::string, std::map<std::string, CLI::Option*>> options;
    for (const Command& c : commands()) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("--config", config_path, "key=value file; command-line flags take precedence");
        for (const std::string& key : c.keys) {
            options[c.name][key] = sub->add_option("--" + key, settings[c.name].values[key], help_of(key));
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        // Subcommand help arrives as CallForHelp on the subcommand.
        if (e.get_exit_code() == 0) {
            for (CLI::App* sub : app.get_subcommands()) out << sub->help();
            if (app.get_subcommands().empty()) out << app.help();
            return kExitOk;
        }
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        const CLI::App* chosen = app.get_subcommands().front();
        const std::string name = chosen->get_name();
        Settings& s = settings[name];
        if (!config_path.empty()) {
            for (const auto& [key, value] : read_config(config_path)) {
                if (key == "command") {
                    if (value != name) throw ConfigError("config is for command '" + value + "', not '" + name + "'");
                    continue;
                }
                auto it = options[name].find(key);
                if (it == options[name].end()) continue;
                if (it->second->count() == 0) s.values[key] = value;
            }
        }
        for (const Command& c : commands()) {
            if (name == c.name) return c.run(s, out, err);
        }
        throw ConfigError("unknown command " + name);
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

} // namespace sumrange::cli
