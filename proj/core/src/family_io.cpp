#include "sumrange/family_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <unistd.h>

#include "sumrange/errors.hpp"
#include "sumrange/step_function_io.hpp"

namespace sumrange {

namespace {

constexpr std::string_view kMagic = "sumrange-family v1";

class StoredSource final : public TermSource {
public:
    explicit StoredSource(std::map<TermId, StepFunction> terms) : terms_(std::move(terms)) {}

    StepFunction make(const TermId& id) const override
    {
        auto it = terms_.find(id);
        if (it == terms_.end()) throw StructuralError("term " + id.str() + " is not stored");
        return it->second;
    }

private:
    std::map<TermId, StepFunction> terms_;
};

std::vector<std::string> split_ws(std::string_view text)
{
    std::vector<std::string> out;
    std::istringstream in{std::string(text)};
    std::string word;
    while (in >> word) out.push_back(word);
    return out;
}

std::int64_t to_int(const std::string& text, const std::string& what)
{
    try {
        std::size_t used = 0;
        long long v = std::stoll(text, &used);
        if (used != text.size()) throw ParseError("");
        return v;
    } catch (const std::exception&) {
        throw ParseError("bad " + what + " '" + text + "'");
    }
}

class LineReader {
public:
    explicit LineReader(std::istream& is) : is_(is) {}

    std::string next(const std::string& expecting)
    {
        std::string line;
        if (!std::getline(is_, line)) throw ParseError("family file ends early, expected " + expecting);
        ++number_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    }

    // "key value..." line with the given key.
    std::string field(const std::string& key)
    {
        std::string line = next(key);
        if (line.rfind(key + " ", 0) != 0) throw error("expected '" + key + "'");
        return line.substr(key.size() + 1);
    }

    ParseError error(const std::string& message) const
    {
        return ParseError("family file line " + std::to_string(number_) + ": " + message);
    }

private:
    std::istream& is_;
    std::size_t number_ = 0;
};

} // namespace

std::string transform_inline(const TransformSpec& t)
{
    std::string out;
    for (std::size_t i = 0; i < t.matrix.size(); ++i) {
        if (i) out += ';';
        for (std::size_t j = 0; j < t.matrix[i].size(); ++j) {
            if (j) out += ' ';
            out += t.matrix[i][j].str();
        }
    }
    return out;
}

TransformSpec parse_transform(std::string_view text)
{
    TransformSpec t;
    std::string normalized(text);
    for (char& c : normalized) {
        if (c == ';') c = '\n';
    }
    std::istringstream in(normalized);
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::vector<std::string> words = split_ws(line);
        if (words.empty()) continue;
        std::vector<Rational> row;
        for (const auto& w : words) row.push_back(Rational::parse(w));
        t.matrix.push_back(std::move(row));
    }
    if (t.matrix.empty()) throw ParseError("matrix is empty");
    for (const auto& row : t.matrix) {
        if (row.size() != t.matrix.size()) throw ParseError("matrix must be square");
    }
    return t;
}

TransformSpec load_transform(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open matrix file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_transform(buffer.str());
}

void write_family(std::ostream& os, const Family& family)
{
    const FamilyManifest& m = family.manifest();
    os << kMagic << '\n';
    os << "flavor " << to_string(m.flavor) << '\n';
    os << "depth " << m.depth << '\n';
    os << "points " << m.points << '\n';
    if (m.flavor == Flavor::Transformed) {
        os << "base-flavor " << to_string(m.base_flavor) << '\n';
        os << "matrix " << transform_inline(*m.transform) << '\n';
    }
    os << "sizes";
    for (std::int64_t s : m.sizes.sizes()) os << ' ' << s;
    os << '\n';
    os << "cubes " << m.domain.size() << '\n';
    os << "terms " << family.size() << '\n';
    for (const TermId& id : family.ids()) os << id.str() << '\t' << to_text(family.term(id)) << '\n';
    os << "end\n";
}

Family read_family(std::istream& is)
{
    LineReader reader(is);
    if (reader.next("header") != kMagic) throw reader.error("not a family file");
    FamilyManifest m;
    try {
        m.flavor = flavor_from_string(reader.field("flavor"));
        m.depth = static_cast<int>(to_int(reader.field("depth"), "depth"));
        m.points = static_cast<int>(to_int(reader.field("points"), "points"));
        m.base_flavor = m.flavor;
        if (m.flavor == Flavor::Transformed) {
            m.base_flavor = flavor_from_string(reader.field("base-flavor"));
            m.transform = parse_transform(reader.field("matrix"));
        }
        std::vector<std::int64_t> sizes;
        for (const auto& w : split_ws(reader.field("sizes"))) sizes.push_back(to_int(w, "size"));
        m.sizes = IndexSets(std::move(sizes));
        const std::int64_t cubes = to_int(reader.field("cubes"), "cube count");
        if (cubes < 1 || cubes > 1000) throw reader.error("bad cube count");
        m.domain = make_domain(static_cast<int>(cubes));
    } catch (const ConfigError& e) {
        throw reader.error(e.what());
    }
    if (m.depth < 1) throw reader.error("depth must be positive");

    std::vector<TermId> expected;
    try {
        const Flavor base = m.flavor == Flavor::Transformed ? m.base_flavor : m.flavor;
        ChainLayout layout(base, stage_count(base, m.points), m.sizes);
        if (layout.cube_count() != static_cast<int>(m.domain.size())) throw reader.error("cube count does not match flavor");
        expected = layout.enumerate(m.depth);
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw reader.error(e.what());
    }

    const std::int64_t count = to_int(reader.field("terms"), "term count");
    if (count != static_cast<std::int64_t>(expected.size())) {
        throw reader.error("term count " + std::to_string(count) + " does not match the manifest (" +
                           std::to_string(expected.size()) + ")");
    }
    std::map<TermId, StepFunction> terms;
    for (std::int64_t i = 0; i < count; ++i) {
        std::string line = reader.next("term line");
        auto tab = line.find('\t');
        if (tab == std::string::npos) throw reader.error("term line without tab");
        TermId id;
        StepFunction f;
        try {
            id = TermId::parse(line.substr(0, tab));
            f = step_function_from_text(std::string_view(line).substr(tab + 1));
        } catch (const ParseError& e) {
            throw reader.error(e.what());
        }
        if (id != expected[static_cast<std::size_t>(i)]) {
            throw reader.error("expected term " + expected[static_cast<std::size_t>(i)].str() + ", found " + id.str());
        }
        if (f.domain() != m.domain) throw reader.error("term " + id.str() + " lives on a different domain");
        terms.emplace(std::move(id), std::move(f));
    }
    if (reader.next("end") != "end") throw reader.error("expected 'end'");
    auto source = std::make_shared<StoredSource>(std::move(terms));
    return Family(std::move(m), std::move(expected), std::move(source));
}

void save_family(const std::filesystem::path& path, const Family& family)
{
    write_atomically(path, [&](std::ostream& os) { write_family(os, family); });
}

Family load_family(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open family file " + path.string());
    return read_family(in);
}

void write_atomically(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + tmp.string());
        try {
            writer(out);
        } catch (...) {
            out.close();
            std::filesystem::remove(tmp);
            throw;
        }
        out.flush();
        if (!out) {
            std::filesystem::remove(tmp);
            throw ConfigError("write to " + tmp.string() + " failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw ConfigError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

} // namespace sumrange
