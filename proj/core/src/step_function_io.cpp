#include "sumrange/step_function_io.hpp"

#include <json.hpp>

#include "sumrange/errors.hpp"

namespace sumrange {

using nlohmann::ordered_json;

std::string to_text(const StepFunction& f)
{
    ordered_json j;
    j["domain"] = ordered_json::array();
    for (CubeId c : f.domain()) j["domain"].push_back(c.index);
    j["terms"] = ordered_json::array();
    for (const Term& t : f.terms()) {
        ordered_json box = ordered_json::object();
        for (const auto& [coord, iv] : t.box.constraints) {
            box[std::to_string(coord)] = ordered_json::array({iv.lo.str(), iv.hi.str()});
        }
        ordered_json term;
        term["cube"] = t.box.cube.index;
        term["box"] = std::move(box);
        term["value"] = t.value.str();
        j["terms"].push_back(std::move(term));
    }
    return j.dump();
}

StepFunction step_function_from_text(std::string_view text)
{
    ordered_json j;
    try {
        j = ordered_json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("step function is not valid JSON: ") + e.what());
    }
    try {
        Domain domain;
        for (const auto& c : j.at("domain")) domain.push_back(CubeId{c.get<int>()});
        std::vector<Term> terms;
        for (const auto& t : j.at("terms")) {
            Box box{CubeId{t.at("cube").get<int>()}, {}};
            for (const auto& [key, bounds] : t.at("box").items()) {
                if (bounds.size() != 2) throw ParseError("box bounds must be [lo, hi]");
                int coord = std::stoi(key);
                box.constraints.emplace(coord, Interval(Rational::parse(bounds[0].get<std::string>()),
                                                        Rational::parse(bounds[1].get<std::string>())));
            }
            terms.push_back(Term{std::move(box), Rational::parse(t.at("value").get<std::string>())});
        }
        return StepFunction::from_terms(std::move(domain), terms);
    } catch (const ParseError&) {
        throw;
    } catch (const DomainError& e) {
        throw ParseError(std::string("invalid step function: ") + e.what());
    } catch (const std::exception& e) {
        throw ParseError(std::string("malformed step function: ") + e.what());
    }
}

} // namespace sumrange
