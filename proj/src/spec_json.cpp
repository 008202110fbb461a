#include "bcross/spec_json.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "bcross/errors.hpp"

namespace bcross {

using nlohmann::json;

namespace {

double number(const json& obj, const char* key) {
    if (!obj.is_object() || !obj.contains(key)) throw SpecError(std::string("missing field '") + key + "'");
    const json& v = obj.at(key);
    if (!v.is_number()) throw SpecError(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

unsigned order_field(const json& obj, const char* key) {
    if (!obj.is_object() || !obj.contains(key)) throw SpecError(std::string("missing field '") + key + "'");
    const json& v = obj.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        throw SpecError(std::string("field '") + key + "' must be a non-negative integer");
    }
    return v.get<unsigned>();
}

json params_json(const BarrierSpec& spec) {
    switch (spec.family()) {
        case Family::Linear: {
            const auto& p = spec.as<params::Linear>();
            return {{"a", p.a}, {"b", p.b}};
        }
        case Family::SqrtRemaining: {
            const auto& p = spec.as<params::SqrtRemaining>();
            return {{"a", p.a}, {"b", p.b}};
        }
        case Family::LogRemaining: {
            const auto& p = spec.as<params::LogRemaining>();
            return {{"a", p.a}, {"b", p.b}};
        }
        case Family::HermiteFamily: {
            const auto& p = spec.as<params::Hermite>();
            return {{"a", p.a}, {"b", p.b}, {"n", p.n}};
        }
        case Family::TwoSidedConstant: {
            const auto& p = spec.as<params::TwoSidedConstant>();
            return {{"a", p.a}, {"b", p.b}};
        }
        case Family::TwoSidedCurved: {
            const auto& p = spec.as<params::TwoSidedCurved>();
            return {{"a", p.a}, {"b", p.b}, {"c", p.c}};
        }
        case Family::ImagesLambert: {
            const auto& p = spec.as<params::ImagesLambert>();
            return {{"a", p.a}, {"b", p.b}};
        }
        case Family::TimeInverted:
            break;
    }
    return json::object();
}

BarrierSpec build(const std::string& family_text, const json& params, double horizon, const json* base) {
    const Family family = [&] {
        try {
            return family_from_name(family_text);
        } catch (const DomainError& e) {
            throw SpecError(e.what());
        }
    }();
    if (family == Family::TimeInverted) {
        if (base == nullptr || !base->is_object()) throw SpecError("time-inverted spec needs a 'base' object");
        if (!base->contains("family") || !base->at("family").is_string()) throw SpecError("base needs a 'family' string");
        if (!base->contains("params")) throw SpecError("base needs a 'params' object");
        return BarrierSpec::time_inverted(
            build(base->at("family").get<std::string>(), base->at("params"), horizon, nullptr));
    }
    if (!params.is_object()) throw SpecError("'params' must be an object");
    const double a = number(params, "a");
    const double b = number(params, "b");
    switch (family) {
        case Family::Linear:
            return BarrierSpec::linear(a, b, horizon);
        case Family::SqrtRemaining:
            return BarrierSpec::sqrt_remaining(a, b, horizon);
        case Family::LogRemaining:
            return BarrierSpec::log_remaining(a, b, horizon);
        case Family::HermiteFamily:
            return BarrierSpec::hermite(order_field(params, "n"), a, b, horizon);
        case Family::TwoSidedConstant:
            return BarrierSpec::two_sided_constant(a, b, horizon);
        case Family::TwoSidedCurved:
            return BarrierSpec::two_sided_curved(a, b, number(params, "c"), horizon);
        case Family::ImagesLambert:
            return BarrierSpec::images_lambert(a, b, horizon);
        case Family::TimeInverted:
            break;
    }
    throw SpecError("unsupported family");
}

}  // namespace

json to_json(const BarrierSpec& spec) {
    json j;
    j["schema"] = kSpecSchemaVersion;
    j["family"] = std::string(family_name(spec.family()));
    if (spec.family() == Family::TimeInverted) {
        const BarrierSpec& base = *spec.as<params::TimeInverted>().base;
        j["base"] = {{"family", std::string(family_name(base.family()))}, {"params", params_json(base)}};
        j["params"] = json::object();
    } else {
        j["params"] = params_json(spec);
    }
    j["horizon"] = spec.horizon();
    return j;
}

BarrierSpec barrier_spec_from_json(const json& j) {
    if (!j.is_object()) throw SpecError("barrier spec must be a JSON object");
    if (!j.contains("schema")) throw SpecError("barrier spec needs a 'schema' version");
    if (!j.at("schema").is_number_integer() || j.at("schema").get<long long>() != kSpecSchemaVersion) {
        throw SpecError("unsupported barrier spec schema " + j.at("schema").dump() + " (expected " +
                        std::to_string(kSpecSchemaVersion) + ")");
    }
    if (!j.contains("family") || !j.at("family").is_string()) throw SpecError("barrier spec needs a 'family' string");
    const double horizon = number(j, "horizon");
    const json empty = json::object();
    const json& params = j.contains("params") ? j.at("params") : empty;
    const json* base = j.contains("base") ? &j.at("base") : nullptr;
    return build(j.at("family").get<std::string>(), params, horizon, base);
}

BarrierSpec barrier_spec_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open spec file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw SpecError("spec file '" + path + "' is not valid JSON: " + e.what());
    }
    return barrier_spec_from_json(j);
}

json to_json(const ImageMeasure& m) {
    json atoms = json::array();
    for (const auto& a : m.atoms()) atoms.push_back({{"location", a.location}, {"order", a.order}, {"weight", a.weight}});
    json comps = json::array();
    for (const auto& c : m.exp_components()) {
        json upper = std::isinf(c.upper) ? json(nullptr) : json(c.upper);
        comps.push_back({{"rate", c.rate}, {"lower", c.lower}, {"upper", upper}, {"weight", c.weight}});
    }
    return {{"horizon", m.horizon()}, {"atoms", atoms}, {"exp_components", comps}};
}

ImageMeasure image_measure_from_json(const json& j) {
    if (!j.is_object()) throw SpecError("image measure must be a JSON object");
    const double horizon = number(j, "horizon");
    std::vector<DiracAtom> atoms;
    std::vector<ExpComponent> comps;
    if (j.contains("atoms")) {
        if (!j.at("atoms").is_array()) throw SpecError("'atoms' must be an array");
        for (const auto& a : j.at("atoms")) {
            atoms.push_back({number(a, "location"), order_field(a, "order"), number(a, "weight")});
        }
    }
    if (j.contains("exp_components")) {
        if (!j.at("exp_components").is_array()) throw SpecError("'exp_components' must be an array");
        for (const auto& c : j.at("exp_components")) {
            double upper = std::numeric_limits<double>::infinity();
            if (c.contains("upper") && !c.at("upper").is_null()) upper = number(c, "upper");
            comps.push_back({number(c, "rate"), number(c, "lower"), upper, number(c, "weight")});
        }
    }
    return ImageMeasure(std::move(atoms), std::move(comps), horizon);
}

}  // namespace bcross
