#include "mdetail/style/style.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "mdetail/error.hpp"
#include "mdetail/labels.hpp"

namespace mdetail::style {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, kPropertyCount> kNames{
    "facade-texture",       "roof-texture",       "facade-texture-detail", "roof-texture-detail",
    "facade-window-layout", "window-pane-layout", "window-texture",        "roof-detail-layout",
};

constexpr double kWeightTol = 1e-9;
constexpr double kTruncation = 6.0;

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

std::size_t pick_index(const std::vector<double>& weights, Rng& rng) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    const double r = uniform01(rng) * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (r < acc) return i;
    }
    return weights.size() - 1;
}

} // namespace

StyleVector::StyleVector(std::vector<double> z) : z_(std::move(z)) {
    if (z_.empty()) throw Error("StyleVector: empty");
    for (double v : z_)
        if (!std::isfinite(v)) throw Error("StyleVector: non-finite component");
}

double StyleVector::distance(const StyleVector& other) const {
    if (other.dim() != dim()) throw Error("StyleVector::distance: dimension mismatch");
    double s = 0;
    for (int i = 0; i < dim(); ++i) s += (z_[std::size_t(i)] - other[i]) * (z_[std::size_t(i)] - other[i]);
    return std::sqrt(s);
}

std::string_view property_name(Property p) { return kNames[std::size_t(p)]; }

std::optional<Property> property_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kNames.size(); ++i)
        if (kNames[i] == name) return Property(i);
    return std::nullopt;
}

void validate_property_distribution(const PropertyDistribution& dist, const std::string& path) {
    if (dist.modes.empty()) throw ValidationError(path + ".modes", "no modes");
    double total = 0;
    for (std::size_t i = 0; i < dist.modes.size(); ++i) {
        const auto& m = dist.modes[i];
        const std::string mp = path + ".modes[" + std::to_string(i) + "]";
        if (!(m.sigma >= 0.0) || !std::isfinite(m.sigma)) throw ValidationError(mp + ".sigma", "sigma must be >= 0", m.sigma);
        if (!(m.weight > 0.0) || m.weight > 1.0 + kWeightTol)
            throw ValidationError(mp + ".weight", "weight must lie in (0, 1]", m.weight);
        total += m.weight;
    }
    if (std::abs(total - 1.0) > kWeightTol) {
        std::ostringstream msg;
        msg << "mode weights sum to " << total << ", expected 1";
        throw ValidationError(path + ".modes", msg.str(), total);
    }
}

void validate_distribution(const StyleDistribution& dist) {
    bool any_weight = false, all_weight = true;
    double total = 0;
    for (std::size_t s = 0; s < dist.sets.size(); ++s) {
        const auto& set = dist.sets[s];
        const std::string sp = "sets[" + std::to_string(s) + "]";
        if (set.weight) {
            any_weight = true;
            if (!(*set.weight >= 0.0)) throw ValidationError(sp + ".weight", "set weight must be >= 0", *set.weight);
            total += *set.weight;
        } else {
            all_weight = false;
        }
        for (Property p : kAllProperties)
            if (set[p]) validate_property_distribution(*set[p], sp + ".properties." + std::string(property_name(p)));
    }
    if (any_weight && !all_weight) throw ValidationError("sets", "either all sets or none carry a weight");
    if (any_weight && std::abs(total - 1.0) > kWeightTol) {
        std::ostringstream msg;
        msg << "set weights sum to " << total << ", expected 1";
        throw ValidationError("sets", msg.str(), total);
    }
}

StyleVector sample_prior(Rng& rng, int dim) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> z(static_cast<std::size_t>(dim));
    for (double& v : z) v = std::clamp(normal(rng), -kTruncation, kTruncation);
    return StyleVector(std::move(z));
}

StyleVector sample_style(const PropertyDistribution& dist, Rng& rng) {
    if (dist.modes.empty()) throw Error("sample_style: distribution has no modes");
    std::vector<double> weights;
    for (const auto& m : dist.modes) weights.push_back(m.weight);
    const GaussianMode& mode = dist.modes[pick_index(weights, rng)];
    if (!mode.mean) throw Error("sample_style: mode mean unresolved (exemplar not encoded)");
    std::vector<double> z = mode.mean->values();
    if (mode.sigma > 0.0) {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (double& v : z) v += mode.sigma * std::clamp(normal(rng), -kTruncation, kTruncation);
    }
    return StyleVector(std::move(z));
}

BuildingStyle sample_building_styles(const std::vector<PropertySet>& sets, Rng& rng) {
    BuildingStyle out;
    const PropertySet* chosen = nullptr;
    if (!sets.empty()) {
        std::vector<double> weights;
        const bool weighted = std::all_of(sets.begin(), sets.end(), [](const PropertySet& s) { return s.weight.has_value(); });
        for (const auto& s : sets) weights.push_back(weighted ? *s.weight : 1.0);
        out.set_index = int(pick_index(weights, rng));
        chosen = &sets[std::size_t(out.set_index)];
    }
    for (Property p : kAllProperties) {
        if (chosen && (*chosen)[p])
            out[p] = sample_style(*(*chosen)[p], rng);
        else
            out[p] = sample_prior(rng);
    }
    return out;
}

StyleVector encode_exemplar(const Image& image, const StyleEncoder& encoder) {
    if (image.channels() != 3) throw Error("encode_exemplar: expected an RGB image");
    const Rgb bg = label_color(Label::background);
    const Image square = fit_square(image, encoder.resolution(), bg);
    if (square.width() != encoder.resolution() || square.height() != encoder.resolution())
        throw Error("encode_exemplar: resolution mismatch after resize");
    return encoder.encode_mean(square);
}

StyleDistribution parse_distribution(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError("$", e.what());
    }
    if (!doc.is_object() || !doc.contains("sets") || !doc["sets"].is_array())
        throw ParseError("sets", "expected an array of property sets");
    StyleDistribution dist;
    for (std::size_t s = 0; s < doc["sets"].size(); ++s) {
        const json& js = doc["sets"][s];
        const std::string sp = "sets[" + std::to_string(s) + "]";
        if (!js.is_object()) throw ParseError(sp, "expected an object");
        PropertySet set;
        if (js.contains("weight")) {
            if (!js["weight"].is_number()) throw ParseError(sp + ".weight", "expected a number");
            set.weight = js["weight"].get<double>();
        }
        if (js.contains("properties")) {
            if (!js["properties"].is_object()) throw ParseError(sp + ".properties", "expected an object");
            for (const auto& [name, jp] : js["properties"].items()) {
                const std::string pp = sp + ".properties." + name;
                const auto prop = property_from_name(name);
                if (!prop) throw ParseError(pp, "unknown property");
                if (!jp.is_object() || !jp.contains("modes") || !jp["modes"].is_array())
                    throw ParseError(pp + ".modes", "expected an array of modes");
                PropertyDistribution pd;
                pd.property = *prop;
                for (std::size_t m = 0; m < jp["modes"].size(); ++m) {
                    const json& jm = jp["modes"][m];
                    const std::string mp = pp + ".modes[" + std::to_string(m) + "]";
                    if (!jm.is_object()) throw ParseError(mp, "expected an object");
                    GaussianMode mode;
                    if (jm.contains("sigma")) {
                        if (!jm["sigma"].is_number()) throw ParseError(mp + ".sigma", "expected a number");
                        mode.sigma = jm["sigma"].get<double>();
                    }
                    if (jm.contains("weight")) {
                        if (!jm["weight"].is_number()) throw ParseError(mp + ".weight", "expected a number");
                        mode.weight = jm["weight"].get<double>();
                    }
                    if (jm.contains("exemplar")) {
                        if (!jm["exemplar"].is_string()) throw ParseError(mp + ".exemplar", "expected a string");
                        mode.exemplar = jm["exemplar"].get<std::string>();
                    }
                    if (jm.contains("mean")) {
                        if (!jm["mean"].is_array()) throw ParseError(mp + ".mean", "expected an array");
                        std::vector<double> z;
                        for (const auto& v : jm["mean"]) {
                            if (!v.is_number()) throw ParseError(mp + ".mean", "expected numbers");
                            z.push_back(v.get<double>());
                        }
                        if (z.size() != std::size_t(kStyleDim))
                            throw ParseError(mp + ".mean", "expected " + std::to_string(kStyleDim) + " components");
                        mode.mean = StyleVector(std::move(z));
                    }
                    if (!mode.mean && !mode.exemplar) throw ParseError(mp, "mode needs an exemplar or a mean");
                    pd.modes.push_back(std::move(mode));
                }
                set[*prop] = std::move(pd);
            }
        }
        dist.sets.push_back(std::move(set));
    }
    validate_distribution(dist);
    return dist;
}

std::string distribution_to_json(const StyleDistribution& dist) {
    json doc;
    doc["sets"] = json::array();
    for (const auto& set : dist.sets) {
        json js;
        if (set.weight) js["weight"] = *set.weight;
        js["properties"] = json::object();
        for (Property p : kAllProperties) {
            if (!set[p]) continue;
            json jp;
            jp["modes"] = json::array();
            for (const auto& m : set[p]->modes) {
                json jm;
                if (m.exemplar) jm["exemplar"] = *m.exemplar;
                if (m.mean) jm["mean"] = m.mean->values();
                jm["sigma"] = m.sigma;
                jm["weight"] = m.weight;
                jp["modes"].push_back(jm);
            }
            js["properties"][std::string(property_name(p))] = jp;
        }
        doc["sets"].push_back(js);
    }
    return doc.dump(2);
}

void resolve_exemplars(StyleDistribution& dist, const ExemplarResolver& resolver) {
    for (auto& set : dist.sets)
        for (Property p : kAllProperties) {
            if (!set[p]) continue;
            for (auto& m : set[p]->modes)
                if (!m.mean && m.exemplar) m.mean = resolver(p, *m.exemplar);
        }
}

} // namespace mdetail::style
