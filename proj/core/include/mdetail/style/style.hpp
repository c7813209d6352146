#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "mdetail/image.hpp"

namespace mdetail::style {

inline constexpr int kStyleDim = 8;

/// Latent style code. Dimension is fixed per network (8 for all shipped nets).
class StyleVector {
public:
    StyleVector() : z_(kStyleDim, 0.0) {}
    explicit StyleVector(std::vector<double> z);

    int dim() const noexcept { return int(z_.size()); }
    double operator[](int i) const { return z_[std::size_t(i)]; }
    double& operator[](int i) { return z_[std::size_t(i)]; }
    const std::vector<double>& values() const noexcept { return z_; }
    double distance(const StyleVector& other) const;

    friend bool operator==(const StyleVector&, const StyleVector&) = default;

private:
    std::vector<double> z_;
};

/// The eight independently styled building properties.
enum class Property : std::uint8_t {
    facade_texture,
    roof_texture,
    facade_texture_detail,
    roof_texture_detail,
    facade_window_layout,
    window_pane_layout,
    window_texture,
    roof_detail_layout,
};

inline constexpr int kPropertyCount = 8;
inline constexpr std::array kAllProperties{
    Property::facade_texture,       Property::roof_texture,       Property::facade_texture_detail,
    Property::roof_texture_detail,  Property::facade_window_layout, Property::window_pane_layout,
    Property::window_texture,       Property::roof_detail_layout,
};

std::string_view property_name(Property p);
std::optional<Property> property_from_name(std::string_view name);

struct GaussianMode {
    std::optional<StyleVector> mean;  ///< resolved mean; empty until the exemplar is encoded
    double sigma = 0.0;
    double weight = 1.0;
    std::optional<std::string> exemplar;
};

struct PropertyDistribution {
    Property property = Property::facade_texture;
    std::vector<GaussianMode> modes;
};

struct PropertySet {
    std::array<std::optional<PropertyDistribution>, kPropertyCount> properties;
    std::optional<double> weight;

    std::optional<PropertyDistribution>& operator[](Property p) { return properties[std::size_t(p)]; }
    const std::optional<PropertyDistribution>& operator[](Property p) const { return properties[std::size_t(p)]; }
};

/// A complete style distribution: one or more joint property sets.
struct StyleDistribution {
    std::vector<PropertySet> sets;
};

struct BuildingStyle {
    std::array<StyleVector, kPropertyCount> vectors;
    int set_index = -1;  ///< -1 when no set was available (pure prior)

    const StyleVector& operator[](Property p) const { return vectors[std::size_t(p)]; }
    StyleVector& operator[](Property p) { return vectors[std::size_t(p)]; }
};

using Rng = std::mt19937_64;

/// Checks mode weights (sum to 1 within 1e-9, each in (0,1]), sigmas (≥ 0),
/// and set weights; throws ValidationError naming the field path.
void validate_distribution(const StyleDistribution& dist);
void validate_property_distribution(const PropertyDistribution& dist, const std::string& path);

/// Draws from Σ φ_i N(mean_i, σ_i² I). Each component is truncated at ±6σ
/// around the chosen mode.
StyleVector sample_style(const PropertyDistribution& dist, Rng& rng);
/// Standard-normal prior draw, truncated at ±6.
StyleVector sample_prior(Rng& rng, int dim = kStyleDim);

/// Chooses one set (uniform unless all sets carry weights) and samples
/// every property independently; missing properties use the prior.
BuildingStyle sample_building_styles(const std::vector<PropertySet>& sets, Rng& rng);

/// Anything that maps an image to the mean of its style posterior.
class StyleEncoder {
public:
    virtual ~StyleEncoder() = default;
    virtual int resolution() const = 0;
    virtual StyleVector encode_mean(const Image& square_image) const = 0;
};

/// Pads the exemplar to a square with the background color, resizes it to
/// the encoder's resolution and returns the encoder mean.
StyleVector encode_exemplar(const Image& image, const StyleEncoder& encoder);

/// Distribution JSON (see README for the schema).
StyleDistribution parse_distribution(const std::string& json_text);
std::string distribution_to_json(const StyleDistribution& dist);

/// Fills every mode mean that is still empty by encoding its exemplar.
using ExemplarResolver = std::function<StyleVector(Property, const std::string& exemplar)>;
void resolve_exemplars(StyleDistribution& dist, const ExemplarResolver& resolver);

} // namespace mdetail::style
