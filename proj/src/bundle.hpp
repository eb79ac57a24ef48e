#pragma once

#include "array.hpp"
#include "coronae.hpp"
#include "curvelet.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace patla {

enum class DType { f32, f64, c64, c128 };
enum class EntryKind { image, coronae_pyramid, curvelet_coeffs, data };

const char* dtype_name(DType d);
const char* kind_name(EntryKind k);
DType parse_dtype(const std::string& s);
EntryKind parse_kind(const std::string& s);
std::size_t dtype_size(DType d);

// One array of a bundle: raw little-endian, row-major bytes.
struct BundleEntry {
    std::string name;
    EntryKind kind = EntryKind::image;
    DType dtype = DType::f64;
    std::vector<std::size_t> shape;
    nlohmann::json metadata = nlohmann::json::object();
    std::vector<unsigned char> bytes;

    std::size_t element_count() const;
};

// Directory holding manifest.json plus one binary file per entry.
struct Bundle {
    nlohmann::json attributes = nlohmann::json::object();
    std::vector<BundleEntry> entries;

    const BundleEntry* find(const std::string& name) const;
};

constexpr int kBundleFormatVersion = 1;

// Writes to a temporary sibling directory and renames it into place.
void bundle_write(const std::string& path, const Bundle& b);
Bundle bundle_read(const std::string& path);

BundleEntry make_real_entry(const std::string& name, EntryKind kind, const Image& img, DType dtype = DType::f64);
BundleEntry make_complex_entry(const std::string& name, EntryKind kind, const CArray& a, DType dtype = DType::c128);
// Real entries of either precision, converted to double.
Image entry_to_image(const BundleEntry& e);
CArray entry_to_complex(const BundleEntry& e);

// Pyramids: one coronae_pyramid entry per band named <prefix>/scale<k>,
// metadata {scale, channel, levels}.
void add_pyramid(Bundle& b, const std::string& prefix, const CoronaePyramid& pyr, DType dtype = DType::f64);
CoronaePyramid get_pyramid(const Bundle& b, const std::string& prefix);

// Curvelet coefficients: one curvelet_coeffs entry per block named
// <prefix>/s<scale>/w<wedge>, metadata {scale, wedge, angle}.
void add_curvelet(Bundle& b, const std::string& prefix, const CurveletCoeffs& c);
CurveletCoeffs get_curvelet(const Bundle& b, const std::string& prefix, const CurveletSystem& sys);

}  // namespace patla
