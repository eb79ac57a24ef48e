#include "bundle.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

namespace patla {

namespace fs = std::filesystem;

namespace {

template <class T>
void append_le(std::vector<unsigned char>& out, T v) {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    out.insert(out.end(), buf, buf + sizeof(T));
}

template <class T>
T read_le(const unsigned char* p) {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, p, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

std::string entry_file(std::size_t i) {
    std::ostringstream os;
    os << 'e' << std::setw(5) << std::setfill('0') << i << ".bin";
    return os.str();
}

std::vector<unsigned char> read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    require(static_cast<bool>(in), ErrorCode::io, "cannot open " + p.string());
    return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const fs::path& p, const void* data, std::size_t n) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::io, "cannot create " + p.string());
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    out.close();
    require(static_cast<bool>(out), ErrorCode::io, "write failed for " + p.string());
}

}  // namespace

const char* dtype_name(DType d) {
    switch (d) {
        case DType::f32: return "f32";
        case DType::f64: return "f64";
        case DType::c64: return "c64";
        case DType::c128: return "c128";
    }
    return "?";
}

const char* kind_name(EntryKind k) {
    switch (k) {
        case EntryKind::image: return "image";
        case EntryKind::coronae_pyramid: return "coronae_pyramid";
        case EntryKind::curvelet_coeffs: return "curvelet_coeffs";
        case EntryKind::data: return "data";
    }
    return "?";
}

DType parse_dtype(const std::string& s) {
    if (s == "f32") return DType::f32;
    if (s == "f64") return DType::f64;
    if (s == "c64") return DType::c64;
    if (s == "c128") return DType::c128;
    fail(ErrorCode::format, "unknown dtype '" + s + "'");
}

EntryKind parse_kind(const std::string& s) {
    if (s == "image") return EntryKind::image;
    if (s == "coronae_pyramid") return EntryKind::coronae_pyramid;
    if (s == "curvelet_coeffs") return EntryKind::curvelet_coeffs;
    if (s == "data") return EntryKind::data;
    fail(ErrorCode::format, "unknown entry kind '" + s + "'");
}

std::size_t dtype_size(DType d) {
    switch (d) {
        case DType::f32: return 4;
        case DType::f64: return 8;
        case DType::c64: return 8;
        case DType::c128: return 16;
    }
    return 0;
}

std::size_t BundleEntry::element_count() const {
    std::size_t n = 1;
    for (std::size_t s : shape) n *= s;
    return n;
}

const BundleEntry* Bundle::find(const std::string& name) const {
    for (const BundleEntry& e : entries)
        if (e.name == name) return &e;
    return nullptr;
}

void bundle_write(const std::string& path, const Bundle& b) {
    require(!path.empty(), ErrorCode::invalid_argument, "bundle path is empty");
    nlohmann::json manifest;
    manifest["format_version"] = kBundleFormatVersion;
    manifest["attributes"] = b.attributes;
    manifest["entries"] = nlohmann::json::array();
    for (std::size_t i = 0; i < b.entries.size(); ++i) {
        const BundleEntry& e = b.entries[i];
        require(!e.name.empty(), ErrorCode::invalid_argument, "bundle entry without a name");
        require(e.bytes.size() == e.element_count() * dtype_size(e.dtype), ErrorCode::shape_mismatch,
                "bundle entry '" + e.name + "': byte length does not match shape and dtype");
        for (std::size_t j = 0; j < i; ++j)
            require(b.entries[j].name != e.name, ErrorCode::invalid_argument, "duplicate bundle entry '" + e.name + "'");
        manifest["entries"].push_back({{"name", e.name},
                                       {"kind", kind_name(e.kind)},
                                       {"dtype", dtype_name(e.dtype)},
                                       {"shape", e.shape},
                                       {"file", entry_file(i)},
                                       {"metadata", e.metadata}});
    }

    const fs::path target = fs::absolute(fs::path(path));
    const fs::path parent = target.parent_path();
    std::error_code ec;
    fs::create_directories(parent, ec);
    std::random_device rd;
    const fs::path tmp = parent / (target.filename().string() + ".tmp-" + std::to_string(rd()));
    fs::create_directory(tmp, ec);
    require(!ec, ErrorCode::io, "cannot create " + tmp.string());
    try {
        for (std::size_t i = 0; i < b.entries.size(); ++i)
            write_file(tmp / entry_file(i), b.entries[i].bytes.data(), b.entries[i].bytes.size());
        const std::string text = manifest.dump(2) + "\n";
        write_file(tmp / "manifest.json", text.data(), text.size());
        if (fs::exists(target)) {
            require(fs::is_directory(target) && fs::exists(target / "manifest.json"), ErrorCode::io,
                    "refusing to replace " + target.string() + ": not a bundle");
            fs::remove_all(target);
        }
        fs::rename(tmp, target);
    } catch (...) {
        fs::remove_all(tmp, ec);
        throw;
    }
}

Bundle bundle_read(const std::string& path) {
    const fs::path dir(path);
    const fs::path mpath = dir / "manifest.json";
    require(fs::exists(mpath), ErrorCode::io, "no manifest.json in " + path);
    const auto text = read_file(mpath);
    nlohmann::json m;
    try {
        m = nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::exception& ex) {
        fail(ErrorCode::format, std::string("manifest parse failure: ") + ex.what());
    }
    Bundle b;
    try {
        require(m.at("format_version").get<int>() == kBundleFormatVersion, ErrorCode::format, "unsupported bundle format version");
        if (m.contains("attributes")) b.attributes = m.at("attributes");
        for (const auto& je : m.at("entries")) {
            BundleEntry e;
            e.name = je.at("name").get<std::string>();
            e.kind = parse_kind(je.at("kind").get<std::string>());
            e.dtype = parse_dtype(je.at("dtype").get<std::string>());
            e.shape = je.at("shape").get<std::vector<std::size_t>>();
            if (je.contains("metadata")) e.metadata = je.at("metadata");
            const std::string file = je.at("file").get<std::string>();
            require(file.find('/') == std::string::npos && file.find("..") == std::string::npos, ErrorCode::format,
                    "entry file name must be local: " + file);
            e.bytes = read_file(dir / file);
            require(e.bytes.size() == e.element_count() * dtype_size(e.dtype), ErrorCode::format,
                    "entry '" + e.name + "': file length does not match shape and dtype");
            b.entries.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& ex) {
        fail(ErrorCode::format, std::string("malformed manifest: ") + ex.what());
    }
    return b;
}

BundleEntry make_real_entry(const std::string& name, EntryKind kind, const Image& img, DType dtype) {
    require(dtype == DType::f32 || dtype == DType::f64, ErrorCode::invalid_argument, "real entries need f32 or f64");
    BundleEntry e;
    e.name = name;
    e.kind = kind;
    e.dtype = dtype;
    e.shape = {img.rows(), img.cols()};
    e.bytes.reserve(img.size() * dtype_size(dtype));
    for (double v : img) {
        if (dtype == DType::f64)
            append_le<double>(e.bytes, v);
        else
            append_le<float>(e.bytes, static_cast<float>(v));
    }
    return e;
}

BundleEntry make_complex_entry(const std::string& name, EntryKind kind, const CArray& a, DType dtype) {
    require(dtype == DType::c64 || dtype == DType::c128, ErrorCode::invalid_argument, "complex entries need c64 or c128");
    BundleEntry e;
    e.name = name;
    e.kind = kind;
    e.dtype = dtype;
    e.shape = {a.rows(), a.cols()};
    for (const cplx& v : a) {
        if (dtype == DType::c128) {
            append_le<double>(e.bytes, v.real());
            append_le<double>(e.bytes, v.imag());
        } else {
            append_le<float>(e.bytes, static_cast<float>(v.real()));
            append_le<float>(e.bytes, static_cast<float>(v.imag()));
        }
    }
    return e;
}

Image entry_to_image(const BundleEntry& e) {
    require(e.dtype == DType::f32 || e.dtype == DType::f64, ErrorCode::format, "entry '" + e.name + "' is not real");
    require(e.shape.size() == 2, ErrorCode::format, "entry '" + e.name + "' is not two-dimensional");
    Image img(e.shape[0], e.shape[1]);
    const std::size_t sz = dtype_size(e.dtype);
    for (std::size_t i = 0; i < img.size(); ++i)
        img[i] = e.dtype == DType::f64 ? read_le<double>(&e.bytes[i * sz]) : read_le<float>(&e.bytes[i * sz]);
    return img;
}

CArray entry_to_complex(const BundleEntry& e) {
    require(e.dtype == DType::c64 || e.dtype == DType::c128, ErrorCode::format, "entry '" + e.name + "' is not complex");
    require(e.shape.size() == 2, ErrorCode::format, "entry '" + e.name + "' is not two-dimensional");
    CArray a(e.shape[0], e.shape[1]);
    const std::size_t half = dtype_size(e.dtype) / 2;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const unsigned char* p = &e.bytes[i * 2 * half];
        if (e.dtype == DType::c128)
            a[i] = cplx(read_le<double>(p), read_le<double>(p + half));
        else
            a[i] = cplx(read_le<float>(p), read_le<float>(p + half));
    }
    return a;
}

void add_pyramid(Bundle& b, const std::string& prefix, const CoronaePyramid& pyr, DType dtype) {
    for (std::size_t k = 0; k < pyr.bands.size(); ++k) {
        BundleEntry e = make_real_entry(prefix + "/scale" + std::to_string(k), EntryKind::coronae_pyramid, pyr.bands[k], dtype);
        e.metadata = {{"scale", k}, {"channel", channel_name(pyr.channel)}, {"levels", pyr.levels()}};
        b.entries.push_back(std::move(e));
    }
}

CoronaePyramid get_pyramid(const Bundle& b, const std::string& prefix) {
    CoronaePyramid pyr;
    for (std::size_t k = 0;; ++k) {
        const BundleEntry* e = b.find(prefix + "/scale" + std::to_string(k));
        if (!e) break;
        require(e->kind == EntryKind::coronae_pyramid, ErrorCode::format, "entry '" + e->name + "' is not a pyramid band");
        pyr.bands.push_back(entry_to_image(*e));
        if (k == 0 && e->metadata.contains("channel")) {
            const std::string ch = e->metadata["channel"].get<std::string>();
            pyr.channel = ch == "visible" ? Channel::visible : ch == "invisible" ? Channel::invisible : Channel::plain;
        }
    }
    require(pyr.bands.size() >= 2, ErrorCode::format, "no pyramid named '" + prefix + "' in bundle");
    return pyr;
}

void add_curvelet(Bundle& b, const std::string& prefix, const CurveletCoeffs& c) {
    for (const WedgeBlock& blk : c.layout().blocks()) {
        Image img(blk.rows, blk.cols);
        std::copy_n(c.data().begin() + static_cast<long>(blk.offset), blk.rows * blk.cols, img.begin());
        BundleEntry e = make_real_entry(prefix + "/s" + std::to_string(blk.scale) + "/w" + std::to_string(blk.wedge),
                                        EntryKind::curvelet_coeffs, img);
        e.metadata = {{"scale", blk.scale}, {"wedge", blk.wedge}, {"angle", blk.angle}};
        b.entries.push_back(std::move(e));
    }
}

CurveletCoeffs get_curvelet(const Bundle& b, const std::string& prefix, const CurveletSystem& sys) {
    CurveletCoeffs c = sys.zeros();
    for (const WedgeBlock& blk : c.layout().blocks()) {
        const std::string name = prefix + "/s" + std::to_string(blk.scale) + "/w" + std::to_string(blk.wedge);
        const BundleEntry* e = b.find(name);
        require(e != nullptr, ErrorCode::format, "missing curvelet block '" + name + "'");
        const Image img = entry_to_image(*e);
        require(img.rows() == blk.rows && img.cols() == blk.cols, ErrorCode::shape_mismatch,
                "curvelet block '" + name + "' has the wrong shape for this system");
        std::copy(img.begin(), img.end(), c.data().begin() + static_cast<long>(blk.offset));
    }
    return c;
}

}  // namespace patla
