#include <patla/patla.h>

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

struct RuntimeFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check(patla_status s) {
    if (s != PATLA_OK) throw RuntimeFailure(std::string(patla_status_name(s)) + ": " + patla_last_error());
}

template <class T, void (*F)(T*)>
struct Deleter {
    void operator()(T* p) const { F(p); }
};
using OperatorPtr = std::unique_ptr<patla_operator, Deleter<patla_operator, patla_operator_free>>;
using CurveletPtr = std::unique_ptr<patla_curvelet, Deleter<patla_curvelet, patla_curvelet_free>>;
using ProjectorPtr = std::unique_ptr<patla_projector, Deleter<patla_projector, patla_projector_free>>;
using CoeffsPtr = std::unique_ptr<patla_coeffs, Deleter<patla_coeffs, patla_coeffs_free>>;
using CoronaePtr = std::unique_ptr<patla_coronae, Deleter<patla_coronae, patla_coronae_free>>;
using PyramidPtr = std::unique_ptr<patla_pyramid, Deleter<patla_pyramid, patla_pyramid_free>>;
using FistaPtr = std::unique_ptr<patla_fista_result, Deleter<patla_fista_result, patla_fista_result_free>>;
using BundlePtr = std::unique_ptr<patla_bundle, Deleter<patla_bundle, patla_bundle_free>>;

struct Array {
    std::size_t rows = 0, cols = 0;
    std::vector<double> v;
};

BundlePtr new_bundle() {
    patla_bundle* b = nullptr;
    check(patla_bundle_new(&b));
    return BundlePtr(b);
}

BundlePtr read_bundle(const std::string& path) {
    patla_bundle* b = nullptr;
    check(patla_bundle_read(path.c_str(), &b));
    return BundlePtr(b);
}

void write_bundle(const patla_bundle* b, const std::string& path) { check(patla_bundle_write(b, path.c_str())); }

Array get_array(const patla_bundle* b, const std::string& name) {
    Array a;
    check(patla_bundle_entry_info(b, name.c_str(), nullptr, nullptr, &a.rows, &a.cols));
    a.v.resize(a.rows * a.cols);
    check(patla_bundle_get_array(b, name.c_str(), a.v.data(), a.rows, a.cols));
    return a;
}

void add_array(patla_bundle* b, const std::string& name, patla_entry_kind kind, const Array& a,
               patla_dtype dtype = PATLA_F64) {
    check(patla_bundle_add_array(b, name.c_str(), kind, dtype, a.v.data(), a.rows, a.cols));
}

template <class T>
void set_attr(patla_bundle* b, const std::string& key, const T& value) {
    std::ostringstream os;
    os.precision(17);
    if constexpr (std::is_convertible_v<T, std::string>) {
        std::string s = value, q = "\"";
        for (char ch : s) {
            if (ch == '"' || ch == '\\') q += '\\';
            q += ch;
        }
        os << q << '"';
    } else if constexpr (std::is_same_v<T, bool>) {
        os << (value ? "true" : "false");
    } else {
        os << value;
    }
    check(patla_bundle_set_attribute(b, key.c_str(), os.str().c_str()));
}

// Copies an attribute of src into dst when present.
void copy_attr(const patla_bundle* src, patla_bundle* dst, const std::string& key) {
    std::size_t need = 0;
    if (patla_bundle_get_attribute(src, key.c_str(), nullptr, 0, &need) != PATLA_OK) return;
    std::string buf(need, '\0');
    check(patla_bundle_get_attribute(src, key.c_str(), buf.data(), buf.size(), &need));
    buf.resize(need - 1);
    check(patla_bundle_set_attribute(dst, key.c_str(), buf.c_str()));
}

struct Common {
    double theta_max = std::numbers::pi / 4;
    std::size_t scales = 3;
    std::size_t angles = 32;
    double tau = 2.5e-4;
    std::size_t iters = 50;
    double eta = 1e-6;
    double sigma = 0;
    std::uint64_t seed = 0;
    std::string out;
    std::string in;
    std::string entry;
    std::size_t size = 192;
    std::size_t oversample = 1;
    bool full_view = false;
    std::string interp = "quintic";
    std::string png;
};

patla_interpolation parse_interp(const std::string& s) {
    if (s == "linear") return PATLA_INTERP_LINEAR;
    if (s == "cubic") return PATLA_INTERP_CUBIC;
    return PATLA_INTERP_QUINTIC;
}

OperatorPtr make_operator(const Common& o, std::size_t rows, std::size_t cols) {
    patla_operator_config cfg;
    patla_operator_config_default(&cfg);
    cfg.n_perp = rows;
    cfg.n_s = cols;
    cfg.theta_max = o.theta_max;
    cfg.limited = o.full_view ? 0 : 1;
    cfg.oversample = o.oversample;
    cfg.interpolation = parse_interp(o.interp);
    patla_operator* op = nullptr;
    check(patla_operator_new(&cfg, &op));
    return OperatorPtr(op);
}

std::size_t data_rows(const patla_operator* op) {
    std::size_t nt = 0;
    check(patla_operator_dims(op, &nt, nullptr, nullptr, nullptr));
    return nt;
}

CurveletPtr make_curvelet(const Common& o, std::size_t rows, std::size_t cols) {
    patla_curvelet* c = nullptr;
    check(patla_curvelet_new(rows, cols, o.scales, o.angles, &c));
    return CurveletPtr(c);
}

ProjectorPtr make_projector(const patla_curvelet* sys, double theta_max) {
    patla_projector* p = nullptr;
    check(patla_projector_new(sys, theta_max, PATLA_RESTRICT_FULLY, &p));
    return ProjectorPtr(p);
}

CoronaePtr make_coronae(const Common& o, std::size_t rows, std::size_t cols) {
    patla_coronae* f = nullptr;
    check(patla_coronae_new(rows, cols, o.scales, &f));
    return CoronaePtr(f);
}

Array square(std::size_t n) { return Array{n, n, std::vector<double>(n * n)}; }

void maybe_png(const Common& o, const Array& a) {
    if (!o.png.empty()) check(patla_write_png(o.png.c_str(), a.v.data(), a.rows, a.cols));
}

void put_transform_attrs(patla_bundle* b, const Common& o) {
    set_attr(b, "theta_max", o.theta_max);
    set_attr(b, "scales", o.scales);
    set_attr(b, "angles", o.angles);
}

// ---- subcommands ----------------------------------------------------------

void run_phantom(const std::string& kind, const Common& o, std::size_t count, const std::string& source) {
    BundlePtr b = new_bundle();
    set_attr(b.get(), "generator", kind);
    set_attr(b.get(), "size", o.size);
    std::vector<Array> imgs;
    if (kind == "disks") {
        Array a = square(o.size);
        check(patla_phantom_disks(o.size, a.v.data()));
        imgs.push_back(std::move(a));
    } else if (kind == "ellipses") {
        set_attr(b.get(), "seed", o.seed);
        set_attr(b.get(), "seed_rule", "item i uses seed + i");
        for (std::size_t i = 0; i < count; ++i) {
            Array a = square(o.size);
            check(patla_phantom_ellipses(o.seed + i, o.size, o.size, a.v.data(), nullptr));
            imgs.push_back(std::move(a));
        }
    } else {
        set_attr(b.get(), "seed", o.seed);
        set_attr(b.get(), "seed_rule", "item i uses seed + i");
        set_attr(b.get(), "source", source);
        std::vector<double> all(count * o.size * o.size);
        check(patla_phantom_vessels(source.c_str(), count, o.seed, o.size, all.data()));
        for (std::size_t i = 0; i < count; ++i) {
            Array a = square(o.size);
            std::copy_n(all.begin() + static_cast<long>(i * o.size * o.size), o.size * o.size, a.v.begin());
            imgs.push_back(std::move(a));
        }
    }
    set_attr(b.get(), "count", imgs.size());
    for (std::size_t i = 0; i < imgs.size(); ++i)
        add_array(b.get(), imgs.size() == 1 ? "image" : "image/" + std::to_string(i), PATLA_KIND_IMAGE, imgs[i]);
    maybe_png(o, imgs.front());
    write_bundle(b.get(), o.out);
}

void run_forward(const Common& o) {
    BundlePtr in = read_bundle(o.in);
    const Array img = get_array(in.get(), o.entry.empty() ? "image" : o.entry);
    OperatorPtr op = make_operator(o, img.rows, img.cols);
    Array g{data_rows(op.get()), img.cols, {}};
    g.v.resize(g.rows * g.cols);
    check(patla_forward(op.get(), img.v.data(), g.v.data()));
    if (o.sigma > 0) check(patla_add_white_noise(g.v.data(), g.v.size(), o.sigma, o.seed));
    BundlePtr b = new_bundle();
    set_attr(b.get(), "theta_max", o.theta_max);
    set_attr(b.get(), "full_view", o.full_view);
    set_attr(b.get(), "oversample", o.oversample);
    set_attr(b.get(), "interpolation", o.interp);
    set_attr(b.get(), "sigma", o.sigma);
    set_attr(b.get(), "noise_seed", o.seed);
    set_attr(b.get(), "image_rows", img.rows);
    copy_attr(in.get(), b.get(), "seed");
    copy_attr(in.get(), b.get(), "generator");
    add_array(b.get(), "data", PATLA_KIND_DATA, g);
    write_bundle(b.get(), o.out);
}

std::size_t image_rows_attr(const patla_bundle* b, std::size_t fallback) {
    std::size_t need = 0;
    if (patla_bundle_get_attribute(b, "image_rows", nullptr, 0, &need) != PATLA_OK) return fallback;
    std::string buf(need, '\0');
    check(patla_bundle_get_attribute(b, "image_rows", buf.data(), buf.size(), &need));
    return std::stoul(buf);
}

void run_backward(const Common& o, bool invert) {
    BundlePtr in = read_bundle(o.in);
    const Array g = get_array(in.get(), o.entry.empty() ? "data" : o.entry);
    const std::size_t rows = image_rows_attr(in.get(), g.cols);
    OperatorPtr op = make_operator(o, rows, g.cols);
    if (data_rows(op.get()) != g.rows)
        throw RuntimeFailure("data has " + std::to_string(g.rows) + " time samples, the operator expects " +
                             std::to_string(data_rows(op.get())));
    Array img{rows, g.cols, std::vector<double>(rows * g.cols)};
    check(invert ? patla_invert(op.get(), g.v.data(), img.v.data()) : patla_adjoint(op.get(), g.v.data(), img.v.data()));
    BundlePtr b = new_bundle();
    set_attr(b.get(), "theta_max", o.theta_max);
    set_attr(b.get(), "method", invert ? "inverse" : "adjoint");
    add_array(b.get(), "image", PATLA_KIND_IMAGE, img);
    maybe_png(o, img);
    write_bundle(b.get(), o.out);
}

void run_fista(const Common& o, const std::string& trace) {
    BundlePtr in = read_bundle(o.in);
    const Array g = get_array(in.get(), o.entry.empty() ? "data" : o.entry);
    const std::size_t rows = image_rows_attr(in.get(), g.cols);
    OperatorPtr op = make_operator(o, rows, g.cols);
    CurveletPtr sys = make_curvelet(o, rows, g.cols);
    ProjectorPtr proj = make_projector(sys.get(), o.theta_max);
    patla_fista_config cfg;
    patla_fista_config_default(&cfg);
    cfg.tau = o.tau;
    cfg.max_iters = o.iters;
    cfg.eta = o.eta;
    patla_fista_result* r = nullptr;
    check(patla_fista(op.get(), proj.get(), g.v.data(), &cfg, &r));
    FistaPtr res(r);
    Array img{rows, g.cols, std::vector<double>(rows * g.cols)};
    check(patla_projector_synthesize(proj.get(), patla_fista_coeffs(res.get()), img.v.data()));
    if (!trace.empty()) check(patla_fista_write_trace(res.get(), trace.c_str()));
    BundlePtr b = new_bundle();
    put_transform_attrs(b.get(), o);
    set_attr(b.get(), "tau", o.tau);
    set_attr(b.get(), "max_iters", o.iters);
    set_attr(b.get(), "eta", o.eta);
    set_attr(b.get(), "iterations", patla_fista_iterations(res.get()));
    set_attr(b.get(), "lipschitz", patla_fista_lipschitz(res.get()));
    set_attr(b.get(), "image_rows", rows);
    set_attr(b.get(), "image_cols", g.cols);
    add_array(b.get(), "image", PATLA_KIND_IMAGE, img);
    check(patla_bundle_add_coeffs(b.get(), "coeffs", patla_fista_coeffs(res.get())));
    maybe_png(o, img);
    write_bundle(b.get(), o.out);
}

void run_curvelet(const std::string& action, const Common& o) {
    BundlePtr in = read_bundle(o.in);
    BundlePtr b = new_bundle();
    put_transform_attrs(b.get(), o);
    if (action == "reconstruct") {
        std::size_t rows = 0, cols = 0;
        std::size_t need = 0;
        for (const char* key : {"image_rows", "image_cols"}) {
            check(patla_bundle_get_attribute(in.get(), key, nullptr, 0, &need));
            std::string buf(need, '\0');
            check(patla_bundle_get_attribute(in.get(), key, buf.data(), buf.size(), &need));
            (std::string(key) == "image_rows" ? rows : cols) = std::stoul(buf);
        }
        CurveletPtr sys = make_curvelet(o, rows, cols);
        patla_coeffs* c = nullptr;
        check(patla_bundle_get_coeffs(in.get(), o.entry.empty() ? "coeffs" : o.entry.c_str(), sys.get(), &c));
        CoeffsPtr coeffs(c);
        Array img{rows, cols, std::vector<double>(rows * cols)};
        check(patla_curvelet_inverse(sys.get(), coeffs.get(), img.v.data()));
        add_array(b.get(), "image", PATLA_KIND_IMAGE, img);
        maybe_png(o, img);
        write_bundle(b.get(), o.out);
        return;
    }
    const Array img = get_array(in.get(), o.entry.empty() ? "image" : o.entry);
    CurveletPtr sys = make_curvelet(o, img.rows, img.cols);
    set_attr(b.get(), "image_rows", img.rows);
    set_attr(b.get(), "image_cols", img.cols);
    copy_attr(in.get(), b.get(), "seed");
    if (action == "decompose") {
        patla_coeffs* c = nullptr;
        check(patla_curvelet_forward(sys.get(), img.v.data(), &c));
        CoeffsPtr coeffs(c);
        check(patla_bundle_add_coeffs(b.get(), "coeffs", coeffs.get()));
    } else {
        ProjectorPtr proj = make_projector(sys.get(), o.theta_max);
        patla_coeffs *v = nullptr, *iv = nullptr;
        check(patla_projector_split(proj.get(), img.v.data(), &v, &iv));
        CoeffsPtr vis(v), inv(iv);
        check(patla_bundle_add_coeffs(b.get(), "visible", vis.get()));
        check(patla_bundle_add_coeffs(b.get(), "invisible", inv.get()));
        Array part{img.rows, img.cols, std::vector<double>(img.v.size())};
        check(patla_curvelet_inverse(sys.get(), vis.get(), part.v.data()));
        add_array(b.get(), "visible_image", PATLA_KIND_IMAGE, part);
        check(patla_curvelet_inverse(sys.get(), inv.get(), part.v.data()));
        add_array(b.get(), "invisible_image", PATLA_KIND_IMAGE, part);
    }
    write_bundle(b.get(), o.out);
}

void run_coronae(const std::string& action, const Common& o) {
    BundlePtr in = read_bundle(o.in);
    BundlePtr b = new_bundle();
    set_attr(b.get(), "theta_max", o.theta_max);
    set_attr(b.get(), "scales", o.scales);
    const std::size_t levels = o.scales - 1;
    if (action == "reconstruct") {
        const std::string prefix = o.entry.empty() ? "pyramid" : o.entry;
        patla_pyramid* p = nullptr;
        check(patla_bundle_get_pyramid(in.get(), prefix.c_str(), &p));
        PyramidPtr pyr(p);
        std::size_t rows = 0, cols = 0;
        check(patla_pyramid_band_dims(pyr.get(), patla_pyramid_levels(pyr.get()), &rows, &cols));
        CoronaePtr f = make_coronae(o, rows, cols);
        Array img{rows, cols, std::vector<double>(rows * cols)};
        check(patla_coronae_reconstruct(f.get(), pyr.get(), img.v.data()));
        add_array(b.get(), "image", PATLA_KIND_IMAGE, img);
        maybe_png(o, img);
        write_bundle(b.get(), o.out);
        return;
    }
    const Array img = get_array(in.get(), o.entry.empty() ? "image" : o.entry);
    CoronaePtr f = make_coronae(o, img.rows, img.cols);
    copy_attr(in.get(), b.get(), "seed");
    if (action == "decompose") {
        patla_pyramid* p = nullptr;
        check(patla_coronae_decompose(f.get(), img.v.data(), levels, &p));
        PyramidPtr pyr(p);
        check(patla_bundle_add_pyramid(b.get(), "pyramid", pyr.get(), PATLA_F64));
    } else {
        for (patla_channel ch : {PATLA_CHANNEL_VISIBLE, PATLA_CHANNEL_INVISIBLE}) {
            patla_pyramid* p = nullptr;
            check(patla_coronae_component(f.get(), img.v.data(), o.theta_max, ch, levels, &p));
            PyramidPtr pyr(p);
            check(patla_bundle_add_pyramid(b.get(), ch == PATLA_CHANNEL_VISIBLE ? "visible" : "invisible", pyr.get(),
                                           PATLA_F64));
        }
    }
    write_bundle(b.get(), o.out);
}

void run_metrics(const std::string& rec, const std::string& ref, const std::string& rec_entry,
                 const std::string& ref_entry, bool header) {
    BundlePtr a = read_bundle(rec), b = read_bundle(ref);
    const Array x = get_array(a.get(), rec_entry), y = get_array(b.get(), ref_entry);
    if (x.rows != y.rows || x.cols != y.cols) throw RuntimeFailure("metrics: images differ in shape");
    double m = 0, p = 0, s = 0;
    check(patla_metrics(x.v.data(), y.v.data(), x.rows, x.cols, &m, &p, &s));
    if (header) std::printf("mse,psnr,ssim\n");
    std::printf("%.17g,%.17g,%.17g\n", m, p, s);
}

void run_export(const Common& o, std::size_t count, const std::string& mode) {
    if (mode != "perfect" && mode != "l1") throw RuntimeFailure("mode must be perfect or l1");
    const std::size_t n = o.size, levels = o.scales - 1;
    CoronaePtr f = make_coronae(o, n, n);
    OperatorPtr op;
    CurveletPtr sys;
    ProjectorPtr proj;
    if (mode == "l1") {
        op = make_operator(o, n, n);
        sys = make_curvelet(o, n, n);
        proj = make_projector(sys.get(), o.theta_max);
    }
    BundlePtr inputs = new_bundle(), targets = new_bundle();
    for (patla_bundle* b : {inputs.get(), targets.get()}) {
        set_attr(b, "generator", "ellipses");
        set_attr(b, "seed", o.seed);
        set_attr(b, "seed_rule", "item i uses seed + i; noise uses seed + count + i");
        set_attr(b, "count", count);
        set_attr(b, "size", n);
        set_attr(b, "theta_max", o.theta_max);
        set_attr(b, "scales", o.scales);
        set_attr(b, "angles", o.angles);
        set_attr(b, "mode", mode);
        if (mode == "l1") {
            set_attr(b, "sigma", o.sigma);
            set_attr(b, "tau", o.tau);
            set_attr(b, "iters", o.iters);
        }
    }
    set_attr(inputs.get(), "role", "input");
    set_attr(targets.get(), "role", "target");
    double lipschitz = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const std::string item = "item" + std::to_string(i);
        Array p0 = square(n);
        check(patla_phantom_ellipses(o.seed + i, n, n, p0.v.data(), nullptr));
        add_array(targets.get(), item + "/image", PATLA_KIND_IMAGE, p0);
        for (patla_channel ch : {PATLA_CHANNEL_VISIBLE, PATLA_CHANNEL_INVISIBLE}) {
            patla_pyramid* p = nullptr;
            check(patla_coronae_component(f.get(), p0.v.data(), o.theta_max, ch, levels, &p));
            PyramidPtr pyr(p);
            const std::string name = item + (ch == PATLA_CHANNEL_VISIBLE ? "/visible" : "/invisible");
            check(patla_bundle_add_pyramid(targets.get(), name.c_str(), pyr.get(), PATLA_F32));
            if (mode == "perfect" && ch == PATLA_CHANNEL_VISIBLE)
                check(patla_bundle_add_pyramid(inputs.get(), (item + "/visible").c_str(), pyr.get(), PATLA_F32));
        }
        if (mode == "l1") {
            Array g{data_rows(op.get()), n, {}};
            g.v.resize(g.rows * n);
            check(patla_forward(op.get(), p0.v.data(), g.v.data()));
            if (o.sigma > 0) check(patla_add_white_noise(g.v.data(), g.v.size(), o.sigma, o.seed + count + i));
            patla_fista_config cfg;
            patla_fista_config_default(&cfg);
            cfg.tau = o.tau;
            cfg.max_iters = o.iters;
            cfg.eta = o.eta;
            cfg.lipschitz = lipschitz;
            patla_fista_result* r = nullptr;
            check(patla_fista(op.get(), proj.get(), g.v.data(), &cfg, &r));
            FistaPtr res(r);
            // The estimate depends only on the operator; reuse it for later items.
            if (lipschitz == 0) lipschitz = patla_fista_lipschitz(res.get()) / cfg.lipschitz_margin;
            Array rec = square(n);
            check(patla_projector_synthesize(proj.get(), patla_fista_coeffs(res.get()), rec.v.data()));
            patla_pyramid* p = nullptr;
            check(patla_coronae_decompose(f.get(), rec.v.data(), levels, &p));
            PyramidPtr pyr(p);
            check(patla_bundle_add_pyramid(inputs.get(), (item + "/visible").c_str(), pyr.get(), PATLA_F32));
        }
    }
    const std::filesystem::path dir(o.out);
    std::filesystem::create_directories(dir);
    write_bundle(inputs.get(), (dir / "inputs").string());
    write_bundle(targets.get(), (dir / "targets").string());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Limited-angle photoacoustic tomography toolkit"};
    app.require_subcommand(1);
    Common o;

    auto add_out = [&](CLI::App* c) { c->add_option("--out", o.out, "Output bundle path")->required(); };
    auto add_in = [&](CLI::App* c, const char* entry_help) {
        c->add_option("--in", o.in, "Input bundle path")->required();
        c->add_option("--entry", o.entry, entry_help);
    };
    auto add_theta = [&](CLI::App* c) {
        c->add_option("--theta-max", o.theta_max, "Sensitivity half angle in radians")
            ->check(CLI::Range(1e-6, std::numbers::pi / 2));
    };
    auto add_frame = [&](CLI::App* c) {
        c->add_option("--scales", o.scales, "Number of scales")->check(CLI::Range(2, 8));
        c->add_option("--angles", o.angles, "Wedges at the second coarsest scale")->check(CLI::Range(4, 256));
    };
    auto add_operator = [&](CLI::App* c) {
        add_theta(c);
        c->add_option("--oversample", o.oversample, "Spectral oversampling factor")->check(CLI::Range(1, 16));
        c->add_flag("--full-view", o.full_view, "Use the nearly full view operator");
        c->add_option("--interp", o.interp, "Interpolation kernel")
            ->check(CLI::IsMember({"linear", "cubic", "quintic"}));
    };
    auto add_png = [&](CLI::App* c) { c->add_option("--png", o.png, "Also write an 8-bit PNG preview (lossy)"); };

    std::size_t count = 1;
    std::string source, trace, mode = "perfect";
    std::string rec, ref, rec_entry = "image", ref_entry = "image";
    bool header = false;

    auto* phantom = app.add_subcommand("phantom", "Generate test images");
    phantom->require_subcommand(1);
    std::string phantom_kind;
    for (const char* k : {"ellipses", "disks", "vessels"}) {
        auto* s = phantom->add_subcommand(k, std::string(k) + " phantom");
        s->add_option("--size", o.size, "Image side length")->check(CLI::Range(16, 4096));
        add_out(s);
        add_png(s);
        if (std::string(k) != "disks") {
            s->add_option("--seed", o.seed, "Base seed");
            s->add_option("--count", count, "Number of images")->check(CLI::Range(1, 1000000));
        }
        if (std::string(k) == "vessels")
            s->add_option("--source", source, "Directory of source images")->required();
        s->callback([&, k] { phantom_kind = k; });
    }

    auto* forward = app.add_subcommand("forward", "Limited-angle forward map: image -> data");
    add_in(forward, "Image entry (default image)");
    add_out(forward);
    add_operator(forward);
    forward->add_option("--sigma", o.sigma, "White noise level added to the data")->check(CLI::NonNegativeNumber);
    forward->add_option("--seed", o.seed, "Noise seed");

    auto* adjoint = app.add_subcommand("adjoint", "Adjoint map: data -> image");
    auto* invert = app.add_subcommand("invert", "Direct linear inversion: data -> image");
    for (auto* c : {adjoint, invert}) {
        add_in(c, "Data entry (default data)");
        add_out(c);
        add_operator(c);
        add_png(c);
    }

    auto* recon = app.add_subcommand("recon", "Reconstruction");
    recon->require_subcommand(1);
    auto* fista = recon->add_subcommand("fista", "l1-regularized visible reconstruction");
    add_in(fista, "Data entry (default data)");
    add_out(fista);
    add_operator(fista);
    add_frame(fista);
    add_png(fista);
    fista->add_option("--tau", o.tau, "l1 weight")->check(CLI::NonNegativeNumber);
    fista->add_option("--iters", o.iters, "Maximum iterations")->check(CLI::Range(1, 1000000));
    fista->add_option("--eta", o.eta, "Relative change tolerance")->check(CLI::NonNegativeNumber);
    fista->add_option("--trace", trace, "Objective trace CSV path");

    auto* curvelet = app.add_subcommand("curvelet", "Curvelet transforms");
    curvelet->require_subcommand(1);
    std::string action;
    for (const char* a : {"decompose", "reconstruct", "split"}) {
        auto* s = curvelet->add_subcommand(a, std::string("curvelet ") + a);
        add_in(s, "Input entry or coefficient prefix");
        add_out(s);
        add_frame(s);
        add_theta(s);
        add_png(s);
        s->callback([&, a] { action = a; });
    }

    auto* coronae = app.add_subcommand("coronae", "Coronae filter bank");
    coronae->require_subcommand(1);
    for (const char* a : {"decompose", "reconstruct", "split"}) {
        auto* s = coronae->add_subcommand(a, std::string("coronae ") + a);
        add_in(s, "Input entry or pyramid prefix");
        add_out(s);
        s->add_option("--scales", o.scales, "Number of scales")->check(CLI::Range(2, 8));
        add_theta(s);
        add_png(s);
        s->callback([&, a] { action = a; });
    }

    auto* metrics = app.add_subcommand("metrics", "MSE, PSNR and SSIM of a reconstruction");
    metrics->add_option("--rec", rec, "Reconstruction bundle")->required();
    metrics->add_option("--ref", ref, "Reference bundle")->required();
    metrics->add_option("--rec-entry", rec_entry, "Reconstruction entry");
    metrics->add_option("--ref-entry", ref_entry, "Reference entry");
    metrics->add_flag("--header", header, "Print a CSV header line first");

    auto* exporter = app.add_subcommand("export-training", "Write paired input/target bundles for training");
    exporter->add_option("--count", count, "Number of ellipse images")->check(CLI::Range(1, 1000000));
    exporter->add_option("--seed", o.seed, "Base seed");
    exporter->add_option("--size", o.size, "Image side length")->check(CLI::Range(16, 4096));
    exporter->add_option("--mode", mode, "perfect (projected visible) or l1 (reconstructed visible)")
        ->check(CLI::IsMember({"perfect", "l1"}));
    double export_sigma = 2.5e-4;
    exporter->add_option("--sigma", export_sigma, "Data noise level for l1 mode")->check(CLI::NonNegativeNumber);
    exporter->add_option("--tau", o.tau, "l1 weight")->check(CLI::NonNegativeNumber);
    exporter->add_option("--iters", o.iters, "FISTA iterations")->check(CLI::Range(1, 1000000));
    exporter->add_option("--eta", o.eta, "Relative change tolerance")->check(CLI::NonNegativeNumber);
    exporter->add_option("--out", o.out, "Output directory (inputs/ and targets/ bundles)")->required();
    add_theta(exporter);
    add_frame(exporter);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (phantom->parsed())
            run_phantom(phantom_kind, o, count, source);
        else if (forward->parsed())
            run_forward(o);
        else if (adjoint->parsed())
            run_backward(o, false);
        else if (invert->parsed())
            run_backward(o, true);
        else if (fista->parsed())
            run_fista(o, trace);
        else if (curvelet->parsed())
            run_curvelet(action, o);
        else if (coronae->parsed())
            run_coronae(action, o);
        else if (metrics->parsed())
            run_metrics(rec, ref, rec_entry, ref_entry, header);
        else if (exporter->parsed()) {
            o.sigma = export_sigma;
            run_export(o, count, mode);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
