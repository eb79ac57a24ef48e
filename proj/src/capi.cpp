#include "patla/patla.h"

#include "bundle.hpp"
#include "coronae.hpp"
#include "curvelet.hpp"
#include "datasets.hpp"
#include "pat_fourier.hpp"
#include "recon.hpp"
#include "spectral.hpp"

#include <opencv2/imgcodecs.hpp>

#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <string>

using namespace patla;

struct patla_operator {
    PatOperator op;
};

struct patla_curvelet {
    std::shared_ptr<CurveletSystem> sys;
};

struct patla_projector {
    std::shared_ptr<CurveletSystem> sys;
    WedgeProjector proj;
};

struct patla_coeffs {
    CurveletCoeffs c;
};

struct patla_coronae {
    CoronaeFilters f;
};

struct patla_pyramid {
    CoronaePyramid p;
};

struct patla_fista_result {
    FistaResult r;
    patla_coeffs coeffs;
};

struct patla_bundle {
    Bundle b;
};

namespace {

thread_local std::string g_last_error;

template <class F>
patla_status guarded(F&& f) {
    try {
        f();
        g_last_error.clear();
        return PATLA_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return static_cast<patla_status>(static_cast<int>(e.code()));
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return PATLA_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return PATLA_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return PATLA_ERR_INTERNAL;
    }
}

void need(const void* p, const char* what) {
    require(p != nullptr, ErrorCode::invalid_argument, std::string(what) + " must not be null");
}

Image image_in(const double* v, std::size_t rows, std::size_t cols) {
    need(v, "input array");
    return Image(rows, cols, std::vector<double>(v, v + rows * cols));
}

void image_out(const Image& img, double* out) {
    need(out, "output array");
    std::memcpy(out, img.data(), img.size() * sizeof(double));
}

CArray spectrum_in(const double* v, std::size_t rows, std::size_t cols) {
    need(v, "input spectrum");
    CArray a(rows, cols);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = cplx(v[2 * i], v[2 * i + 1]);
    return a;
}

void spectrum_out(const CArray& a, double* out) {
    need(out, "output spectrum");
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[2 * i] = a[i].real();
        out[2 * i + 1] = a[i].imag();
    }
}

DType to_dtype(patla_dtype d) {
    switch (d) {
        case PATLA_F32: return DType::f32;
        case PATLA_F64: return DType::f64;
        case PATLA_C64: return DType::c64;
        case PATLA_C128: return DType::c128;
    }
    fail(ErrorCode::invalid_argument, "unknown dtype");
}

EntryKind to_kind(patla_entry_kind k) {
    switch (k) {
        case PATLA_KIND_IMAGE: return EntryKind::image;
        case PATLA_KIND_CORONAE_PYRAMID: return EntryKind::coronae_pyramid;
        case PATLA_KIND_CURVELET_COEFFS: return EntryKind::curvelet_coeffs;
        case PATLA_KIND_DATA: return EntryKind::data;
    }
    fail(ErrorCode::invalid_argument, "unknown entry kind");
}

Channel to_channel(patla_channel c) {
    switch (c) {
        case PATLA_CHANNEL_PLAIN: return Channel::plain;
        case PATLA_CHANNEL_VISIBLE: return Channel::visible;
        case PATLA_CHANNEL_INVISIBLE: return Channel::invisible;
    }
    fail(ErrorCode::invalid_argument, "unknown channel");
}

patla_channel from_channel(Channel c) {
    switch (c) {
        case Channel::visible: return PATLA_CHANNEL_VISIBLE;
        case Channel::invisible: return PATLA_CHANNEL_INVISIBLE;
        default: return PATLA_CHANNEL_PLAIN;
    }
}

Interpolation to_interp(patla_interpolation i) {
    switch (i) {
        case PATLA_INTERP_LINEAR: return Interpolation::linear;
        case PATLA_INTERP_CUBIC: return Interpolation::cubic;
        case PATLA_INTERP_QUINTIC: return Interpolation::quintic;
    }
    fail(ErrorCode::invalid_argument, "unknown interpolation kernel");
}

const PatOperator& op_of(const patla_operator* op) {
    need(op, "operator");
    return op->op;
}

const CurveletCoeffs& coeffs_of(const patla_coeffs* c) {
    need(c, "coefficients");
    return c->c;
}

void set_out(patla_coeffs** out, CurveletCoeffs c) {
    need(out, "output handle");
    *out = new patla_coeffs{std::move(c)};
}

}  // namespace

extern "C" {

const char* patla_version(void) { return "1.0.0"; }

const char* patla_last_error(void) { return g_last_error.c_str(); }

const char* patla_status_name(patla_status s) {
    switch (s) {
        case PATLA_OK: return "ok";
        case PATLA_ERR_INVALID_ARGUMENT: return "invalid argument";
        case PATLA_ERR_SHAPE_MISMATCH: return "shape mismatch";
        case PATLA_ERR_IO: return "i/o error";
        case PATLA_ERR_FORMAT: return "format error";
        case PATLA_ERR_NUMERIC: return "numeric error";
        case PATLA_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

patla_status patla_wavefront_map(double theta, double* beta) {
    return guarded([&] {
        need(beta, "beta");
        *beta = wavefront_map(theta);
    });
}

void patla_operator_config_default(patla_operator_config* cfg) {
    if (!cfg) return;
    cfg->n_perp = 192;
    cfg->n_s = 192;
    cfg->h_x = 1e-4;
    cfg->c = 1500.0;
    cfg->n_t = 0;
    cfg->h_t = 0;
    cfg->theta_max = std::acos(-1.0) / 4;
    cfg->limited = 1;
    cfg->oversample = 1;
    cfg->interpolation = PATLA_INTERP_QUINTIC;
}

patla_status patla_operator_new(const patla_operator_config* cfg, patla_operator** out) {
    return guarded([&] {
        need(cfg, "config");
        need(out, "output handle");
        const ImageGrid g{cfg->n_perp, cfg->n_s, cfg->h_x};
        g.validate();
        DataGrid d = matched_data_grid(g, cfg->c);
        if (cfg->n_t) d.n_t = cfg->n_t;
        if (cfg->h_t > 0) d.h_t = cfg->h_t;
        OperatorOptions o;
        o.limited = cfg->limited != 0;
        o.oversample = cfg->oversample;
        o.interpolation = to_interp(cfg->interpolation);
        *out = new patla_operator{PatOperator(g, d, SensitivityWedge(cfg->theta_max), o)};
    });
}

void patla_operator_free(patla_operator* op) { delete op; }

patla_status patla_operator_dims(const patla_operator* op, size_t* n_t, size_t* n_s, size_t* image_spec_rows,
                                 size_t* data_spec_rows) {
    return guarded([&] {
        const PatOperator& o = op_of(op);
        if (n_t) *n_t = o.data_grid().n_t;
        if (n_s) *n_s = o.cols();
        if (image_spec_rows) *image_spec_rows = o.image_spec_rows();
        if (data_spec_rows) *data_spec_rows = o.data_spec_rows();
    });
}

patla_status patla_operator_max_factor(const patla_operator* op, double* factor, double* bound) {
    return guarded([&] {
        const PatOperator& o = op_of(op);
        if (factor) *factor = o.max_factor();
        if (bound) *bound = o.wedge().factor_bound();
    });
}

patla_status patla_forward(const patla_operator* op, const double* image, double* data) {
    return guarded([&] {
        const PatOperator& o = op_of(op);
        image_out(o.forward_image(image_in(image, o.image_grid().n_perp, o.cols())), data);
    });
}

patla_status patla_adjoint(const patla_operator* op, const double* data, double* image) {
    return guarded([&] {
        const PatOperator& o = op_of(op);
        image_out(o.adjoint_data(image_in(data, o.data_grid().n_t, o.cols())), image);
    });
}

patla_status patla_invert(const patla_operator* op, const double* data, double* image) {
    return guarded([&] {
        const PatOperator& o = op_of(op);
        image_out(o.invert_data(image_in(data, o.data_grid().n_t, o.cols())), image);
    });
}

patla_status patla_forward_spectrum(const patla_operator* op, const double* p0_spec, double* g_spec) {
    return guarded([&] {
        const PatOperator& o = op_of(op);
        spectrum_out(o.forward(spectrum_in(p0_spec, o.image_spec_rows(), o.cols())), g_spec);
    });
}

patla_status patla_adjoint_spectrum(const patla_operator* op, const double* g_spec, double* p0_spec) {
    return guarded([&] {
        const PatOperator& o = op_of(op);
        spectrum_out(o.adjoint(spectrum_in(g_spec, o.data_spec_rows(), o.cols())), p0_spec);
    });
}

patla_status patla_inverse_spectrum(const patla_operator* op, const double* g_spec, double* p0_spec) {
    return guarded([&] {
        const PatOperator& o = op_of(op);
        spectrum_out(o.inverse(spectrum_in(g_spec, o.data_spec_rows(), o.cols())), p0_spec);
    });
}

patla_status patla_curvelet_new(size_t rows, size_t cols, size_t n_scales, size_t n_angles, patla_curvelet** out) {
    return guarded([&] {
        need(out, "output handle");
        CurveletConfig cfg;
        cfg.rows = rows;
        cfg.cols = cols;
        cfg.n_scales = n_scales;
        cfg.n_angles = n_angles;
        *out = new patla_curvelet{std::make_shared<CurveletSystem>(cfg)};
    });
}

void patla_curvelet_free(patla_curvelet* sys) { delete sys; }

patla_status patla_curvelet_angles(const patla_curvelet* sys, size_t scale, size_t* count) {
    return guarded([&] {
        need(sys, "curvelet system");
        need(count, "count");
        *count = sys->sys->angles(scale);
    });
}

patla_status patla_curvelet_forward(const patla_curvelet* sys, const double* image, patla_coeffs** out) {
    return guarded([&] {
        need(sys, "curvelet system");
        const auto& cfg = sys->sys->config();
        set_out(out, sys->sys->forward(image_in(image, cfg.rows, cfg.cols)));
    });
}

patla_status patla_curvelet_inverse(const patla_curvelet* sys, const patla_coeffs* c, double* image) {
    return guarded([&] {
        need(sys, "curvelet system");
        image_out(sys->sys->inverse(coeffs_of(c)), image);
    });
}

patla_status patla_curvelet_synthesize_scale(const patla_curvelet* sys, const patla_coeffs* c, size_t scale,
                                             double* image) {
    return guarded([&] {
        need(sys, "curvelet system");
        image_out(sys->sys->synthesize_scale(coeffs_of(c), scale), image);
    });
}

patla_status patla_curvelet_zeros(const patla_curvelet* sys, patla_coeffs** out) {
    return guarded([&] {
        need(sys, "curvelet system");
        set_out(out, sys->sys->zeros());
    });
}

void patla_coeffs_free(patla_coeffs* c) { delete c; }

patla_status patla_coeffs_clone(const patla_coeffs* c, patla_coeffs** out) {
    return guarded([&] { set_out(out, coeffs_of(c)); });
}

size_t patla_coeffs_size(const patla_coeffs* c) { return c ? c->c.data().size() : 0; }

size_t patla_coeffs_block_count(const patla_coeffs* c) {
    return c && c->c.layout_ptr() ? c->c.layout().blocks().size() : 0;
}

patla_status patla_coeffs_block_info(const patla_coeffs* c, size_t block, size_t* scale, size_t* wedge, size_t* rows,
                                     size_t* cols, size_t* offset, double* angle) {
    return guarded([&] {
        const auto& blocks = coeffs_of(c).layout().blocks();
        require(block < blocks.size(), ErrorCode::invalid_argument, "block index out of range");
        const WedgeBlock& b = blocks[block];
        if (scale) *scale = b.scale;
        if (wedge) *wedge = b.wedge;
        if (rows) *rows = b.rows;
        if (cols) *cols = b.cols;
        if (offset) *offset = b.offset;
        if (angle) *angle = b.angle;
    });
}

double* patla_coeffs_data(patla_coeffs* c) { return c ? c->c.data().data() : nullptr; }

const double* patla_coeffs_data_const(const patla_coeffs* c) { return c ? c->c.data().data() : nullptr; }

patla_status patla_projector_new(const patla_curvelet* sys, double theta_max, patla_restrict_mode mode,
                                 patla_projector** out) {
    return guarded([&] {
        need(sys, "curvelet system");
        need(out, "output handle");
        require(mode == PATLA_RESTRICT_WEDGE_ONLY || mode == PATLA_RESTRICT_FULLY, ErrorCode::invalid_argument,
                "unknown restriction mode");
        const RestrictMode m = mode == PATLA_RESTRICT_FULLY ? RestrictMode::fully : RestrictMode::wedge_only;
        *out = new patla_projector{sys->sys, WedgeProjector(*sys->sys, theta_max, m)};
    });
}

void patla_projector_free(patla_projector* p) { delete p; }

patla_status patla_projector_kept(const patla_projector* p, size_t scale, size_t* kept) {
    return guarded([&] {
        need(p, "projector");
        need(kept, "kept");
        require(scale < p->sys->n_scales(), ErrorCode::invalid_argument, "scale out of range");
        *kept = p->proj.kept_count(scale);
    });
}

patla_status patla_projector_apply(const patla_projector* p, const patla_coeffs* c, patla_coeffs** out) {
    return guarded([&] {
        need(p, "projector");
        set_out(out, p->proj.apply(coeffs_of(c)));
    });
}

patla_status patla_projector_complement(const patla_projector* p, const patla_coeffs* c, patla_coeffs** out) {
    return guarded([&] {
        need(p, "projector");
        set_out(out, p->proj.complement(coeffs_of(c)));
    });
}

patla_status patla_projector_split(const patla_projector* p, const double* image, patla_coeffs** visible,
                                   patla_coeffs** invisible) {
    return guarded([&] {
        need(p, "projector");
        need(visible, "output handle");
        need(invisible, "output handle");
        const auto& cfg = p->sys->config();
        auto [v, iv] = visible_invisible_split(image_in(image, cfg.rows, cfg.cols), p->proj);
        auto* a = new patla_coeffs{std::move(v)};
        auto* b = new (std::nothrow) patla_coeffs{std::move(iv)};
        if (!b) {
            delete a;
            throw std::bad_alloc();
        }
        *visible = a;
        *invisible = b;
    });
}

patla_status patla_projector_synthesize(const patla_projector* p, const patla_coeffs* c, double* image) {
    return guarded([&] {
        need(p, "projector");
        image_out(p->proj.synthesize(coeffs_of(c)), image);
    });
}

patla_status patla_coronae_new(size_t rows, size_t cols, size_t n_scales, patla_coronae** out) {
    return guarded([&] {
        need(out, "output handle");
        *out = new patla_coronae{CoronaeFilters(rows, cols, n_scales)};
    });
}

void patla_coronae_free(patla_coronae* f) { delete f; }

patla_status patla_coronae_dims(const patla_coronae* f, size_t levels, size_t* rows, size_t* cols) {
    return guarded([&] {
        need(f, "coronae filters");
        need(rows, "rows");
        need(cols, "cols");
        const auto d = f->f.pyramid_dims(levels);
        for (std::size_t i = 0; i < d.size(); ++i) {
            rows[i] = d[i].first;
            cols[i] = d[i].second;
        }
    });
}

size_t patla_coronae_size_formula(size_t n_finest, size_t depth) {
    if (depth == 0) return 0;
    return coronae_size_formula(n_finest, depth);
}

patla_status patla_coronae_decompose(const patla_coronae* f, const double* image, size_t levels, patla_pyramid** out) {
    return guarded([&] {
        need(f, "coronae filters");
        need(out, "output handle");
        *out = new patla_pyramid{coronae_decompose(image_in(image, f->f.rows(), f->f.cols()), f->f, levels)};
    });
}

patla_status patla_coronae_component(const patla_coronae* f, const double* image, double theta_max,
                                     patla_channel which, size_t levels, patla_pyramid** out) {
    return guarded([&] {
        need(f, "coronae filters");
        need(out, "output handle");
        *out = new patla_pyramid{coronae_of_component(image_in(image, f->f.rows(), f->f.cols()), f->f, theta_max,
                                                      to_channel(which), levels)};
    });
}

patla_status patla_coronae_reconstruct(const patla_coronae* f, const patla_pyramid* p, double* image) {
    return guarded([&] {
        need(f, "coronae filters");
        need(p, "pyramid");
        image_out(coronae_reconstruct(p->p, f->f), image);
    });
}

patla_status patla_pyramid_new(size_t levels, const size_t* rows, const size_t* cols, patla_channel channel,
                               patla_pyramid** out) {
    return guarded([&] {
        need(rows, "rows");
        need(cols, "cols");
        need(out, "output handle");
        CoronaePyramid p;
        p.channel = to_channel(channel);
        for (std::size_t i = 0; i <= levels; ++i) p.bands.emplace_back(rows[i], cols[i]);
        *out = new patla_pyramid{std::move(p)};
    });
}

void patla_pyramid_free(patla_pyramid* p) { delete p; }

size_t patla_pyramid_levels(const patla_pyramid* p) { return p ? p->p.levels() : 0; }

patla_channel patla_pyramid_channel(const patla_pyramid* p) {
    return p ? from_channel(p->p.channel) : PATLA_CHANNEL_PLAIN;
}

patla_status patla_pyramid_band_dims(const patla_pyramid* p, size_t band, size_t* rows, size_t* cols) {
    return guarded([&] {
        need(p, "pyramid");
        require(band < p->p.bands.size(), ErrorCode::invalid_argument, "band index out of range");
        if (rows) *rows = p->p.bands[band].rows();
        if (cols) *cols = p->p.bands[band].cols();
    });
}

double* patla_pyramid_band(patla_pyramid* p, size_t band) {
    return p && band < p->p.bands.size() ? p->p.bands[band].data() : nullptr;
}

const double* patla_pyramid_band_const(const patla_pyramid* p, size_t band) {
    return p && band < p->p.bands.size() ? p->p.bands[band].data() : nullptr;
}

void patla_fista_config_default(patla_fista_config* cfg) {
    if (!cfg) return;
    const FistaConfig d;
    cfg->tau = d.tau;
    cfg->max_iters = d.max_iters;
    cfg->eta = d.eta;
    cfg->lipschitz = d.lipschitz;
    cfg->lipschitz_margin = d.lipschitz_margin;
    cfg->power_iters = d.power_iters;
    cfg->seed = d.seed;
}

patla_status patla_fista(const patla_operator* op, const patla_projector* p, const double* data,
                         const patla_fista_config* cfg, patla_fista_result** out) {
    return guarded([&] {
        const PatOperator& o = op_of(op);
        need(p, "projector");
        need(cfg, "config");
        need(out, "output handle");
        require(p->sys->config().rows == o.image_grid().n_perp && p->sys->config().cols == o.cols(),
                ErrorCode::shape_mismatch, "curvelet system and operator grids differ");
        FistaConfig fc;
        fc.tau = cfg->tau;
        fc.max_iters = cfg->max_iters;
        fc.eta = cfg->eta;
        fc.lipschitz = cfg->lipschitz;
        fc.lipschitz_margin = cfg->lipschitz_margin;
        fc.power_iters = cfg->power_iters;
        fc.seed = cfg->seed;
        const VisibleProblem prob(o, p->proj);
        const CArray g = o.data_spectrum(image_in(data, o.data_grid().n_t, o.cols()));
        FistaResult r = fista_vr(prob, g, fc);
        patla_coeffs c{std::move(r.coeffs)};
        *out = new patla_fista_result{std::move(r), std::move(c)};
    });
}

void patla_fista_result_free(patla_fista_result* r) { delete r; }

const patla_coeffs* patla_fista_coeffs(const patla_fista_result* r) {
    return r ? &r->coeffs : nullptr;
}

double patla_fista_lipschitz(const patla_fista_result* r) { return r ? r->r.lipschitz : 0.0; }

size_t patla_fista_iterations(const patla_fista_result* r) { return r ? r->r.iterations : 0; }

size_t patla_fista_trace_length(const patla_fista_result* r) { return r ? r->r.trace.size() : 0; }

patla_status patla_fista_trace_row(const patla_fista_result* r, size_t row, double* fidelity, double* penalty,
                                   double* total) {
    return guarded([&] {
        need(r, "result");
        require(row < r->r.trace.size(), ErrorCode::invalid_argument, "trace row out of range");
        const TraceRow& t = r->r.trace[row];
        if (fidelity) *fidelity = t.fidelity;
        if (penalty) *penalty = t.penalty;
        if (total) *total = t.total;
    });
}

patla_status patla_fista_write_trace(const patla_fista_result* r, const char* path) {
    return guarded([&] {
        need(r, "result");
        need(path, "path");
        std::ofstream os(path, std::ios::binary);
        require(static_cast<bool>(os), ErrorCode::io, std::string("cannot open ") + path);
        write_trace_csv(os, r->r.trace);
        require(static_cast<bool>(os), ErrorCode::io, std::string("write failed: ") + path);
    });
}

patla_status patla_phantom_ellipses(uint64_t seed, size_t rows, size_t cols, double* image, size_t* ellipse_count) {
    return guarded([&] {
        const EllipseImage e = gen_ellipse_image(seed, rows, cols);
        image_out(e.image, image);
        if (ellipse_count) *ellipse_count = e.ellipses.size();
    });
}

patla_status patla_phantom_disks(size_t n, double* image) {
    return guarded([&] { image_out(gen_disks_phantom(n), image); });
}

patla_status patla_phantom_vessels(const char* source_dir, size_t count, uint64_t seed, size_t n, double* images) {
    return guarded([&] {
        need(source_dir, "source directory");
        need(images, "output array");
        VesselConfig cfg;
        cfg.out_size = n;
        const auto v = crop_vessel_images(source_dir, count, seed, cfg);
        for (std::size_t i = 0; i < v.size(); ++i) image_out(v[i], images + i * n * n);
    });
}

patla_status patla_add_white_noise(double* values, size_t count, double sigma, uint64_t seed) {
    return guarded([&] {
        need(values, "values");
        const Image noisy = add_white_noise(image_in(values, 1, count), sigma, seed);
        image_out(noisy, values);
    });
}

patla_status patla_metrics(const double* rec, const double* ref, size_t rows, size_t cols, double* mse_out,
                           double* psnr_out, double* ssim_out) {
    return guarded([&] {
        const Metrics m = compute_metrics(image_in(rec, rows, cols), image_in(ref, rows, cols));
        if (mse_out) *mse_out = m.mse;
        if (psnr_out) *psnr_out = m.psnr;
        if (ssim_out) *ssim_out = m.ssim;
    });
}

patla_status patla_write_png(const char* path, const double* image, size_t rows, size_t cols) {
    return guarded([&] {
        need(path, "path");
        Image img = image_in(image, rows, cols);
        normalize_min_max(img);
        cv::Mat m(static_cast<int>(rows), static_cast<int>(cols), CV_8UC1);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j)
                m.at<unsigned char>(static_cast<int>(i), static_cast<int>(j)) =
                    static_cast<unsigned char>(std::lround(255.0 * img(i, j)));
        require(cv::imwrite(path, m), ErrorCode::io, std::string("cannot write ") + path);
    });
}

patla_status patla_bundle_new(patla_bundle** out) {
    return guarded([&] {
        need(out, "output handle");
        *out = new patla_bundle{};
    });
}

patla_status patla_bundle_read(const char* path, patla_bundle** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "output handle");
        *out = new patla_bundle{bundle_read(path)};
    });
}

patla_status patla_bundle_write(const patla_bundle* b, const char* path) {
    return guarded([&] {
        need(b, "bundle");
        need(path, "path");
        bundle_write(path, b->b);
    });
}

void patla_bundle_free(patla_bundle* b) { delete b; }

patla_status patla_bundle_set_attribute(patla_bundle* b, const char* key, const char* json_value) {
    return guarded([&] {
        need(b, "bundle");
        need(key, "key");
        need(json_value, "value");
        nlohmann::json v;
        try {
            v = nlohmann::json::parse(json_value);
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorCode::format, std::string("attribute value is not JSON: ") + e.what());
        }
        b->b.attributes[key] = std::move(v);
    });
}

patla_status patla_bundle_get_attribute(const patla_bundle* b, const char* key, char* buf, size_t size,
                                        size_t* needed) {
    return guarded([&] {
        need(b, "bundle");
        need(key, "key");
        const auto it = b->b.attributes.find(key);
        require(it != b->b.attributes.end(), ErrorCode::invalid_argument, std::string("no attribute ") + key);
        const std::string s = it->dump();
        if (needed) *needed = s.size() + 1;
        if (buf && size > 0) {
            const std::size_t n = std::min(size - 1, s.size());
            std::memcpy(buf, s.data(), n);
            buf[n] = '\0';
        }
    });
}

size_t patla_bundle_entry_count(const patla_bundle* b) { return b ? b->b.entries.size() : 0; }

const char* patla_bundle_entry_name(const patla_bundle* b, size_t index) {
    return b && index < b->b.entries.size() ? b->b.entries[index].name.c_str() : nullptr;
}

patla_status patla_bundle_entry_info(const patla_bundle* b, const char* name, patla_entry_kind* kind,
                                     patla_dtype* dtype, size_t* rows, size_t* cols) {
    return guarded([&] {
        need(b, "bundle");
        need(name, "name");
        const BundleEntry* e = b->b.find(name);
        require(e != nullptr, ErrorCode::invalid_argument, std::string("no entry ") + name);
        if (kind) *kind = static_cast<patla_entry_kind>(static_cast<int>(e->kind));
        if (dtype) *dtype = static_cast<patla_dtype>(static_cast<int>(e->dtype));
        if (rows) *rows = e->shape.size() >= 1 ? e->shape[0] : 1;
        if (cols) *cols = e->shape.size() >= 2 ? e->shape[1] : 1;
    });
}

patla_status patla_bundle_add_array(patla_bundle* b, const char* name, patla_entry_kind kind, patla_dtype dtype,
                                    const double* values, size_t rows, size_t cols) {
    return guarded([&] {
        need(b, "bundle");
        need(name, "name");
        const DType d = to_dtype(dtype);
        require(d == DType::f32 || d == DType::f64, ErrorCode::invalid_argument, "real arrays need f32 or f64");
        require(b->b.find(name) == nullptr, ErrorCode::invalid_argument, std::string("duplicate entry ") + name);
        b->b.entries.push_back(make_real_entry(name, to_kind(kind), image_in(values, rows, cols), d));
    });
}

patla_status patla_bundle_get_array(const patla_bundle* b, const char* name, double* values, size_t rows,
                                    size_t cols) {
    return guarded([&] {
        need(b, "bundle");
        need(name, "name");
        const BundleEntry* e = b->b.find(name);
        require(e != nullptr, ErrorCode::invalid_argument, std::string("no entry ") + name);
        const Image img = entry_to_image(*e);
        require(img.rows() == rows && img.cols() == cols, ErrorCode::shape_mismatch,
                std::string("entry ") + name + " has shape " + std::to_string(img.rows()) + "x" +
                    std::to_string(img.cols()));
        image_out(img, values);
    });
}

patla_status patla_bundle_add_pyramid(patla_bundle* b, const char* prefix, const patla_pyramid* p, patla_dtype dtype) {
    return guarded([&] {
        need(b, "bundle");
        need(prefix, "prefix");
        need(p, "pyramid");
        add_pyramid(b->b, prefix, p->p, to_dtype(dtype));
    });
}

patla_status patla_bundle_get_pyramid(const patla_bundle* b, const char* prefix, patla_pyramid** out) {
    return guarded([&] {
        need(b, "bundle");
        need(prefix, "prefix");
        need(out, "output handle");
        *out = new patla_pyramid{get_pyramid(b->b, prefix)};
    });
}

patla_status patla_bundle_add_coeffs(patla_bundle* b, const char* prefix, const patla_coeffs* c) {
    return guarded([&] {
        need(b, "bundle");
        need(prefix, "prefix");
        add_curvelet(b->b, prefix, coeffs_of(c));
    });
}

patla_status patla_bundle_get_coeffs(const patla_bundle* b, const char* prefix, const patla_curvelet* sys,
                                     patla_coeffs** out) {
    return guarded([&] {
        need(b, "bundle");
        need(prefix, "prefix");
        need(sys, "curvelet system");
        set_out(out, get_curvelet(b->b, prefix, *sys->sys));
    });
}

}  // extern "C"
