#include "curvelet.hpp"

#include "pat_fourier.hpp"
#include "spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>
#include <numbers>

namespace patla {

namespace {

constexpr double kAngleTol = 1e-12;

long pos_mod(long a, long m) {
    long r = a % m;
    return r < 0 ? r + m : r;
}

// Angular weights of the nq wedges of one quadrant at slope t in [-1, 1].
// Returns up to two (wedge, weight) pairs.
int angular_weights(double t, std::size_t nq, std::size_t idx[2], double w[2]) {
    if (nq == 1) {
        idx[0] = 0;
        w[0] = 1.0;
        return 1;
    }
    auto center = [nq](std::size_t i) { return -1.0 + (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(nq); };
    if (t <= center(0)) {
        idx[0] = 0;
        w[0] = 1.0;
        return 1;
    }
    if (t >= center(nq - 1)) {
        idx[0] = nq - 1;
        w[0] = 1.0;
        return 1;
    }
    std::size_t j = static_cast<std::size_t>(std::floor((t + 1.0) * static_cast<double>(nq) / 2.0 - 0.5)) + 1;
    j = std::clamp<std::size_t>(j, 1, nq - 1);
    while (j > 1 && t <= center(j - 1)) --j;
    while (j < nq - 1 && t > center(j)) ++j;
    const double x = (t - center(j - 1)) / (center(j) - center(j - 1));
    idx[0] = j - 1;
    w[0] = window_right(x);
    idx[1] = j;
    w[1] = window_left(x);
    return 2;
}

}  // namespace

std::size_t default_angle_count(std::size_t n_angles, std::size_t scale) {
    require(scale >= 1, ErrorCode::invalid_argument, "angle count is defined for directional scales only");
    const std::size_t e = scale / 2;  // ceil((scale - 1) / 2)
    return n_angles << e;
}

bool orientation_visible(double angle, double theta_max) {
    const double a = std::remainder(angle, 2.0 * std::numbers::pi);
    return std::abs(a) <= theta_max + kAngleTol || std::abs(std::abs(a) - std::numbers::pi) <= theta_max + kAngleTol;
}

const WedgeBlock& CurveletLayout::block(std::size_t scale, std::size_t wedge) const {
    require(scale < n_scales() && wedge < wedge_count(scale), ErrorCode::invalid_argument, "curvelet block index out of range");
    return blocks_[scale_begin_[scale] + wedge];
}

CurveletCoeffs::CurveletCoeffs(std::shared_ptr<const CurveletLayout> layout)
    : layout_(std::move(layout)), data_(layout_ ? layout_->total_size() : 0, 0.0) {}

std::span<double> CurveletCoeffs::block(std::size_t scale, std::size_t wedge) {
    const WedgeBlock& b = layout_->block(scale, wedge);
    return std::span<double>(data_).subspan(b.offset, b.rows * b.cols);
}

std::span<const double> CurveletCoeffs::block(std::size_t scale, std::size_t wedge) const {
    const WedgeBlock& b = layout_->block(scale, wedge);
    return std::span<const double>(data_).subspan(b.offset, b.rows * b.cols);
}

bool CurveletCoeffs::compatible(const CurveletCoeffs& o) const {
    if (!layout_ || !o.layout_) return false;
    if (layout_ == o.layout_) return true;
    const auto& a = layout_->blocks();
    const auto& b = o.layout_->blocks();
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].rows != b[i].rows || a[i].cols != b[i].cols || a[i].offset != b[i].offset) return false;
    return true;
}

CurveletSystem::CurveletSystem(const CurveletConfig& cfg)
    : cfg_(cfg), bands_(cfg.rows, cfg.cols, cfg.n_scales), layout_(std::make_shared<CurveletLayout>()) {
    const std::size_t n1 = cfg.rows, n2 = cfg.cols;
    require(n1 * n2 < (std::size_t{1} << 31), ErrorCode::invalid_argument, "image too large");
    if (cfg_.angles_per_scale.empty()) {
        require(cfg.n_angles >= 4 && cfg.n_angles % 4 == 0, ErrorCode::invalid_argument,
                "angle count must be a positive multiple of 4");
        for (std::size_t s = 1; s < cfg.n_scales; ++s) cfg_.angles_per_scale.push_back(default_angle_count(cfg.n_angles, s));
    }
    require(cfg_.angles_per_scale.size() == cfg.n_scales - 1, ErrorCode::invalid_argument,
            "one angle count per directional scale is required");
    for (std::size_t a : cfg_.angles_per_scale)
        require(a >= 4 && a % 4 == 0, ErrorCode::invalid_argument, "angle counts must be positive multiples of 4");

    CurveletLayout& lay = *layout_;
    lay.rows_ = n1;
    lay.cols_ = n2;

    // Coarse block: Lo_1 restricted to the smallest image holding its support.
    // Along axis 0 every spectrum is the mirror-extended one (2 * rows bins,
    // bin j at frequency j / 2 of the image DFT).
    const std::size_t s1 = 2 * n1;
    std::tie(coarse_r_, coarse_c_) = bands_.support_dims(1);
    lay.scale_begin_.push_back(0);
    lay.blocks_.push_back({0, 0, coarse_r_, coarse_c_, 0, 0.0});
    {
        const long r1 = static_cast<long>(coarse_r_) - 1;
        const long r2 = static_cast<long>(bands_.support_radius(1, 1));
        for (long j = -r1; j <= r1; ++j)
            for (long k2 = -r2; k2 <= r2; ++k2) {
                const double w = bands_.lo(1, 0.5 * static_cast<double>(j), static_cast<double>(k2));
                if (w == 0) continue;
                const std::size_t src = fft_index(j, s1) * n2 + fft_index(k2, n2);
                coarse_taps_.push_back({src, w});
                coarse_dst_.push_back(fft_index(j, 2 * coarse_r_) * coarse_c_ + fft_index(k2, coarse_c_));
            }
    }
    std::size_t offset = coarse_r_ * coarse_c_;

    // Directional wedges on the symmetric grid j in [-(rows-1), rows-1],
    // k2 in [-cols/2, cols/2]; for even cols the Nyquist column is split
    // evenly between +cols/2 and -cols/2. The mirrored Nyquist row j = -rows
    // carries no energy and is left out.
    const long h1 = static_cast<long>(n1) - 1, h2 = static_cast<long>(n2 / 2);
    const double fn1 = static_cast<double>(n1), fn2 = static_cast<double>(n2);
    auto split = [](long k, std::size_t n) { return (n % 2 == 0 && std::abs(k) * 2 == static_cast<long>(n)) ? std::numbers::sqrt2 / 2 : 1.0; };

    for (std::size_t s = 1; s < cfg.n_scales; ++s) {
        const std::size_t nang = cfg_.angles_per_scale[s - 1];
        const std::size_t nq = nang / 4;
        struct Pt {
            long k1, k2;
            double w;
        };
        // Wedges 0..nq-1: north quadrant, nq..2nq-1: east quadrant.
        std::vector<std::vector<Pt>> pts(2 * nq);
        for (long k1 = -h1; k1 <= h1; ++k1)
            for (long k2 = -h2; k2 <= h2; ++k2) {
                if (k1 == 0 && k2 == 0) continue;
                const double b = bands_.band(s, 0.5 * static_cast<double>(k1), static_cast<double>(k2));
                if (b == 0) continue;
                const double u1 = 0.5 * static_cast<double>(k1) / fn1, u2 = static_cast<double>(k2) / fn2;
                int quad;  // 0 north, 1 east, -1 south/west
                double t;
                if (std::abs(u2) <= std::abs(u1)) {
                    quad = k1 > 0 ? 0 : -1;
                    t = u2 / u1;
                } else {
                    quad = k2 > 0 ? 1 : -1;
                    t = u1 / u2;
                }
                if (quad < 0) continue;
                std::size_t idx[2];
                double aw[2];
                const int m = angular_weights(t, nq, idx, aw);
                const double phi = split(k2, n2);
                for (int i = 0; i < m; ++i) {
                    const double w = b * aw[i] * phi;
                    if (w > 0) pts[static_cast<std::size_t>(quad) * nq + idx[i]].push_back({k1, k2, w});
                }
            }

        const std::size_t first_block = lay.blocks_.size();
        lay.scale_begin_.push_back(first_block);
        std::vector<WedgeBlock> re_blocks, im_blocks;
        for (std::size_t l = 0; l < 2 * nq; ++l) {
            const bool east = l >= nq;
            const std::size_t i = east ? l - nq : l;
            const double c = -1.0 + (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(nq);
            const double angle = east ? std::atan2(1.0, c) : std::atan(c);
            ComplexWedge cw;
            cw.scale = s;
            const auto& p = pts[l];
            require(!p.empty(), ErrorCode::internal, "empty curvelet wedge");
            // radial coordinate first, angular second
            auto rad = [east](const Pt& q) { return east ? q.k2 : q.k1; };
            auto ang = [east](const Pt& q) { return east ? q.k1 : q.k2; };
            long rmin = rad(p[0]), rmax = rad(p[0]);
            std::map<long, std::pair<long, long>> span;
            for (const Pt& q : p) {
                rmin = std::min(rmin, rad(q));
                rmax = std::max(rmax, rad(q));
                auto it = span.find(rad(q));
                if (it == span.end())
                    span.emplace(rad(q), std::make_pair(ang(q), ang(q)));
                else {
                    it->second.first = std::min(it->second.first, ang(q));
                    it->second.second = std::max(it->second.second, ang(q));
                }
            }
            long width = 0;
            for (const auto& [r, ab] : span) width = std::max(width, ab.second - ab.first + 1);
            cw.rows = static_cast<std::size_t>(rmax - rmin + 1);
            cw.cols = static_cast<std::size_t>(width);
            std::vector<unsigned char> used(cw.rows * cw.cols, 0);
            for (const Pt& q : p) {
                const std::size_t dst = static_cast<std::size_t>(pos_mod(rad(q), static_cast<long>(cw.rows))) * cw.cols +
                                        static_cast<std::size_t>(pos_mod(ang(q), static_cast<long>(cw.cols)));
                require(!used[dst], ErrorCode::internal, "curvelet wrapping is not injective");
                used[dst] = 1;
                const std::size_t src = fft_index(q.k1, s1) * n2 + fft_index(q.k2, n2);
                cw.taps.push_back({static_cast<std::uint32_t>(src), static_cast<std::uint32_t>(dst), q.w});
            }
            cw.re_block = first_block + l;
            cw.im_block = first_block + l + 2 * nq;
            re_blocks.push_back({s, l, cw.rows, cw.cols, 0, angle});
            im_blocks.push_back({s, l + 2 * nq, cw.rows, cw.cols, 0, angle + std::numbers::pi});
            wedges_.push_back(std::move(cw));
        }
        for (auto* v : {&re_blocks, &im_blocks})
            for (WedgeBlock& b : *v) {
                b.offset = offset;
                offset += b.rows * b.cols;
                lay.blocks_.push_back(b);
            }
    }
    lay.scale_begin_.push_back(lay.blocks_.size());
    lay.total_ = offset;
}

std::size_t CurveletSystem::angles(std::size_t scale) const {
    require(scale < cfg_.n_scales, ErrorCode::invalid_argument, "scale out of range");
    return scale == 0 ? 1 : cfg_.angles_per_scale[scale - 1];
}

void CurveletSystem::analyze_into(const CArray& spec, CurveletCoeffs& out, const std::vector<unsigned char>* keep) const {
    const auto& blocks = layout_->blocks();
    if (!keep || (*keep)[0]) {
        CArray z(2 * coarse_r_, coarse_c_);
        for (std::size_t i = 0; i < coarse_taps_.size(); ++i)
            z[coarse_dst_[i]] = coarse_taps_[i].second * spec[coarse_taps_[i].first];
        const Image c0 = even_adjoint(z, coarse_r_);
        std::copy(c0.begin(), c0.end(), out.data().begin() + static_cast<long>(blocks[0].offset));
    }
    const double r2 = std::numbers::sqrt2;
    for (const ComplexWedge& cw : wedges_) {
        if (keep && !(*keep)[cw.re_block] && !(*keep)[cw.im_block]) continue;
        CArray z(cw.rows, cw.cols);
        for (const Tap& t : cw.taps) z[t.dst] = t.w * spec[t.src];
        fft2_inplace(z, +1, true);
        double* re = out.data().data() + blocks[cw.re_block].offset;
        double* im = out.data().data() + blocks[cw.im_block].offset;
        for (std::size_t i = 0; i < z.size(); ++i) {
            re[i] = r2 * z[i].real();
            im[i] = r2 * z[i].imag();
        }
    }
}

void CurveletSystem::synthesize_into(const CurveletCoeffs& c, CArray& spec, long only_scale) const {
    const auto& blocks = layout_->blocks();
    if (only_scale < 0 || only_scale == 0) {
        Image c0(coarse_r_, coarse_c_);
        std::copy_n(c.data().begin() + static_cast<long>(blocks[0].offset), c0.size(), c0.begin());
        const CArray z = even_spectrum(c0, coarse_r_);
        for (std::size_t i = 0; i < coarse_taps_.size(); ++i)
            spec[coarse_taps_[i].first] += coarse_taps_[i].second * z[coarse_dst_[i]];
    }
    const double r2 = std::numbers::sqrt2;
    for (const ComplexWedge& cw : wedges_) {
        if (only_scale >= 0 && static_cast<std::size_t>(only_scale) != cw.scale) continue;
        const double* re = c.data().data() + blocks[cw.re_block].offset;
        const double* im = c.data().data() + blocks[cw.im_block].offset;
        bool any = false;
        for (std::size_t i = 0; i < cw.rows * cw.cols && !any; ++i) any = re[i] != 0 || im[i] != 0;
        if (!any) continue;
        CArray z(cw.rows, cw.cols);
        for (std::size_t i = 0; i < z.size(); ++i) z[i] = cplx(r2 * re[i], r2 * im[i]);
        fft2_inplace(z, -1, true);
        for (const Tap& t : cw.taps) spec[t.src] += t.w * z[t.dst];
    }
}

CurveletCoeffs CurveletSystem::forward(const Image& img, const std::vector<unsigned char>* keep) const {
    require(img.rows() == cfg_.rows && img.cols() == cfg_.cols, ErrorCode::shape_mismatch,
            "curvelet forward: image shape does not match the system");
    require(!keep || keep->size() == layout_->blocks().size(), ErrorCode::invalid_argument,
            "curvelet forward: keep flags do not match the layout");
    const CArray spec = even_spectrum(img, cfg_.rows);
    CurveletCoeffs out(layout_);
    analyze_into(spec, out, keep);
    return out;
}

Image CurveletSystem::inverse(const CurveletCoeffs& c) const {
    require(c.layout_ptr() && c.compatible(zeros()), ErrorCode::shape_mismatch,
            "curvelet inverse: coefficients do not match the system");
    CArray spec(2 * cfg_.rows, cfg_.cols);
    synthesize_into(c, spec, -1);
    return even_adjoint(spec, cfg_.rows);
}

Image CurveletSystem::synthesize_scale(const CurveletCoeffs& c, std::size_t scale) const {
    require(c.layout_ptr() && c.compatible(zeros()), ErrorCode::shape_mismatch,
            "curvelet synthesis: coefficients do not match the system");
    require(scale < cfg_.n_scales, ErrorCode::invalid_argument, "scale out of range");
    CArray spec(2 * cfg_.rows, cfg_.cols);
    synthesize_into(c, spec, static_cast<long>(scale));
    return even_adjoint(spec, cfg_.rows);
}

Image CurveletSystem::window_energy() const {
    const std::size_t n1 = 2 * cfg_.rows, n2 = cfg_.cols;
    Image e(n1, n2);
    for (const auto& [src, w] : coarse_taps_) e[src] += w * w;
    // Each half-plane wedge also covers the reflected bins through its partner.
    for (const ComplexWedge& cw : wedges_)
        for (const Tap& t : cw.taps) {
            e[t.src] += t.w * t.w;
            const std::size_t i = t.src / n2, j = t.src % n2;
            e[((n1 - i) % n1) * n2 + (n2 - j) % n2] += t.w * t.w;
        }
    return e;
}

WedgeProjector::WedgeProjector(const CurveletSystem& sys, double theta_max, RestrictMode mode)
    : sys_(&sys), theta_(theta_max), mode_(mode) {
    require(std::isfinite(theta_max) && theta_max > 0 && theta_max <= std::numbers::pi / 2, ErrorCode::invalid_argument,
            "theta_max must lie in (0, pi/2]");
    const auto& blocks = sys.layout()->blocks();
    keep_.assign(blocks.size(), 0);
    keep_[0] = 1;
    for (std::size_t i = 1; i < blocks.size(); ++i) keep_[i] = orientation_visible(blocks[i].angle, theta_max) ? 1 : 0;
    const std::size_t g1 = 2 * sys.coarse_rows(), g2 = sys.coarse_cols();
    coarse_mask_ = Mask(g1, g2);
    const double n1 = static_cast<double>(sys.config().rows), n2 = static_cast<double>(sys.config().cols);
    for (std::size_t i = 0; i < g1; ++i)
        for (std::size_t j = 0; j < g2; ++j) {
            const double u1 = 0.5 * static_cast<double>(signed_freq(i, g1)) / n1;
            const double u2 = static_cast<double>(signed_freq(j, g2)) / n2;
            coarse_mask_(i, j) = in_ambient_cone(u1, u2, theta_max) ? 1 : 0;
        }
}

bool WedgeProjector::visible(std::size_t scale, std::size_t wedge) const {
    const auto& lay = *sys_->layout();
    require(scale < lay.n_scales() && wedge < lay.wedge_count(scale), ErrorCode::invalid_argument,
            "curvelet block index out of range");
    std::size_t idx = 0;
    for (std::size_t s = 0; s < scale; ++s) idx += lay.wedge_count(s);
    return keep_[idx + wedge] != 0;
}

std::size_t WedgeProjector::kept_count(std::size_t scale) const {
    std::size_t n = 0;
    for (std::size_t w = 0; w < sys_->layout()->wedge_count(scale); ++w) n += visible(scale, w) ? 1 : 0;
    return n;
}

void WedgeProjector::filter_coarse(CurveletCoeffs& c, bool keep_inside) const {
    auto blk = c.block(0, 0);
    Image c0(sys_->coarse_rows(), sys_->coarse_cols());
    std::copy(blk.begin(), blk.end(), c0.begin());
    CArray z = even_spectrum(c0, c0.rows());
    for (std::size_t i = 0; i < z.size(); ++i)
        if ((coarse_mask_[i] != 0) != keep_inside) z[i] = 0;
    const Image out = even_adjoint(z, c0.rows());
    std::copy(out.begin(), out.end(), blk.begin());
}

CurveletCoeffs WedgeProjector::apply(const CurveletCoeffs& c) const {
    require(c.layout_ptr() && c.compatible(sys_->zeros()), ErrorCode::shape_mismatch,
            "projector: coefficients do not match the system");
    CurveletCoeffs out = c;
    const auto& blocks = c.layout().blocks();
    for (std::size_t i = 1; i < blocks.size(); ++i)
        if (!keep_[i]) std::fill_n(out.data().begin() + static_cast<long>(blocks[i].offset), blocks[i].rows * blocks[i].cols, 0.0);
    if (mode_ == RestrictMode::fully) filter_coarse(out, true);
    return out;
}

CurveletCoeffs WedgeProjector::complement(const CurveletCoeffs& c) const {
    require(c.layout_ptr() && c.compatible(sys_->zeros()), ErrorCode::shape_mismatch,
            "projector: coefficients do not match the system");
    CurveletCoeffs out = c;
    const auto& blocks = c.layout().blocks();
    for (std::size_t i = 1; i < blocks.size(); ++i)
        if (keep_[i]) std::fill_n(out.data().begin() + static_cast<long>(blocks[i].offset), blocks[i].rows * blocks[i].cols, 0.0);
    if (mode_ == RestrictMode::fully)
        filter_coarse(out, false);
    else
        std::fill_n(out.data().begin(), blocks[0].rows * blocks[0].cols, 0.0);
    return out;
}

CurveletCoeffs WedgeProjector::analyze(const Image& img) const {
    CurveletCoeffs c = sys_->forward(img, &keep_);
    if (mode_ == RestrictMode::fully) filter_coarse(c, true);
    return c;
}

Image WedgeProjector::synthesize(const CurveletCoeffs& c) const { return sys_->inverse(apply(c)); }

std::pair<CurveletCoeffs, CurveletCoeffs> visible_invisible_split(const Image& img, const WedgeProjector& proj) {
    const CurveletCoeffs all = proj.system().forward(img);
    return {proj.apply(all), proj.complement(all)};
}

}  // namespace patla
