#include "datasets.hpp"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <cctype>
#include <filesystem>

namespace patla {

namespace {

std::vector<std::filesystem::path> list_images(const std::string& dir) {
    namespace fs = std::filesystem;
    require(fs::is_directory(dir), ErrorCode::io, "vessel source directory not found: " + dir);
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        std::string ext = e.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (ext == ".tif" || ext == ".tiff" || ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp")
            out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    require(!out.empty(), ErrorCode::io, "no readable images in " + dir);
    return out;
}

cv::Mat load_green(const std::filesystem::path& p) {
    cv::Mat img = cv::imread(p.string(), cv::IMREAD_COLOR);
    require(!img.empty(), ErrorCode::io, "cannot decode image " + p.string());
    cv::Mat green;
    cv::extractChannel(img, green, 1);  // BGR order
    cv::Mat out;
    green.convertTo(out, CV_64F, 1.0 / 255.0);
    return out;
}

}  // namespace

std::vector<Image> crop_vessel_images(const std::string& source_dir, std::size_t count, std::uint64_t seed,
                                      const VesselConfig& cfg) {
    require(cfg.out_size >= 16 && cfg.out_size % 2 == 0, ErrorCode::invalid_argument, "output size must be even and >= 16");
    const auto files = list_images(source_dir);
    std::vector<cv::Mat> sources;
    for (const auto& f : files) sources.push_back(load_green(f));

    const std::size_t n = cfg.out_size;
    std::vector<Image> out;
    out.reserve(count);
    for (std::size_t item = 0; item < count; ++item) {
        Rng rng(seed + item);
        const cv::Mat& src = sources[rng.index(sources.size())];
        const std::size_t h = static_cast<std::size_t>(src.rows), w = static_cast<std::size_t>(src.cols);
        const std::size_t hmax = std::min(h, w / 2);
        require(hmax >= 2, ErrorCode::invalid_argument, "source image too small to crop");
        const std::size_t hmin = std::min(cfg.min_crop_rows, hmax);
        const std::size_t ch = hmin + rng.index(hmax - hmin + 1);
        const std::size_t cw = 2 * ch;
        const std::size_t r0 = rng.index(h - ch + 1), c0 = rng.index(w - cw + 1);
        cv::Mat crop = src(cv::Rect(static_cast<int>(c0), static_cast<int>(r0), static_cast<int>(cw), static_cast<int>(ch)));
        cv::Mat resized;
        cv::resize(crop, resized, cv::Size(static_cast<int>(n), static_cast<int>(n / 2)), 0, 0, cv::INTER_CUBIC);
        Image top(n / 2, n);
        for (std::size_t i = 0; i < n / 2; ++i)
            for (std::size_t j = 0; j < n; ++j) top(i, j) = resized.at<double>(static_cast<int>(i), static_cast<int>(j));
        normalize_min_max(top);
        Image img(n, n);
        std::copy(top.begin(), top.end(), img.begin());
        out.push_back(std::move(img));
    }
    return out;
}

}  // namespace patla
