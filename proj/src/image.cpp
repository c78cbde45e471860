#include "prism/image.hpp"

#include <filesystem>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "prism/errors.hpp"

namespace prism::image {

namespace fs = std::filesystem;

static cv::Mat load(const std::string& path) {
  cv::Mat img = cv::imread(path, cv::IMREAD_COLOR);
  if (img.empty()) throw IoError("cannot decode image: " + path);
  return img;
}

Size probe(const std::string& path) {
  cv::Mat img = load(path);
  return {img.cols, img.rows};
}

void transcode_jpeg(const std::string& src, const std::string& dst, int quality, int max_side) {
  cv::Mat img = load(src);
  if (max_side > 0 && std::max(img.cols, img.rows) > max_side) {
    double scale = static_cast<double>(max_side) / std::max(img.cols, img.rows);
    cv::Mat resized;
    cv::resize(img, resized, cv::Size(), scale, scale, cv::INTER_AREA);
    img = resized;
  }
  if (fs::path(dst).has_parent_path()) fs::create_directories(fs::path(dst).parent_path());
  if (!cv::imwrite(dst, img, {cv::IMWRITE_JPEG_QUALITY, quality})) {
    throw IoError("cannot write image: " + dst);
  }
}

void write_solid_png(const std::string& path, int width, int height, unsigned char r,
                     unsigned char g, unsigned char b) {
  cv::Mat img(height, width, CV_8UC3, cv::Scalar(b, g, r));
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  if (!cv::imwrite(path, img)) throw IoError("cannot write image: " + path);
}

void compose_quadrants(const std::vector<std::string>& tiles, const std::string& dst,
                       int tile_size, int quality) {
  if (tiles.size() > 4) throw InvalidInputError("compose_quadrants takes at most 4 tiles");
  cv::Mat canvas(tile_size * 2, tile_size * 2, CV_8UC3, cv::Scalar(0, 0, 0));
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    if (tiles[i].empty()) continue;
    cv::Mat tile = load(tiles[i]);
    cv::Mat resized;
    cv::resize(tile, resized, cv::Size(tile_size, tile_size), 0, 0, cv::INTER_AREA);
    int row = static_cast<int>(i / 2) * tile_size;
    int col = static_cast<int>(i % 2) * tile_size;
    resized.copyTo(canvas(cv::Rect(col, row, tile_size, tile_size)));
  }
  if (fs::path(dst).has_parent_path()) fs::create_directories(fs::path(dst).parent_path());
  if (!cv::imwrite(dst, canvas, {cv::IMWRITE_JPEG_QUALITY, quality})) {
    throw IoError("cannot write image: " + dst);
  }
}

}  // namespace prism::image
