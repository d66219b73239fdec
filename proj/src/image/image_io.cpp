// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

// jpeglib.h needs FILE and size_t declared first.
#include <jpeglib.h>

#include "abstain/core/error.hpp"
#include "abstain/image/image.hpp"

namespace abstain::image {
namespace {

Image read_png(const std::filesystem::path& path) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str())) {
    throw Error("cannot read PNG " + path.string() + ": " + img.message);
  }
  const bool color = (img.format & PNG_FORMAT_FLAG_COLOR) != 0;
  const bool alpha = (img.format & PNG_FORMAT_FLAG_ALPHA) != 0;
  img.format = color ? (alpha ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB)
                     : (alpha ? PNG_FORMAT_GA : PNG_FORMAT_GRAY);
  Image out(static_cast<int>(img.width), static_cast<int>(img.height),
            static_cast<int>(PNG_IMAGE_PIXEL_CHANNELS(img.format)));
  if (!png_image_finish_read(&img, nullptr, out.pixels().data(), 0, nullptr)) {
    png_image_free(&img);
    throw Error("cannot decode PNG " + path.string() + ": " + img.message);
  }
  return out;
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr info) {
  auto* err = reinterpret_cast<JpegErrorManager*>(info->err);
  (*info->err->format_message)(info, err->message);
  std::longjmp(err->jump, 1);
}

Image read_jpeg(const std::filesystem::path& path) {
  std::unique_ptr<FILE, int (*)(FILE*)> file(std::fopen(path.c_str(), "rb"), &std::fclose);
  if (!file) throw Error("cannot open " + path.string());

  jpeg_decompress_struct info;
  JpegErrorManager err;
  info.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  Image out;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&info);
    throw Error("cannot decode JPEG " + path.string() + ": " + err.message);
  }
  jpeg_create_decompress(&info);
  jpeg_stdio_src(&info, file.get());
  jpeg_read_header(&info, TRUE);
  if (info.jpeg_color_space != JCS_GRAYSCALE) info.out_color_space = JCS_RGB;
  jpeg_start_decompress(&info);
  out = Image(static_cast<int>(info.output_width), static_cast<int>(info.output_height),
              info.output_components);
  const std::size_t stride = static_cast<std::size_t>(out.width()) * out.channels();
  while (info.output_scanline < info.output_height) {
    JSAMPROW row = out.pixels().data() + info.output_scanline * stride;
    jpeg_read_scanlines(&info, &row, 1);
  }
  jpeg_finish_decompress(&info);
  jpeg_destroy_decompress(&info);
  return out;
}

}  // namespace

Image read_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open image " + path.string());
  unsigned char magic[8] = {};
  in.read(reinterpret_cast<char*>(magic), sizeof magic);
  if (in.gcount() >= 8 && png_sig_cmp(magic, 0, 8) == 0) return read_png(path);
  if (in.gcount() >= 3 && magic[0] == 0xFF && magic[1] == 0xD8 && magic[2] == 0xFF) {
    return read_jpeg(path);
  }
  throw Error("unsupported image format: " + path.string());
}

void write_png(const Image& image, const std::filesystem::path& path) {
  if (image.empty()) throw Error("cannot write an empty image");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width());
  img.height = static_cast<png_uint_32>(image.height());
  switch (image.channels()) {
    case 1: img.format = PNG_FORMAT_GRAY; break;
    case 2: img.format = PNG_FORMAT_GA; break;
    case 3: img.format = PNG_FORMAT_RGB; break;
    default: img.format = PNG_FORMAT_RGBA; break;
  }
  if (!png_image_write_to_file(&img, path.c_str(), 0, image.pixels().data(), 0, nullptr)) {
    throw Error("cannot write PNG " + path.string() + ": " + img.message);
  }
}

}  // namespace abstain::image
