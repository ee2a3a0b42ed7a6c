#include "chromacurve/image_io.hpp"

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include <jpeglib.h>
#include <png.h>

#include "chromacurve/error.hpp"

namespace chromacurve {
namespace {

bool is_png(std::span<const std::uint8_t> b) {
  static constexpr std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
  return b.size() >= 8 && std::memcmp(b.data(), sig, 8) == 0;
}

bool is_jpeg(std::span<const std::uint8_t> b) { return b.size() >= 3 && b[0] == 0xff && b[1] == 0xd8 && b[2] == 0xff; }

DecodedImage decode_png(std::span<const std::uint8_t> bytes) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size()))
    throw DecodeError(std::string("PNG header: ") + img.message);

  DecodedImage out;
  const bool alpha = (img.format & PNG_FORMAT_FLAG_ALPHA) != 0;
  if (alpha) out.warnings.emplace_back("alpha channel discarded");
  img.format = alpha ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB;
  const int channels = alpha ? 4 : 3;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw DecodeError("PNG data: " + msg);
  }
  const int w = static_cast<int>(img.width), h = static_cast<int>(img.height);
  std::vector<RgbPoint> px(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  for (std::size_t i = 0; i < px.size(); ++i)
    px[i] = {double(buf[i * channels]), double(buf[i * channels + 1]), double(buf[i * channels + 2])};
  out.image = RasterImage(w, h, std::move(px));
  return out;
}

struct JpegError {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_fail(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegError*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

DecodedImage decode_jpeg(std::span<const std::uint8_t> bytes) {
  jpeg_decompress_struct cinfo;
  JpegError err;
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = jpeg_fail;
  err.message[0] = '\0';
  // Only trivially destructible state lives between setjmp and longjmp; the
  // row buffer is owned by libjpeg's pool.
  std::vector<RgbPoint>* pixels = new std::vector<RgbPoint>();
  int w = 0, h = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    delete pixels;
    throw DecodeError(std::string("JPEG: ") + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  w = static_cast<int>(cinfo.output_width);
  h = static_cast<int>(cinfo.output_height);
  pixels->reserve(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  JSAMPARRAY row = (*cinfo.mem->alloc_sarray)(reinterpret_cast<j_common_ptr>(&cinfo), JPOOL_IMAGE,
                                              cinfo.output_width * 3, 1);
  while (cinfo.output_scanline < cinfo.output_height) {
    jpeg_read_scanlines(&cinfo, row, 1);
    for (int x = 0; x < w; ++x) pixels->push_back({double(row[0][3 * x]), double(row[0][3 * x + 1]), double(row[0][3 * x + 2])});
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  DecodedImage out{RasterImage(w, h, std::move(*pixels)), {}};
  delete pixels;
  return out;
}

std::vector<std::uint8_t> png_from_buffer(const std::vector<std::uint8_t>& buf, int w, int h, std::uint32_t format) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(w);
  img.height = static_cast<png_uint_32>(h);
  img.format = format;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&img, nullptr, &size, 0, buf.data(), 0, nullptr))
    throw Error(std::string("PNG encode: ") + img.message);
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&img, out.data(), &size, 0, buf.data(), 0, nullptr))
    throw Error(std::string("PNG encode: ") + img.message);
  out.resize(size);
  return out;
}

}  // namespace

DecodedImage decode_image(std::span<const std::uint8_t> bytes) {
  if (is_png(bytes)) return decode_png(bytes);
  if (is_jpeg(bytes)) return decode_jpeg(bytes);
  throw DecodeError("unrecognised image format (expected PNG or JPEG)");
}

DecodedImage decode_image_file(const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes;
  try {
    bytes = read_file(path);
  } catch (const Error& e) {
    throw DecodeError(e.what());
  }
  try {
    return decode_image(bytes);
  } catch (const DecodeError& e) {
    throw DecodeError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_png(const RasterImage& image) {
  const RasterImage q = image.quantized_to_8bit();
  std::vector<std::uint8_t> buf;
  buf.reserve(q.size() * 3);
  for (const auto& p : q.pixels())
    for (int c = 0; c < 3; ++c) buf.push_back(static_cast<std::uint8_t>(p[c]));
  return png_from_buffer(buf, q.width(), q.height(), PNG_FORMAT_RGB);
}

std::vector<std::uint8_t> encode_png(const Mask& mask) {
  std::vector<std::uint8_t> buf(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) buf[i] = mask[i] ? 255 : 0;
  return png_from_buffer(buf, mask.width(), mask.height(), PNG_FORMAT_GRAY);
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw Error("short write to " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot move " + tmp.string() + " into place: " + ec.message());
  }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace chromacurve
