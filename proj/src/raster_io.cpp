#include "footprint/raster_io.hpp"

#include <unistd.h>

#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>

namespace footprint {
namespace {

static_assert(std::endian::native == std::endian::little,
              "binary raster formats assume a little-endian host");

constexpr std::string_view kImapMagic = "IMAP1\n";
constexpr std::string_view kPmapMagic = "PMAP1\n";

void put_u32(std::string& out, std::uint32_t v) {
  char buf[4];
  std::memcpy(buf, &v, 4);
  out.append(buf, 4);
}

class Reader {
 public:
  Reader(std::string_view bytes, const char* format) : bytes_(bytes), format_(format) {}

  void expect_magic(std::string_view magic) {
    if (bytes_.substr(0, magic.size()) != magic) {
      throw IoError(std::string(format_) + ": bad magic");
    }
    pos_ = magic.size();
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v;
    std::memcpy(&v, bytes_.data() + pos_, 4);
    pos_ += 4;
    return v;
  }
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw IoError(std::string(format_) + ": truncated data");
    }
  }
  const char* here() const { return bytes_.data() + pos_; }
  void skip(std::size_t n) { pos_ += n; }
  void expect_end() const {
    if (pos_ != bytes_.size()) {
      throw IoError(std::string(format_) + ": trailing bytes after payload");
    }
  }

 private:
  std::string_view bytes_;
  const char* format_;
  std::size_t pos_ = 0;
};

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > 0xffffffffu) throw IoError(std::string(what) + " exceeds u32 range");
  return static_cast<std::uint32_t>(v);
}

// Parses the ASCII header of a binary netpbm file (P5/P6): magic, width,
// height, maxval, with '#' comments, followed by exactly one whitespace byte.
struct NetpbmHeader {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t maxval = 0;
  std::size_t data_offset = 0;
};

NetpbmHeader parse_netpbm(std::string_view bytes, std::string_view magic) {
  if (bytes.substr(0, 2) != magic) {
    throw IoError(std::string(magic) + ": bad magic");
  }
  std::size_t pos = 2;
  auto next_number = [&]() -> std::size_t {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    if (pos >= bytes.size() || !std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      throw IoError(std::string(magic) + ": malformed header");
    }
    std::size_t value = 0;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      value = value * 10 + static_cast<std::size_t>(bytes[pos] - '0');
      if (value > (1u << 30)) throw IoError(std::string(magic) + ": header value too large");
      ++pos;
    }
    return value;
  };
  NetpbmHeader header;
  header.width = next_number();
  header.height = next_number();
  header.maxval = next_number();
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw IoError(std::string(magic) + ": malformed header");
  }
  header.data_offset = pos + 1;
  if (header.width == 0 || header.height == 0) {
    throw IoError(std::string(magic) + ": zero dimension");
  }
  if (header.maxval == 0 || header.maxval > 255) {
    throw IoError(std::string(magic) + ": only 8-bit maxval is supported");
  }
  return header;
}

}  // namespace

std::string encode_pgm(const BinaryMask& mask) {
  std::string out = "P5\n" + std::to_string(mask.width()) + " " +
                    std::to_string(mask.height()) + "\n255\n";
  out.reserve(out.size() + mask.size());
  for (const std::uint8_t v : mask.values()) out.push_back(static_cast<char>(v ? 255 : 0));
  return out;
}

BinaryMask decode_pgm(std::string_view bytes) {
  const NetpbmHeader header = parse_netpbm(bytes, "P5");
  const std::size_t n = header.width * header.height;
  if (bytes.size() - header.data_offset != n) {
    throw IoError("P5: payload size does not match dimensions");
  }
  BinaryMask mask(header.height, header.width);
  for (std::size_t i = 0; i < n; ++i) {
    mask[i] = static_cast<unsigned char>(bytes[header.data_offset + i]) > 127 ? 1 : 0;
  }
  return mask;
}

std::string encode_imap(const InstanceMap& map) {
  std::string out(kImapMagic);
  out.reserve(out.size() + 12 + 4 * map.labels.size());
  put_u32(out, checked_u32(map.height(), "height"));
  put_u32(out, checked_u32(map.width(), "width"));
  put_u32(out, map.max_label);
  for (const std::uint32_t v : map.labels.values()) put_u32(out, v);
  return out;
}

InstanceMap decode_imap(std::string_view bytes) {
  Reader in(bytes, "IMAP1");
  in.expect_magic(kImapMagic);
  const std::size_t h = in.u32();
  const std::size_t w = in.u32();
  const std::uint32_t max_label = in.u32();
  if (h == 0 || w == 0) throw IoError("IMAP1: zero dimension");
  in.need(4 * h * w);
  std::vector<std::uint32_t> labels(h * w);
  std::memcpy(labels.data(), in.here(), 4 * h * w);
  in.skip(4 * h * w);
  in.expect_end();
  for (const std::uint32_t v : labels) {
    if (v > max_label) throw IoError("IMAP1: label exceeds max_label");
  }
  return InstanceMap{Raster<std::uint32_t>(h, w, std::move(labels)), max_label};
}

std::string encode_pmap(const Planes& planes) {
  std::string out(kPmapMagic);
  out.reserve(out.size() + 12 + 4 * planes.values().size());
  put_u32(out, checked_u32(planes.channels(), "channels"));
  put_u32(out, checked_u32(planes.height(), "height"));
  put_u32(out, checked_u32(planes.width(), "width"));
  const auto values = planes.values();
  out.append(reinterpret_cast<const char*>(values.data()), 4 * values.size());
  return out;
}

Planes decode_pmap(std::string_view bytes) {
  Reader in(bytes, "PMAP1");
  in.expect_magic(kPmapMagic);
  const std::size_t c = in.u32();
  const std::size_t h = in.u32();
  const std::size_t w = in.u32();
  if (c == 0 || h == 0 || w == 0) throw IoError("PMAP1: zero dimension");
  const std::size_t n = c * h * w;
  in.need(4 * n);
  std::vector<float> data(n);
  std::memcpy(data.data(), in.here(), 4 * n);
  in.skip(4 * n);
  in.expect_end();
  return Planes(c, h, w, std::move(data));
}

std::string encode_ppm(const RgbImage& image) {
  const auto& px = image.pixels;
  std::string out = "P6\n" + std::to_string(px.width()) + " " + std::to_string(px.height()) +
                    "\n255\n";
  out.reserve(out.size() + 3 * px.size());
  for (const auto& rgb : px.values()) {
    out.append(reinterpret_cast<const char*>(rgb.data()), 3);
  }
  return out;
}

RgbImage decode_ppm(std::string_view bytes) {
  const NetpbmHeader header = parse_netpbm(bytes, "P6");
  const std::size_t n = header.width * header.height;
  if (bytes.size() - header.data_offset != 3 * n) {
    throw IoError("P6: payload size does not match dimensions");
  }
  RgbImage image{Raster<std::array<std::uint8_t, 3>>(header.height, header.width)};
  std::memcpy(image.pixels.values().data(), bytes.data() + header.data_offset, 3 * n);
  return image;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return std::move(ss).str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw IoError("error writing " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " +
                  ec.message());
  }
}

}  // namespace footprint
