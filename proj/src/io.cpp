#include "esrb/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "esrb/metrics.hpp"

namespace esrb {

ParseError::ParseError(const std::string& what, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

ParseError::ParseError(const std::string& context, const ParseError& inner)
    : std::runtime_error(context + ": " + inner.what()), line_(inner.line()) {}

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename Int>
Int parse_int(std::string_view tok, int line, const char* field) {
  Int v{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(std::string("invalid ") + field + " '" + std::string(tok) + "'", line);
  }
  return v;
}

std::int64_t to_us(double t) { return std::llround(t * 1e6); }
double from_us(std::int64_t us) { return static_cast<double>(us) / 1e6; }

}  // namespace

// --- events -----------------------------------------------------------------

EventStream read_events(std::istream& in) {
  std::string line;
  int lineno = 0;
  std::vector<std::string_view> tok;

  auto next_content = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      tok = split_ws(line);
      if (!tok.empty()) return true;
    }
    return false;
  };

  if (!next_content()) throw ParseError("missing header line", 1);
  if (tok.size() != 4) {
    throw ParseError("header must be 'width height t_start_us t_end_us'", lineno);
  }
  const int width = parse_int<int>(tok[0], lineno, "width");
  const int height = parse_int<int>(tok[1], lineno, "height");
  const auto t0 = parse_int<std::int64_t>(tok[2], lineno, "t_start_us");
  const auto t1 = parse_int<std::int64_t>(tok[3], lineno, "t_end_us");
  if (width < 0 || height < 0 || t0 < 0 || t1 < 0) {
    throw ParseError("header fields must be nonnegative", lineno);
  }
  if (!(t0 < t1)) throw ParseError("header requires t_start_us < t_end_us", lineno);

  std::vector<Event> events;
  std::int64_t last_t = t0;
  while (next_content()) {
    if (tok.size() != 4) throw ParseError("event line must be 't_us x y p'", lineno);
    const auto t = parse_int<std::int64_t>(tok[0], lineno, "t_us");
    const int x = parse_int<int>(tok[1], lineno, "x");
    const int y = parse_int<int>(tok[2], lineno, "y");
    const int p = parse_int<int>(tok[3], lineno, "polarity");
    if (p != 1 && p != -1) throw ParseError("polarity must be 1 or -1", lineno);
    if (x < 0 || y < 0 || x >= width || y >= height) {
      throw ParseError("coordinates outside the sensor", lineno);
    }
    if (t < t0 || t >= t1) throw ParseError("timestamp outside [t_start_us, t_end_us)", lineno);
    if (t < last_t) throw ParseError("timestamps not ascending", lineno);
    last_t = t;
    events.push_back({from_us(t), x, y, p});
  }
  // Ties in t may arrive in any order; canonicalise them.
  std::stable_sort(events.begin(), events.end(), event_less);
  return EventStream(width, height, from_us(t0), from_us(t1), std::move(events));
}

EventStream read_events(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return read_events(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string(), e);
  }
}

void write_events(const EventStream& stream, std::ostream& out) {
  out << stream.width() << ' ' << stream.height() << ' ' << to_us(stream.t_start()) << ' '
      << to_us(stream.t_end()) << '\n';
  for (const Event& e : stream.events()) {
    out << to_us(e.t) << ' ' << e.x << ' ' << e.y << ' ' << e.polarity << '\n';
  }
}

void write_events(const EventStream& stream, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_events(stream, out);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

// --- frames -----------------------------------------------------------------

namespace {

struct PnmHeader {
  std::string magic;
  int width = 0;
  int height = 0;
  int maxval = 0;
};

// Reads magic, width, height and maxval, skipping comments, then consumes the
// single whitespace byte that precedes the raster.
PnmHeader read_pnm_header(std::istream& in) {
  PnmHeader h;
  char m[2] = {0, 0};
  in.read(m, 2);
  if (in.gcount() != 2) throw ParseError("truncated PNM header");
  h.magic.assign(m, 2);
  if (h.magic != "P2" && h.magic != "P5" && h.magic != "P6") {
    throw ParseError("not a binary PGM (unrecognised magic)");
  }

  auto next_token = [&](const char* what) {
    std::string tok;
    int c;
    for (;;) {
      c = in.get();
      if (c == EOF) throw ParseError(std::string("truncated PNM header reading ") + what);
      if (c == '#') {
        while (c != '\n' && c != EOF) c = in.get();
        continue;
      }
      if (!std::isspace(c)) break;
    }
    while (c != EOF && std::isdigit(c)) {
      tok.push_back(static_cast<char>(c));
      c = in.get();
    }
    if (tok.empty()) throw ParseError(std::string("malformed PNM header field ") + what);
    if (c != EOF && !std::isspace(c)) throw ParseError(std::string("malformed PNM header field ") + what);
    return parse_int<int>(tok, 0, what);
  };
  h.width = next_token("width");
  h.height = next_token("height");
  h.maxval = next_token("maxval");
  if (h.width <= 0 || h.height <= 0) throw ParseError("PNM dimensions must be positive");
  if (h.maxval < 1 || h.maxval > 65535) throw ParseError("PNM maxval must be in [1, 65535]");
  return h;
}

std::vector<double> read_samples(std::istream& in, std::size_t count, int maxval) {
  const std::size_t bytes_per = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(count * bytes_per);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    throw ParseError("truncated PNM payload");
  }
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = bytes_per == 2 ? static_cast<double>((raw[2 * i] << 8) | raw[2 * i + 1])
                            : static_cast<double>(raw[i]);
  }
  return out;
}

}  // namespace

Frame read_frame(std::istream& in) {
  const PnmHeader h = read_pnm_header(in);
  if (h.magic == "P2") {
    throw ParseError("ASCII PGM (P2) is not supported; convert to binary P5");
  }
  if (h.magic != "P5") throw ParseError("not a binary PGM (expected magic P5, got '" + h.magic + "')");
  Frame f(h.width, h.height);
  f.pixels = read_samples(in, f.size(), h.maxval);
  return f;
}

Frame read_frame(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return read_frame(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string(), e);
  }
}

namespace {

// Grayscale raster plus the maxval it was stored with.
std::pair<Frame, int> read_gray_with_maxval(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    const PnmHeader h = read_pnm_header(in);
    if (h.magic == "P6") {
      const auto rgb = read_samples(in, static_cast<std::size_t>(h.width) * h.height * 3, h.maxval);
      return {luma(h.width, h.height, rgb), h.maxval};
    }
    in.seekg(0);
    return {read_frame(in), h.maxval};
  } catch (const ParseError& e) {
    throw ParseError(path.string(), e);
  }
}

}  // namespace

Frame read_gray_image(const std::filesystem::path& path) {
  return read_gray_with_maxval(path).first;
}

Frame read_intensity(const std::filesystem::path& path) {
  auto [frame, maxval] = read_gray_with_maxval(path);
  const double k = kWorkingPeak / maxval;
  for (double& v : frame.pixels) v *= k;
  return frame;
}

void write_intensity(const Frame& frame, const std::filesystem::path& path, int maxval) {
  Frame raw = frame;
  const double k = maxval / kWorkingPeak;
  for (double& v : raw.pixels) v *= k;
  write_frame(raw, path, maxval);
}

void write_frame(const Frame& frame, std::ostream& out, int maxval) {
  if (maxval < 1 || maxval > 65535) throw std::domain_error("write_frame: maxval must be in [1, 65535]");
  if (frame.width <= 0 || frame.height <= 0) throw std::domain_error("write_frame: empty frame");
  out << "P5\n" << frame.width << ' ' << frame.height << '\n' << maxval << '\n';
  const bool wide = maxval > 255;
  std::vector<unsigned char> raw(frame.size() * (wide ? 2 : 1));
  for (std::size_t i = 0; i < frame.size(); ++i) {
    // nearbyint honours the default round-half-to-even mode.
    const double q = std::clamp(std::nearbyint(frame.pixels[i]), 0.0, static_cast<double>(maxval));
    const auto v = static_cast<unsigned>(std::isnan(q) ? 0.0 : q);
    if (wide) {
      raw[2 * i] = static_cast<unsigned char>(v >> 8);
      raw[2 * i + 1] = static_cast<unsigned char>(v & 0xFF);
    } else {
      raw[i] = static_cast<unsigned char>(v);
    }
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

void write_frame(const Frame& frame, const std::filesystem::path& path, int maxval) {
  auto out = open_out(path);
  write_frame(frame, out, maxval);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

// --- dictionaries -----------------------------------------------------------

namespace {

constexpr std::array<char, 4> kDictionaryMagic = {'D', 'S', 'L', 'D'};

template <typename U>
void put_le(std::ostream& out, U v) {
  unsigned char b[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), sizeof(U));
}

template <typename U>
U get_le(std::istream& in) {
  unsigned char b[sizeof(U)];
  in.read(reinterpret_cast<char*>(b), sizeof(U));
  if (in.gcount() != static_cast<std::streamsize>(sizeof(U))) {
    throw ParseError("truncated dictionary file");
  }
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(b[i]) << (8 * i);
  return v;
}

}  // namespace

Dictionary read_dictionary(std::istream& in, DictionaryRole role) {
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  if (in.gcount() != 4 || magic != kDictionaryMagic) {
    throw ParseError("not a dictionary file (missing DSLD magic)");
  }
  Dictionary d;
  d.role = role;
  d.shape.out_channels = static_cast<std::int32_t>(get_le<std::uint32_t>(in));
  d.shape.in_channels = static_cast<std::int32_t>(get_le<std::uint32_t>(in));
  d.shape.kernel_h = static_cast<std::int32_t>(get_le<std::uint32_t>(in));
  d.shape.kernel_w = static_cast<std::int32_t>(get_le<std::uint32_t>(in));
  const auto& s = d.shape;
  if (s.out_channels < 1 || s.in_channels < 1 || s.kernel_h < 1 || s.kernel_w < 1 ||
      static_cast<std::int64_t>(s.out_channels) * s.in_channels * s.kernel_h * s.kernel_w >
          (std::int64_t{1} << 28)) {
    throw ParseError("dictionary dimensions out of range");
  }
  d.weights.resize(static_cast<std::size_t>(s.out_channels) * s.in_channels * s.kernel_h *
                   s.kernel_w);
  for (double& w : d.weights) w = std::bit_cast<double>(get_le<std::uint64_t>(in));
  try {
    d.validate();
  } catch (const std::domain_error& e) {
    throw ParseError(e.what());
  }
  return d;
}

Dictionary read_dictionary(const std::filesystem::path& path, DictionaryRole role) {
  auto in = open_in(path);
  try {
    return read_dictionary(in, role);
  } catch (const ParseError& e) {
    throw ParseError(path.string(), e);
  }
}

void write_dictionary(const Dictionary& d, std::ostream& out) {
  d.validate();
  out.write(kDictionaryMagic.data(), 4);
  put_le(out, static_cast<std::uint32_t>(d.shape.out_channels));
  put_le(out, static_cast<std::uint32_t>(d.shape.in_channels));
  put_le(out, static_cast<std::uint32_t>(d.shape.kernel_h));
  put_le(out, static_cast<std::uint32_t>(d.shape.kernel_w));
  for (double w : d.weights) put_le(out, std::bit_cast<std::uint64_t>(w));
}

void write_dictionary(const Dictionary& d, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_dictionary(d, out);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

// --- run configuration ------------------------------------------------------

std::vector<std::pair<std::string, std::string>> read_key_values(std::istream& in) {
  auto trim = [](std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
  };
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", lineno);
    std::string key = trim(std::string_view(content).substr(0, eq));
    std::string value = trim(std::string_view(content).substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", lineno);
    if (!seen.insert(key).second) throw ParseError("duplicate key '" + key + "'", lineno);
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> read_key_values(
    const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return read_key_values(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string(), e);
  }
}

}  // namespace esrb
