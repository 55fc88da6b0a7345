#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "esrb/dictionary.hpp"
#include "esrb/events.hpp"
#include "esrb/frame.hpp"

namespace esrb {

/// Malformed input. `line()` is 1-based, or 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line = 0);
  /// Same error with "context: " prepended to the message.
  ParseError(const std::string& context, const ParseError& inner);
  int line() const { return line_; }

 private:
  int line_;
};

// --- events -----------------------------------------------------------------
//
// Text format:
//   width height t_start_us t_end_us
//   t_us x y p            (one per event, t_us nondecreasing, p in {1, -1})

EventStream read_events(std::istream& in);
EventStream read_events(const std::filesystem::path& path);
void write_events(const EventStream& stream, std::ostream& out);
void write_events(const EventStream& stream, const std::filesystem::path& path);

// --- frames -----------------------------------------------------------------
//
// Binary PGM (P5), maxval up to 255 (one byte per sample) or up to 65535 (two
// bytes, big-endian). Values map to reals in [0, maxval] with no rescaling.

Frame read_frame(std::istream& in);
Frame read_frame(const std::filesystem::path& path);
/// Also accepts binary PPM (P6), converted to luma.
Frame read_gray_image(const std::filesystem::path& path);
/// Upper end of the working intensity range used by the tools.
inline constexpr double kWorkingPeak = 255.0;

/// Like read_gray_image, rescaled from [0, maxval] to [0, kWorkingPeak].
Frame read_intensity(const std::filesystem::path& path);
/// Rescales [0, kWorkingPeak] to [0, maxval] and writes a P5 file. With the
/// default 16-bit maxval the quantization step is 1/257 of an intensity unit.
void write_intensity(const Frame& frame, const std::filesystem::path& path,
                     int maxval = 65535);

/// Rounds half to even and clamps to [0, maxval].
void write_frame(const Frame& frame, std::ostream& out, int maxval = 65535);
void write_frame(const Frame& frame, const std::filesystem::path& path, int maxval = 65535);

// --- dictionaries -----------------------------------------------------------
//
// "DSLD", then out_channels, in_channels, kernel_h, kernel_w as little-endian
// int32, then the weights as little-endian float64 in row-major order.

Dictionary read_dictionary(std::istream& in, DictionaryRole role = DictionaryRole::image);
Dictionary read_dictionary(const std::filesystem::path& path,
                           DictionaryRole role = DictionaryRole::image);
void write_dictionary(const Dictionary& d, std::ostream& out);
void write_dictionary(const Dictionary& d, const std::filesystem::path& path);

// --- run configuration ------------------------------------------------------

/// `key = value` lines; blank lines and lines starting with '#' are skipped.
/// Duplicate keys are rejected.
std::vector<std::pair<std::string, std::string>> read_key_values(std::istream& in);
std::vector<std::pair<std::string, std::string>> read_key_values(
    const std::filesystem::path& path);

}  // namespace esrb
