#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>

#include "netobs/error.hpp"

namespace netobs {

// Rates are carried in bits per second, sizes in bits and times in seconds.
// Octet-denominated inputs are converted at construction.

class BitRate {
 public:
  constexpr BitRate() = default;

  explicit BitRate(double bits_per_second) : bps_(bits_per_second) {
    if (!std::isfinite(bits_per_second)) {
      throw Error(ErrorCode::invalid_argument, "bit rate must be finite");
    }
    if (bits_per_second < 0.0) {
      throw Error(ErrorCode::negative_rate, std::to_string(bits_per_second) + " bps");
    }
  }

  static BitRate bps(double v) { return BitRate(v); }
  static BitRate kbps(double v) { return BitRate(v * 1e3); }
  static BitRate mbps(double v) { return BitRate(v * 1e6); }
  static BitRate gbps(double v) { return BitRate(v * 1e9); }

  constexpr double value() const noexcept { return bps_; }

  friend BitRate operator+(BitRate a, BitRate b) { return BitRate(a.bps_ + b.bps_); }
  // Throws instead of clamping when the result would be negative.
  friend BitRate operator-(BitRate a, BitRate b) { return BitRate(a.bps_ - b.bps_); }
  friend BitRate operator*(BitRate a, double k) { return BitRate(a.bps_ * k); }
  BitRate& operator+=(BitRate o) { return *this = *this + o; }

  friend constexpr auto operator<=>(BitRate, BitRate) = default;

 private:
  double bps_ = 0.0;
};

class Duration {
 public:
  explicit Duration(double seconds) : s_(seconds) {
    if (!std::isfinite(seconds) || seconds <= 0.0) {
      throw Error(ErrorCode::invalid_argument,
                  "duration must be positive and finite, got " + std::to_string(seconds));
    }
  }

  static Duration seconds(double v) { return Duration(v); }
  static Duration millis(double v) { return Duration(v * 1e-3); }

  constexpr double value() const noexcept { return s_; }

  friend Duration operator*(Duration d, double k) { return Duration(d.s_ * k); }
  friend constexpr auto operator<=>(Duration, Duration) = default;

 private:
  double s_;
};

class OverheadBits {
 public:
  constexpr OverheadBits() = default;

  static constexpr OverheadBits from_bits(std::uint64_t bits) { return OverheadBits(bits); }
  static OverheadBits from_octets(std::uint64_t octets) {
    if (octets > std::numeric_limits<std::uint64_t>::max() / 8) {
      throw Error(ErrorCode::invalid_argument, "octet count overflows");
    }
    return OverheadBits(octets * 8);
  }

  constexpr std::uint64_t bits() const noexcept { return bits_; }
  constexpr double octets() const noexcept { return static_cast<double>(bits_) / 8.0; }

  friend OverheadBits operator+(OverheadBits a, OverheadBits b) {
    if (b.bits_ > std::numeric_limits<std::uint64_t>::max() - a.bits_) {
      throw Error(ErrorCode::invalid_argument, "overhead bits overflow");
    }
    return OverheadBits(a.bits_ + b.bits_);
  }
  friend OverheadBits operator-(OverheadBits a, OverheadBits b) {
    if (b.bits_ > a.bits_) {
      throw Error(ErrorCode::invalid_argument, "overhead bits would become negative");
    }
    return OverheadBits(a.bits_ - b.bits_);
  }
  friend OverheadBits operator*(OverheadBits a, std::uint64_t k) {
    if (k != 0 && a.bits_ > std::numeric_limits<std::uint64_t>::max() / k) {
      throw Error(ErrorCode::invalid_argument, "overhead bits overflow");
    }
    return OverheadBits(a.bits_ * k);
  }

  friend constexpr auto operator<=>(OverheadBits, OverheadBits) = default;

 private:
  constexpr explicit OverheadBits(std::uint64_t bits) : bits_(bits) {}
  std::uint64_t bits_ = 0;
};

// Uncertainty of a sensitive metric measured every `period`: it grows
// linearly in the period with the metric's slope.
class Uncertainty {
 public:
  Uncertainty(std::string metric_name, double slope, Duration period)
      : metric_name_(std::move(metric_name)), slope_(slope), period_(period),
        value_(slope * period.value()) {
    if (!std::isfinite(slope) || slope < 0.0) {
      throw Error(ErrorCode::invalid_argument, "uncertainty slope must be non-negative");
    }
  }

  static Uncertainty detection_time(Duration period) {
    return Uncertainty("detection_time", 1.0, period);
  }

  const std::string& metric_name() const noexcept { return metric_name_; }
  double slope() const noexcept { return slope_; }
  Duration period() const noexcept { return period_; }
  double value() const noexcept { return value_; }

  friend bool operator==(const Uncertainty&, const Uncertainty&) = default;

 private:
  std::string metric_name_;
  double slope_;
  Duration period_;
  double value_;
};

enum class ImpactKind { data_rate, loss_rate };

inline const char* to_string(ImpactKind k) {
  return k == ImpactKind::data_rate ? "data_rate" : "loss_rate";
}

struct Impact {
  ImpactKind kind = ImpactKind::data_rate;
  BitRate value;

  friend bool operator==(const Impact&, const Impact&) = default;
};

}  // namespace netobs
