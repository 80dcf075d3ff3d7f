#include "spimpute/panel.hpp"

#include "spimpute/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace spimpute {

namespace {
constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
}

Panel::Panel(std::vector<std::string> timestamps, std::size_t sensors)
    : timestamps_(std::move(timestamps)),
      sensors_(sensors),
      values_(timestamps_.size() * sensors, kMissing),
      mask_(timestamps_.size() * sensors, 0) {}

Panel::Panel(std::vector<std::string> timestamps, std::size_t sensors, std::vector<double> values,
             std::vector<std::uint8_t> mask)
    : timestamps_(std::move(timestamps)),
      sensors_(sensors),
      values_(std::move(values)),
      mask_(std::move(mask)) {
    const std::size_t cells = timestamps_.size() * sensors_;
    if (values_.size() != cells || mask_.size() != cells) {
        throw InputError("panel values/mask size does not match rows x sensors");
    }
    for (std::size_t k = 0; k < cells; ++k) {
        if (mask_[k]) {
            mask_[k] = 1;
            const double v = values_[k];
            if (!(v >= 0.0 && v <= 1.0)) {
                throw InputError(fmt::format("observed value {} at row {}, column {} is outside [0,1]",
                                             v, k / sensors_ + 1, k % sensors_ + 1));
            }
        } else {
            values_[k] = kMissing;
        }
    }
}

void Panel::set(std::size_t t, std::size_t i, double v) {
    if (!(v >= 0.0 && v <= 1.0)) throw InputError(fmt::format("value {} outside [0,1]", v));
    values_[t * sensors_ + i] = v;
    mask_[t * sensors_ + i] = 1;
}

void Panel::hide(std::size_t t, std::size_t i) {
    values_[t * sensors_ + i] = kMissing;
    mask_[t * sensors_ + i] = 0;
}

std::size_t Panel::observed_count(std::size_t t) const {
    auto m = mask_row(t);
    return static_cast<std::size_t>(std::count(m.begin(), m.end(), std::uint8_t{1}));
}

bool Panel::fully_observed() const {
    return std::all_of(mask_.begin(), mask_.end(), [](std::uint8_t m) { return m != 0; });
}

Panel Panel::slice_rows(std::size_t begin, std::size_t end) const {
    end = std::min(end, rows());
    begin = std::min(begin, end);
    std::vector<std::string> ts(timestamps_.begin() + static_cast<std::ptrdiff_t>(begin),
                                timestamps_.begin() + static_cast<std::ptrdiff_t>(end));
    const auto b = static_cast<std::ptrdiff_t>(begin * sensors_);
    const auto e = static_cast<std::ptrdiff_t>(end * sensors_);
    return Panel(std::move(ts), sensors_, std::vector<double>(values_.begin() + b, values_.begin() + e),
                 std::vector<std::uint8_t>(mask_.begin() + b, mask_.begin() + e));
}

bool operator==(const Panel& a, const Panel& b) {
    if (a.sensors_ != b.sensors_ || a.timestamps_ != b.timestamps_ || a.mask_ != b.mask_) return false;
    for (std::size_t k = 0; k < a.values_.size(); ++k) {
        if (a.mask_[k] && std::bit_cast<std::uint64_t>(a.values_[k]) !=
                              std::bit_cast<std::uint64_t>(b.values_[k])) {
            return false;
        }
    }
    return true;
}

CompletenessStats completeness(const Panel& panel) {
    CompletenessStats s;
    s.total_rows = panel.rows();
    s.missing_histogram.assign(panel.sensors() + 1, 0);
    for (std::size_t t = 0; t < panel.rows(); ++t) {
        const std::size_t missing = panel.sensors() - panel.observed_count(t);
        ++s.missing_histogram[missing];
        if (missing == 0) ++s.complete_rows;
        else ++s.incomplete_rows;
    }
    return s;
}

}  // namespace spimpute
