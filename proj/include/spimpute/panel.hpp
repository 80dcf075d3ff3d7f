#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace spimpute {

/// T x N matrix of normalized values in [0,1] with an explicit observation
/// mask. Columns follow the layout's node order. Unobserved cells hold NaN.
class Panel {
public:
    Panel() = default;
    /// All cells unobserved.
    Panel(std::vector<std::string> timestamps, std::size_t sensors);
    /// `values` is row-major T x N; entries where mask == 0 are ignored and stored as NaN.
    /// Throws InputError if an observed value is outside [0,1] or shapes disagree.
    Panel(std::vector<std::string> timestamps, std::size_t sensors, std::vector<double> values,
          std::vector<std::uint8_t> mask);

    std::size_t rows() const { return timestamps_.size(); }
    std::size_t sensors() const { return sensors_; }
    const std::vector<std::string>& timestamps() const { return timestamps_; }

    bool observed(std::size_t t, std::size_t i) const { return mask_[t * sensors_ + i] != 0; }
    double value(std::size_t t, std::size_t i) const { return values_[t * sensors_ + i]; }

    std::span<const double> row(std::size_t t) const {
        return {values_.data() + t * sensors_, sensors_};
    }
    std::span<const std::uint8_t> mask_row(std::size_t t) const {
        return {mask_.data() + t * sensors_, sensors_};
    }
    const std::vector<double>& values() const { return values_; }
    const std::vector<std::uint8_t>& mask() const { return mask_; }

    void set(std::size_t t, std::size_t i, double v);
    void hide(std::size_t t, std::size_t i);

    std::size_t observed_count(std::size_t t) const;
    bool complete(std::size_t t) const { return observed_count(t) == sensors_; }
    bool fully_observed() const;

    Panel slice_rows(std::size_t begin, std::size_t end) const;

    /// Same timestamps, same mask, bit-identical observed values.
    friend bool operator==(const Panel& a, const Panel& b);

private:
    std::vector<std::string> timestamps_;
    std::size_t sensors_ = 0;
    std::vector<double> values_;
    std::vector<std::uint8_t> mask_;
};

struct CompletenessStats {
    std::size_t total_rows = 0;
    std::size_t complete_rows = 0;
    std::size_t incomplete_rows = 0;
    /// missing_histogram[k] = rows with exactly k missing cells.
    std::vector<std::size_t> missing_histogram;
};

CompletenessStats completeness(const Panel& panel);

}  // namespace spimpute
