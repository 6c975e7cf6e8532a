#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace privdac {

/**
 * @brief Time-indexed record of named vector channels on one shared grid.
 *
 * Columns are declared up front through add_channel(); samples are then
 * appended row by row. A channel "x_alpha_1" of width 2 owns the CSV
 * columns "x_alpha_1_0" and "x_alpha_1_1"; width-1 channels keep their name.
 */
class Trace {
 public:
  struct Channel {
    std::string name;
    std::size_t offset = 0;
    std::size_t width = 0;
  };

  /// Declare a channel; only legal before the first sample.
  void add_channel(std::string name, std::size_t width);

  bool has_channel(std::string_view name) const;
  const Channel& channel(std::string_view name) const;
  const std::vector<Channel>& channels() const noexcept { return channels_; }
  std::vector<std::string> column_names() const;
  std::size_t width() const noexcept { return width_; }

  /// Append one sample; row.size() must equal width(). Throws IntegrationError on NaN/Inf.
  void append(double t, std::vector<double> row);

  std::size_t size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }
  const std::vector<double>& times() const noexcept { return times_; }
  double time(std::size_t sample) const { return times_.at(sample); }

  Eigen::VectorXd value(std::string_view name, std::size_t sample) const;
  double scalar(std::string_view name, std::size_t sample) const;

  /// CSV with header "t,<columns...>"; numbers in shortest round-trip form.
  void write_csv(std::ostream& out) const;

 private:
  std::vector<Channel> channels_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::size_t width_ = 0;
  std::vector<double> times_;
  std::vector<double> data_;
};

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

}  // namespace privdac
