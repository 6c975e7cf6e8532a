#include "privdac/trace.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "privdac/errors.hpp"

namespace privdac {

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("double formatting failed");
  return std::string(buf, ptr);
}

void Trace::add_channel(std::string name, std::size_t width) {
  if (!times_.empty()) throw std::logic_error("channels must be declared before recording");
  if (width == 0) throw std::invalid_argument("channel width must be positive");
  if (index_.contains(name)) throw std::invalid_argument("duplicate channel '" + name + "'");
  index_.emplace(name, channels_.size());
  channels_.push_back(Channel{std::move(name), width_, width});
  width_ += width;
}

bool Trace::has_channel(std::string_view name) const { return index_.find(name) != index_.end(); }

const Trace::Channel& Trace::channel(std::string_view name) const {
  const auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("no channel '" + std::string(name) + "' in trace");
  return channels_[it->second];
}

std::vector<std::string> Trace::column_names() const {
  std::vector<std::string> out;
  out.reserve(width_);
  for (const auto& ch : channels_) {
    if (ch.width == 1) {
      out.push_back(ch.name);
    } else {
      for (std::size_t k = 0; k < ch.width; ++k) out.push_back(ch.name + "_" + std::to_string(k));
    }
  }
  return out;
}

void Trace::append(double t, std::vector<double> row) {
  if (row.size() != width_) throw std::invalid_argument("trace row width mismatch");
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (!std::isfinite(row[k])) {
      throw IntegrationError("non-finite value in column " + column_names()[k] + " at t=" + format_double(t));
    }
  }
  times_.push_back(t);
  data_.insert(data_.end(), row.begin(), row.end());
}

Eigen::VectorXd Trace::value(std::string_view name, std::size_t sample) const {
  const Channel& ch = channel(name);
  if (sample >= times_.size()) throw std::out_of_range("trace sample out of range");
  const double* base = data_.data() + sample * width_ + ch.offset;
  return Eigen::Map<const Eigen::VectorXd>(base, static_cast<Eigen::Index>(ch.width));
}

double Trace::scalar(std::string_view name, std::size_t sample) const {
  const Channel& ch = channel(name);
  if (sample >= times_.size()) throw std::out_of_range("trace sample out of range");
  return data_[sample * width_ + ch.offset];
}

void Trace::write_csv(std::ostream& out) const {
  out << 't';
  for (const auto& name : column_names()) out << ',' << name;
  out << '\n';
  for (std::size_t s = 0; s < times_.size(); ++s) {
    out << format_double(times_[s]);
    const double* row = data_.data() + s * width_;
    for (std::size_t k = 0; k < width_; ++k) out << ',' << format_double(row[k]);
    out << '\n';
  }
}

}  // namespace privdac
