#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace entrostream {

// Thrown when an estimator asks for more simultaneously live registers than
// its budget: the space claim is violated, never silently outgrown.
class capacity_exceeded : public std::runtime_error {
 public:
  explicit capacity_exceeded(std::size_t capacity)
      : std::runtime_error("register file capacity of " + std::to_string(capacity) +
                           " words exceeded") {}
};

// Fixed-capacity numeric scratchpad. One register models one word of working
// memory; estimators route all mutable state through it and high_water()
// reports the maximum number of simultaneously live registers observed.
class register_file {
 public:
  explicit register_file(std::size_t capacity) : capacity_(capacity) {}

  std::size_t alloc() {
    if (live_count_ == capacity_) throw capacity_exceeded(capacity_);
    std::size_t idx;
    if (!free_.empty()) {
      idx = free_.back();
      free_.pop_back();
      live_[idx] = true;
      cells_[idx] = 0.0;
    } else {
      idx = cells_.size();
      cells_.push_back(0.0);
      live_.push_back(true);
    }
    ++live_count_;
    if (live_count_ > high_water_) high_water_ = live_count_;
    return idx;
  }

  void free(std::size_t r) {
    check_live(r);
    live_[r] = false;
    free_.push_back(r);
    --live_count_;
  }

  double read(std::size_t r) const {
    check_live(r);
    return cells_[r];
  }

  void write(std::size_t r, double v) {
    check_live(r);
    cells_[r] = v;
  }

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t live() const noexcept { return live_count_; }
  std::size_t high_water() const noexcept { return high_water_; }

 private:
  void check_live(std::size_t r) const {
    if (r >= cells_.size() || !live_[r])
      throw std::logic_error("register_file: access to a register that is not live");
  }

  std::size_t capacity_;
  std::vector<double> cells_;
  std::vector<bool> live_;
  std::vector<std::size_t> free_;
  std::size_t live_count_ = 0;
  std::size_t high_water_ = 0;
};

// RAII block of consecutive-lifetime registers, for results that must stay
// live while later phases run (per-band means, plug-in counters).
class reg_block {
 public:
  reg_block(register_file& rf, std::size_t n) : rf_(&rf) {
    cells_.reserve(n);
    try {
      for (std::size_t i = 0; i < n; ++i) cells_.push_back(rf.alloc());
    } catch (...) {
      release();
      throw;
    }
  }
  ~reg_block() { release(); }
  reg_block(const reg_block&) = delete;
  reg_block& operator=(const reg_block&) = delete;

  std::size_t size() const { return cells_.size(); }
  double read(std::size_t i) const { return rf_->read(cells_[i]); }
  void write(std::size_t i, double v) { rf_->write(cells_[i], v); }

 private:
  void release() {
    for (auto it = cells_.rbegin(); it != cells_.rend(); ++it) rf_->free(*it);
    cells_.clear();
  }

  register_file* rf_;
  std::vector<std::size_t> cells_;
};

// RAII handle on one register. Reads and writes go through the file so the
// word accounting stays exact.
class reg {
 public:
  explicit reg(register_file& rf, double initial = 0.0) : rf_(&rf), idx_(rf.alloc()) {
    rf_->write(idx_, initial);
  }
  ~reg() { rf_->free(idx_); }
  reg(const reg&) = delete;
  reg& operator=(const reg&) = delete;

  double get() const { return rf_->read(idx_); }
  operator double() const { return get(); }
  reg& operator=(double v) {
    rf_->write(idx_, v);
    return *this;
  }
  reg& operator+=(double v) {
    rf_->write(idx_, rf_->read(idx_) + v);
    return *this;
  }

 private:
  register_file* rf_;
  std::size_t idx_;
};

}  // namespace entrostream
