#pragma once

#include <stdexcept>
#include <string>

namespace subwayps {

// Bad parameters, presets or plans. CLI exit code 2.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input files (route JSON, trace CSV, scripts). CLI exit code 2.
class schema_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A sensor sample with a non-finite component or negative timestamp.
class rejected_sample : public schema_error {
 public:
  rejected_sample(const std::string& field, const std::string& what)
      : schema_error(what), field_(field) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Transitions fed to the trip tracker out of order or with repeated kinds.
class protocol_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Position queried for a time before the last processed transition.
class clock_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Inconsistent simulation script (overlapping intervals, bad durations).
class script_error : public schema_error {
 public:
  using schema_error::schema_error;
};

// File could not be opened, read or written. CLI exit code 3.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace subwayps
