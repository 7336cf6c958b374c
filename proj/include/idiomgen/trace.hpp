#pragma once

#include <string>
#include <vector>

namespace idiomgen {

// Observable console behavior: values consumed, values printed, and how the
// run ended. `message` is diagnostic only and does not take part in
// equality.
struct Trace {
  enum class Status { ok, error, rejected };

  std::vector<long long> inputs;
  std::vector<std::string> outputs;
  Status status = Status::ok;
  std::string message;

  friend bool operator==(const Trace& a, const Trace& b) {
    return a.inputs == b.inputs && a.outputs == b.outputs && a.status == b.status;
  }

  std::string str() const {
    std::string s = "in [";
    for (std::size_t i = 0; i < inputs.size(); ++i) s += (i ? "," : "") + std::to_string(inputs[i]);
    s += "] out [";
    for (std::size_t i = 0; i < outputs.size(); ++i) s += (i ? "," : "") + outputs[i];
    s += "]";
    if (status == Status::error) s += " error: " + message;
    if (status == Status::rejected) s += " rejected: " + message;
    return s;
  }
};

}  // namespace idiomgen
