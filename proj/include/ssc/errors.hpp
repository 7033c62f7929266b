#pragma once

#include <stdexcept>

namespace ssc {

// Invalid argument or violated operation precondition.
class domain_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A strategy or structure that cannot fulfill its contract at runtime,
// e.g. a test sequence that never determines the class.
class contract_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Problem size exceeds a configured exponential-work limit.
class resource_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace ssc
