#pragma once

#include <stdexcept>
#include <string>

namespace sotdtco {

/** \brief Error carrying a short machine-readable code next to the message. */
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

inline void require(bool ok, const char* code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

}  // namespace sotdtco
