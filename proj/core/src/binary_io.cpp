#include "csbss/binary_io.hpp"

namespace csbss::io {

void write_magic(std::ostream& out, std::string_view magic) {
  out.write(magic.data(), static_cast<std::streamsize>(magic.size()));
}

void expect_magic(std::istream& in, std::string_view magic) {
  std::string got(magic.size(), '\0');
  if (!in.read(got.data(), static_cast<std::streamsize>(got.size())) || got != magic) {
    throw ParseError("bad magic: expected \"" + std::string(magic) + "\" at byte offset 0");
  }
}

}  // namespace csbss::io
