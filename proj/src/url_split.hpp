#pragma once

#include <string>

#include "sdgmap/errors.hpp"

namespace sdgmap::detail {

struct SplitUrl {
  std::string base;  // scheme://host:port
  std::string path;  // leading-slash path, "/" when absent
};

inline SplitUrl split_url(const std::string& endpoint) {
  auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw TransportError("endpoint must include a scheme: " + endpoint);
  }
  auto path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    return {endpoint, "/"};
  }
  return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

}  // namespace sdgmap::detail
