#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace cpmi {

inline constexpr const char* kToolVersion = "0.1.0";

/// Entry point behind the `cpmi` binary. Exit status: 0 success, 1 data
/// error, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Hex SHA-256 of a byte string / of a file's contents.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

/// Runs fn(0..count-1) on `threads` workers. Results must be written by
/// index; the first failing index's exception is rethrown.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace cpmi
