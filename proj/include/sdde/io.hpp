#ifndef SDDE_IO_HPP
#define SDDE_IO_HPP

#include <string>

namespace sdde::io {

// Shortest decimal representation that round-trips to the same double.
// Non-finite values print as inf / -inf / nan.
std::string format_double(double v);

// Writes content atomically enough for our purposes (truncate + write).
void write_file(const std::string& path, const std::string& content);

} // namespace sdde::io

#endif // SDDE_IO_HPP
