#ifndef DELJET_IO_HPP
#define DELJET_IO_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace deljet::io {

// Little-endian binary primitives for model containers. Doubles are written
// bit-for-bit so round trips are exact.
void write_u8(std::ostream& os, std::uint8_t v);
void write_u64(std::ostream& os, std::uint64_t v);
void write_f64(std::ostream& os, double v);
void write_f64_array(std::ostream& os, const std::vector<double>& v);
void write_string(std::ostream& os, const std::string& s);

std::uint8_t read_u8(std::istream& is);
std::uint64_t read_u64(std::istream& is);
double read_f64(std::istream& is);
std::vector<double> read_f64_array(std::istream& is);
std::string read_string(std::istream& is);

// Writes via a temp file in the same directory, then renames, so a crashed
// run never leaves a partial file at `path`.
void atomic_write(const std::filesystem::path& path,
                  const std::function<void(std::ostream&)>& body);

}  // namespace deljet::io

#endif
