#include "deljet/io.hpp"

#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "deljet/errors.hpp"

namespace deljet::io {

namespace {
void put_bytes(std::ostream& os, const void* p, std::size_t n) {
    os.write(static_cast<const char*>(p), (std::streamsize)n);
    if (!os) throw IoError("write failed");
}
void get_bytes(std::istream& is, void* p, std::size_t n) {
    is.read(static_cast<char*>(p), (std::streamsize)n);
    if ((std::size_t)is.gcount() != n) throw LoadError("unexpected end of stream");
}
}  // namespace

void write_u8(std::ostream& os, std::uint8_t v) { put_bytes(os, &v, 1); }

void write_u64(std::ostream& os, std::uint64_t v) {
    std::uint8_t b[8];
    for (int i = 0; i < 8; ++i) b[i] = (std::uint8_t)(v >> (8 * i));
    put_bytes(os, b, 8);
}

void write_f64(std::ostream& os, double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    write_u64(os, u);
}

void write_f64_array(std::ostream& os, const std::vector<double>& v) {
    write_u64(os, v.size());
    for (double d : v) write_f64(os, d);
}

void write_string(std::ostream& os, const std::string& s) {
    write_u64(os, s.size());
    put_bytes(os, s.data(), s.size());
}

std::uint8_t read_u8(std::istream& is) {
    std::uint8_t v;
    get_bytes(is, &v, 1);
    return v;
}

std::uint64_t read_u64(std::istream& is) {
    std::uint8_t b[8];
    get_bytes(is, b, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= (std::uint64_t)b[i] << (8 * i);
    return v;
}

double read_f64(std::istream& is) {
    std::uint64_t u = read_u64(is);
    double d;
    std::memcpy(&d, &u, 8);
    return d;
}

std::vector<double> read_f64_array(std::istream& is) {
    std::uint64_t n = read_u64(is);
    std::vector<double> v(n);
    for (auto& d : v) d = read_f64(is);
    return v;
}

std::string read_string(std::istream& is) {
    std::uint64_t n = read_u64(is);
    std::string s(n, '\0');
    get_bytes(is, s.data(), n);
    return s;
}

void atomic_write(const std::filesystem::path& path,
                  const std::function<void(std::ostream&)>& body) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
        body(os);
        os.flush();
        if (!os) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw IoError("rename to " + path.string() + " failed: " + ec.message());
    }
}

}  // namespace deljet::io
