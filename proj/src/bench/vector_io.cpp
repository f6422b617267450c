#include "wl1/bench/vector_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

namespace wl1::bench {

namespace {

void put_u64(std::vector<char> &out, std::uint64_t v) {
    for (int k = 0; k < 8; ++k)
        out.push_back(static_cast<char>((v >> (8 * k)) & 0xFFu));
}

std::uint64_t get_u64(const char *p) {
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[k])) << (8 * k);
    return v;
}

} // namespace

Vector<double> read_vector_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(Errc::Io, "cannot open " + path);
    const std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
    if (in.bad())
        throw Error(Errc::Io, "read failed: " + path);

    if (bytes.size() < 16)
        throw Error(Errc::Malformed, path + ": header truncated");
    if (std::memcmp(bytes.data(), kVectorMagic, sizeof kVectorMagic) != 0)
        throw Error(Errc::Malformed, path + ": bad magic");
    const std::uint64_t d = get_u64(bytes.data() + 8);
    const std::size_t payload = bytes.size() - 16;
    if (d > payload / 8 || payload != d * 8)
        throw Error(Errc::Malformed, path + ": payload size does not match length " +
                                         std::to_string(d));

    Vector<double> x(static_cast<Index>(d));
    for (std::uint64_t i = 0; i < d; ++i)
        x[static_cast<Index>(i)] = std::bit_cast<double>(get_u64(bytes.data() + 16 + 8 * i));
    return x;
}

void write_vector_file(const std::string &path, const Vector<double> &x) {
    std::vector<char> out;
    out.reserve(16 + 8 * static_cast<std::size_t>(x.size()));
    out.insert(out.end(), std::begin(kVectorMagic), std::end(kVectorMagic));
    put_u64(out, static_cast<std::uint64_t>(x.size()));
    for (Index i = 0; i < x.size(); ++i)
        put_u64(out, std::bit_cast<std::uint64_t>(x[i]));

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw Error(Errc::Io, "cannot open " + path + " for writing");
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f)
        throw Error(Errc::Io, "write failed: " + path);
}

} // namespace wl1::bench
