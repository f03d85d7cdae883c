#ifndef SIGCLASS_BYTEIO_HPP
#define SIGCLASS_BYTEIO_HPP

// Little-endian scalar I/O independent of host byte order.

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>

namespace sigclass::byteio {

template <typename UInt>
void put_le(std::ostream& os, UInt v) {
    char buf[sizeof(UInt)];
    for (std::size_t i = 0; i < sizeof(UInt); ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    os.write(buf, sizeof(UInt));
}

template <typename UInt>
bool get_le(std::istream& is, UInt& v) {
    unsigned char buf[sizeof(UInt)];
    if (!is.read(reinterpret_cast<char*>(buf), sizeof(UInt))) return false;
    v = 0;
    for (std::size_t i = 0; i < sizeof(UInt); ++i) v |= static_cast<UInt>(buf[i]) << (8 * i);
    return true;
}

inline void put_f64(std::ostream& os, double x) { put_le(os, std::bit_cast<std::uint64_t>(x)); }

inline bool get_f64(std::istream& is, double& x) {
    std::uint64_t u = 0;
    if (!get_le(is, u)) return false;
    x = std::bit_cast<double>(u);
    return true;
}

} // namespace sigclass::byteio

#endif // SIGCLASS_BYTEIO_HPP
