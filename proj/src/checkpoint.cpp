#include <cstring>

#include "wavres/binio.hpp"
#include "wavres/wavresnet.hpp"

namespace wavres {

namespace {
const char kMagic[4] = {'W', 'R', 'N', '1'};
const std::uint16_t kVersion = 1;
}  // namespace

void save_checkpoint(const std::string& path, WavResNet& net) {
    std::vector<std::uint8_t> payload;
    put_u16(payload, kVersion);
    const std::string topo = net.topology.serialize();
    put_u32(payload, static_cast<std::uint32_t>(topo.size()));
    payload.insert(payload.end(), topo.begin(), topo.end());
    net.visit_state([&payload](std::vector<double>& arr) {
        put_u32(payload, static_cast<std::uint32_t>(arr.size()));
        for (double v : arr) put_f64(payload, v);
    });

    std::vector<std::uint8_t> bytes;
    bytes.insert(bytes.end(), kMagic, kMagic + 4);
    bytes.insert(bytes.end(), payload.begin(), payload.end());
    put_u32(bytes, crc32_of(payload));
    write_file_bytes(path, bytes);
}

WavResNet load_checkpoint(const std::string& path) {
    const std::vector<std::uint8_t> bytes = read_file_bytes(path);
    if (bytes.size() < 4) throw FormatError("WRN1: file too short for magic", bytes.size());
    for (int i = 0; i < 4; ++i)
        if (bytes[i] != static_cast<std::uint8_t>(kMagic[i]))
            throw FormatError("WRN1: bad magic", static_cast<std::uint64_t>(i));
    if (bytes.size() < 4 + 2 + 4 + 4) throw FormatError("WRN1: truncated header", bytes.size());

    const std::size_t payload_len = bytes.size() - 4 - 4;
    const std::uint32_t stored_crc = get_u32(bytes.data() + 4 + payload_len);
    const std::uint32_t computed_crc =
        crc32_final(crc32(bytes.data() + 4, payload_len));
    if (stored_crc != computed_crc)
        throw FormatError("WRN1: payload CRC mismatch", 4 + payload_len);

    std::size_t off = 4;
    const std::uint16_t version = get_u16(bytes.data() + off);
    off += 2;
    if (version != kVersion) throw FormatError("WRN1: unsupported version", 4);

    const std::uint32_t topo_len = get_u32(bytes.data() + off);
    off += 4;
    if (off + topo_len > bytes.size() - 4) throw FormatError("WRN1: topology block truncated", off);
    const std::string topo_text(bytes.begin() + off, bytes.begin() + off + topo_len);
    off += topo_len;

    WavResNet net(TopologyConfig::parse(topo_text));
    bool corrupt = false;
    std::size_t cursor = off;
    net.visit_state([&](std::vector<double>& arr) {
        if (corrupt) return;
        if (cursor + 4 > bytes.size() - 4) {
            corrupt = true;
            return;
        }
        const std::uint32_t n = get_u32(bytes.data() + cursor);
        cursor += 4;
        if (n != arr.size() || cursor + 8ull * n > bytes.size() - 4) {
            corrupt = true;
            return;
        }
        for (std::uint32_t i = 0; i < n; ++i, cursor += 8)
            arr[i] = get_f64(bytes.data() + cursor);
    });
    if (corrupt) throw FormatError("WRN1: parameter array size mismatch", cursor);
    if (cursor != bytes.size() - 4) throw FormatError("WRN1: trailing bytes", cursor);
    return net;
}

}  // namespace wavres
