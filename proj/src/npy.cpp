#include "lfs/npy.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include "lfs/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "NPY codec assumes a little-endian host");
static_assert(sizeof(float) == 4);

namespace lfs::npy {

namespace {

constexpr char kMagic[6] = {'\x93', 'N', 'U', 'M', 'P', 'Y'};

size_t element_count(const std::vector<size_t>& shape) {
    size_t n = 1;
    for (size_t s : shape) n *= s;
    return n;
}

std::string shape_literal(const std::vector<size_t>& shape) {
    if (shape.size() == 1) return "(" + std::to_string(shape[0]) + ",)";
    return "(" + std::to_string(shape[0]) + ", " + std::to_string(shape[1]) + ")";
}

// Pulls "key': value" fields out of the header dict. The header grammar is a
// fixed Python dict literal, so simple string scanning is enough.
std::string header_field(const std::string& header, const std::string& key) {
    const std::string needle = "'" + key + "':";
    const size_t at = header.find(needle);
    if (at == std::string::npos) throw FormatError("npy: header missing '" + key + "'");
    size_t begin = at + needle.size();
    while (begin < header.size() && header[begin] == ' ') ++begin;
    size_t end = begin;
    if (begin < header.size() && header[begin] == '(') {
        end = header.find(')', begin);
        if (end == std::string::npos) throw FormatError("npy: unterminated shape tuple");
        ++end;
    } else {
        while (end < header.size() && header[end] != ',' && header[end] != '}') ++end;
    }
    return header.substr(begin, end - begin);
}

std::vector<size_t> parse_shape(const std::string& literal) {
    if (literal.size() < 2 || literal.front() != '(' || literal.back() != ')')
        throw FormatError("npy: malformed shape " + literal);
    std::vector<size_t> shape;
    size_t pos = 1;
    while (pos < literal.size() - 1) {
        while (pos < literal.size() - 1 && (literal[pos] == ' ' || literal[pos] == ',')) ++pos;
        if (pos >= literal.size() - 1) break;
        size_t end = pos;
        while (end < literal.size() - 1 && literal[end] >= '0' && literal[end] <= '9') ++end;
        if (end == pos) throw FormatError("npy: malformed shape " + literal);
        shape.push_back(std::stoull(literal.substr(pos, end - pos)));
        pos = end;
    }
    if (shape.empty() || shape.size() > 2)
        throw FormatError("npy: only 1-D and 2-D arrays are supported");
    return shape;
}

} // namespace

std::vector<unsigned char> encode(const Array& array) {
    if (array.shape.empty() || array.shape.size() > 2)
        throw InvalidArgument("npy::encode: shape must be 1-D or 2-D");
    if (element_count(array.shape) != array.data.size())
        throw InvalidArgument("npy::encode: shape does not match data length");

    std::string header = "{'descr': '<f4', 'fortran_order': False, 'shape': " +
                         shape_literal(array.shape) + ", }";
    // magic(6) + version(2) + header-size(2) + header, padded to 64.
    const size_t prefix = 10;
    size_t total = prefix + header.size() + 1;
    const size_t padded = (total + 63) / 64 * 64;
    header.append(padded - total, ' ');
    header.push_back('\n');

    std::vector<unsigned char> out;
    out.reserve(prefix + header.size() + array.data.size() * 4);
    out.insert(out.end(), kMagic, kMagic + 6);
    out.push_back(1);
    out.push_back(0);
    const uint16_t hlen = static_cast<uint16_t>(header.size());
    out.push_back(static_cast<unsigned char>(hlen & 0xff));
    out.push_back(static_cast<unsigned char>(hlen >> 8));
    out.insert(out.end(), header.begin(), header.end());

    const size_t data_at = out.size();
    out.resize(data_at + array.data.size() * 4);
    std::memcpy(out.data() + data_at, array.data.data(), array.data.size() * 4);
    return out;
}

void save(const std::filesystem::path& path, const Array& array) {
    const std::vector<unsigned char> bytes = encode(array);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("npy::save: cannot open " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("npy::save: write failed for " + path.string());
}

Array decode(const std::vector<unsigned char>& bytes) {
    if (bytes.size() < 10) throw FormatError("npy: file shorter than fixed prefix");
    if (std::memcmp(bytes.data(), kMagic, 6) != 0) throw FormatError("npy: bad magic");
    if (bytes[6] != 1 || bytes[7] != 0)
        throw FormatError("npy: unsupported version " + std::to_string(bytes[6]) + "." +
                          std::to_string(bytes[7]));
    const uint16_t hlen = static_cast<uint16_t>(bytes[8] | (bytes[9] << 8));
    if (bytes.size() < 10u + hlen) throw FormatError("npy: truncated header");
    const std::string header(bytes.begin() + 10, bytes.begin() + 10 + hlen);

    if (header_field(header, "descr") != "'<f4'")
        throw FormatError("npy: unsupported dtype " + header_field(header, "descr") +
                          " (expected '<f4')");
    if (header_field(header, "fortran_order") != "False")
        throw FormatError("npy: fortran-order arrays are not supported");

    Array array;
    array.shape = parse_shape(header_field(header, "shape"));

    const size_t count = element_count(array.shape);
    const size_t expected = 10u + hlen + count * 4;
    if (bytes.size() < expected) throw FormatError("npy: truncated data section");
    if (bytes.size() > expected) throw FormatError("npy: trailing bytes after data section");

    array.data.resize(count);
    std::memcpy(array.data.data(), bytes.data() + 10 + hlen, count * 4);
    return array;
}

Array load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("npy::load: cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return decode(bytes);
}

Array from_matrix(const Matrix& m) {
    Array array;
    array.shape = {m.rows(), m.cols()};
    array.data.reserve(m.rows() * m.cols());
    for (double v : m.data()) array.data.push_back(static_cast<float>(v));
    return array;
}

Matrix to_matrix(const Array& array) {
    if (array.shape.size() != 2) throw FormatError("npy: expected a 2-D array");
    Matrix m(array.shape[0], array.shape[1]);
    for (size_t i = 0; i < array.data.size(); ++i) m.data()[i] = array.data[i];
    return m;
}

Array from_latents(const std::vector<LatentVector>& latents) {
    Array array;
    const size_t d = latents.empty() ? 0 : latents.front().size();
    array.shape = {latents.size(), d};
    array.data.reserve(latents.size() * d);
    for (const auto& z : latents) {
        if (z.size() != d) throw InvalidArgument("npy::from_latents: inconsistent dimensions");
        for (double v : z) array.data.push_back(static_cast<float>(v));
    }
    return array;
}

std::vector<LatentVector> to_latents(const Array& array) {
    if (array.shape.size() != 2) throw FormatError("npy: expected a 2-D array");
    std::vector<LatentVector> out(array.shape[0]);
    const size_t d = array.shape[1];
    for (size_t i = 0; i < out.size(); ++i) {
        out[i].resize(d);
        for (size_t j = 0; j < d; ++j) out[i][j] = array.data[i * d + j];
    }
    return out;
}

} // namespace lfs::npy
