#include "phaseloom/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>

#include "phaseloom/errors.hpp"

namespace phaseloom {

namespace {

constexpr char kMagic[4] = {'C', 'X', 'F', '1'};

void append_u64_le(std::string& buf, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) buf.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
}

void append_f64_le(std::string& buf, double v) {
    static_assert(sizeof(double) == 8);
    char raw[8];
    std::memcpy(raw, &v, 8);  // host is little endian
    buf.append(raw, 8);
}

std::string header(std::uint8_t code, const std::vector<std::size_t>& shape) {
    std::string buf(kMagic, 4);
    buf.push_back(static_cast<char>(code));
    buf.push_back(static_cast<char>(shape.size()));
    for (std::size_t d : shape) append_u64_le(buf, d);
    return buf;
}

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

std::string read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return bytes;
}

struct ParsedHeader {
    std::uint8_t code;
    std::vector<std::size_t> shape;
    std::size_t payload_offset;
    std::size_t element_count;
};

ParsedHeader parse_header(const std::string& bytes, const std::filesystem::path& path) {
    if (bytes.size() < 6 || std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw IoError("not a CXF1 file: " + path.string());
    ParsedHeader h;
    h.code = static_cast<std::uint8_t>(bytes[4]);
    const std::size_t ndim = static_cast<std::uint8_t>(bytes[5]);
    if (h.code > 1) throw IoError("unknown CXF1 element code in " + path.string());
    if (bytes.size() < 6 + 8 * ndim) throw IoError("truncated CXF1 header: " + path.string());
    h.shape.resize(ndim);
    h.element_count = ndim == 0 ? 0 : 1;
    for (std::size_t k = 0; k < ndim; ++k) {
        std::uint64_t d = 0;
        for (int b = 7; b >= 0; --b)
            d = (d << 8) | static_cast<std::uint8_t>(bytes[6 + 8 * k + b]);
        h.shape[k] = d;
        h.element_count *= d;
    }
    h.payload_offset = 6 + 8 * ndim;
    return h;
}

double read_f64_le(const char* p) {
    double v;
    std::memcpy(&v, p, 8);
    return v;
}

}  // namespace

void write_cxf(const std::filesystem::path& path, const RealField& field) {
    std::string buf = header(0, field.shape);
    buf.reserve(buf.size() + 8 * field.size());
    for (double v : field.data) append_f64_le(buf, v);
    write_bytes(path, buf);
}

void write_cxf(const std::filesystem::path& path, const ComplexField& field) {
    std::string buf = header(1, field.shape);
    buf.reserve(buf.size() + 16 * field.size());
    for (const cdouble& v : field.data) {
        append_f64_le(buf, v.real());
        append_f64_le(buf, v.imag());
    }
    write_bytes(path, buf);
}

RealField read_cxf_real(const std::filesystem::path& path) {
    const std::string bytes = read_bytes(path);
    const ParsedHeader h = parse_header(bytes, path);
    if (h.code != 0) throw IoError("expected a real field in " + path.string());
    if (bytes.size() != h.payload_offset + 8 * h.element_count)
        throw IoError("CXF1 payload size mismatch in " + path.string());
    RealField field(h.shape);
    for (std::size_t i = 0; i < h.element_count; ++i)
        field[i] = read_f64_le(bytes.data() + h.payload_offset + 8 * i);
    if (!all_finite(field)) throw IoError("non-finite values in " + path.string());
    return field;
}

ComplexField read_cxf_complex(const std::filesystem::path& path) {
    const std::string bytes = read_bytes(path);
    const ParsedHeader h = parse_header(bytes, path);
    if (h.code != 1) throw IoError("expected a complex field in " + path.string());
    if (bytes.size() != h.payload_offset + 16 * h.element_count)
        throw IoError("CXF1 payload size mismatch in " + path.string());
    ComplexField field(h.shape);
    for (std::size_t i = 0; i < h.element_count; ++i) {
        const char* p = bytes.data() + h.payload_offset + 16 * i;
        field[i] = cdouble(read_f64_le(p), read_f64_le(p + 8));
    }
    if (!all_finite(field)) throw IoError("non-finite values in " + path.string());
    return field;
}

std::string format_double(double v) {
    char buf[64];
    const auto result = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, result.ptr);
}

void write_trace_csv(const std::filesystem::path& path, const Trace& trace) {
    std::string out = "iter,dist_opt,step_norm,rms,elapsed_s\n";
    for (const TraceRow& row : trace) {
        out += std::to_string(row.iter);
        out += ',';
        out += format_double(row.dist_opt);
        out += ',';
        out += format_double(row.step_norm);
        out += ',';
        if (row.rms.has_value()) out += format_double(*row.rms);
        out += ',';
        out += format_double(row.elapsed_s);
        out += '\n';
    }
    write_bytes(path, out);
}

void write_pgm16(const std::filesystem::path& path, const RealField& field,
                 std::size_t rows, std::size_t cols) {
    if (rows * cols != field.size()) throw DimensionError("write_pgm16: shape mismatch");
    double lo = field.data.empty() ? 0.0 : field[0];
    double hi = lo;
    for (double v : field.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi > lo ? hi - lo : 1.0;
    std::string buf = "P5\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n65535\n";
    for (double v : field.data) {
        const auto q = static_cast<std::uint16_t>(std::lround((v - lo) / span * 65535.0));
        buf.push_back(static_cast<char>(q >> 8));  // big-endian per PGM
        buf.push_back(static_cast<char>(q & 0xFF));
    }
    write_bytes(path, buf);
}

}  // namespace phaseloom
