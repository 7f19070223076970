#include "vlt/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace vlt {

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts are not supported");

namespace {

class Writer {
public:
    explicit Writer(const std::string& path) : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw FormatError("cannot open '" + path + "' for writing");
    }
    template <typename T>
    void put(T v) {
        out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
    }
    void put_bytes(const void* p, size_t n) { out_.write(static_cast<const char*>(p), n); }
    void finish() {
        out_.flush();
        if (!out_) throw FormatError("write to '" + path_ + "' failed");
    }

private:
    std::string path_;
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::string& path) : path_(path) {
        std::ifstream in(path, std::ios::binary | std::ios::ate);
        if (!in) throw FormatError("cannot open '" + path + "' for reading");
        const auto size = in.tellg();
        in.seekg(0);
        buf_.resize(static_cast<size_t>(size));
        in.read(reinterpret_cast<char*>(buf_.data()), size);
        if (!in) throw FormatError("read from '" + path + "' failed");
    }
    template <typename T>
    T get(const char* what) {
        if (pos_ + sizeof(T) > buf_.size())
            throw FormatError("'" + path_ + "': unexpected end of file reading " + what +
                              " at offset " + std::to_string(pos_));
        T v;
        std::memcpy(&v, buf_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    void expect_magic(const char magic[4]) {
        if (pos_ + 4 > buf_.size())
            throw FormatError("'" + path_ + "': unexpected end of file reading magic at offset " +
                              std::to_string(pos_));
        if (std::memcmp(buf_.data() + pos_, magic, 4) != 0)
            throw FormatError("'" + path_ + "': bad magic at offset " + std::to_string(pos_));
        pos_ += 4;
    }
    size_t offset() const { return pos_; }
    size_t remaining() const { return buf_.size() - pos_; }

private:
    std::string path_;
    std::vector<uint8_t> buf_;
    size_t pos_ = 0;
};

double checked_finite(double v, const char* what, const std::string& path, size_t offset) {
    if (!std::isfinite(v))
        throw FormatError("'" + path + "': non-finite " + std::string(what) + " at offset " +
                          std::to_string(offset));
    return v;
}

}  // namespace

void write_vsin(const std::string& path, const VSinogram& sino) {
    if (sino.n_beta < 2 || sino.n_d < 2 ||
        sino.values.size() != static_cast<size_t>(sino.n_beta) * sino.n_d)
        throw std::domain_error("write_vsin: inconsistent sinogram dimensions");
    Writer w(path);
    w.put_bytes("VSIN", 4);
    w.put<uint32_t>(1);
    w.put<uint8_t>(sino.kind == VKind::longitudinal ? 0 : 1);
    const uint8_t pad[7] = {};
    w.put_bytes(pad, 7);
    w.put<double>(sino.R);
    w.put<double>(sino.theta);
    w.put<uint32_t>(static_cast<uint32_t>(sino.n_beta));
    w.put<uint32_t>(static_cast<uint32_t>(sino.n_d));
    w.put<double>(sino.d_min);
    w.put<double>(sino.d_max);
    w.put_bytes(sino.values.data(), sino.values.size() * sizeof(double));
    w.finish();
}

VSinogram read_vsin(const std::string& path) {
    Reader r(path);
    r.expect_magic("VSIN");
    const uint32_t version = r.get<uint32_t>("version");
    if (version != 1)
        throw FormatError("'" + path + "': unsupported VSIN version " + std::to_string(version) +
                          " at offset 4");
    const uint8_t kind = r.get<uint8_t>("kind");
    if (kind > 1)
        throw FormatError("'" + path + "': bad kind byte at offset 8");
    for (int k = 0; k < 7; ++k) r.get<uint8_t>("padding");

    VSinogram sino;
    sino.kind = kind == 0 ? VKind::longitudinal : VKind::transverse;
    sino.R = checked_finite(r.get<double>("R"), "R", path, r.offset() - 8);
    sino.theta = checked_finite(r.get<double>("theta"), "theta", path, r.offset() - 8);
    const uint32_t n_beta = r.get<uint32_t>("n_beta");
    const uint32_t n_d = r.get<uint32_t>("n_d");
    if (n_beta < 2 || n_d < 2 || static_cast<uint64_t>(n_beta) * n_d > (1u << 30))
        throw FormatError("'" + path + "': implausible grid size at offset 36");
    sino.n_beta = static_cast<int>(n_beta);
    sino.n_d = static_cast<int>(n_d);
    sino.d_min = checked_finite(r.get<double>("d_min"), "d_min", path, r.offset() - 8);
    sino.d_max = checked_finite(r.get<double>("d_max"), "d_max", path, r.offset() - 8);
    sino.values.resize(static_cast<size_t>(n_beta) * n_d);
    for (size_t k = 0; k < sino.values.size(); ++k)
        sino.values[k] = checked_finite(r.get<double>("value"), "value", path, r.offset() - 8);
    if (r.remaining() != 0)
        throw FormatError("'" + path + "': trailing bytes at offset " +
                          std::to_string(r.offset()));
    return sino;
}

void write_vfld(const std::string& path, const VectorField& field) {
    if (!field.is_grid()) throw std::domain_error("write_vfld: field must be a grid");
    const GridSpec& spec = field.f1().grid_spec();
    const auto& v1 = field.f1().grid_values();
    const auto& v2 = field.f2().grid_values();
    Writer w(path);
    w.put_bytes("VFLD", 4);
    w.put<uint32_t>(1);
    w.put<double>(spec.R);
    w.put<uint32_t>(static_cast<uint32_t>(spec.nx));
    w.put<uint32_t>(static_cast<uint32_t>(spec.ny));
    for (size_t k = 0; k < v1.size(); ++k) {
        w.put<double>(v1[k]);
        w.put<double>(v2[k]);
    }
    w.finish();
}

VectorField read_vfld(const std::string& path) {
    Reader r(path);
    r.expect_magic("VFLD");
    const uint32_t version = r.get<uint32_t>("version");
    if (version != 1)
        throw FormatError("'" + path + "': unsupported VFLD version " + std::to_string(version) +
                          " at offset 4");
    const double R = checked_finite(r.get<double>("R"), "R", path, r.offset() - 8);
    if (R <= 0.0) throw FormatError("'" + path + "': nonpositive R at offset 8");
    const uint32_t nx = r.get<uint32_t>("nx");
    const uint32_t ny = r.get<uint32_t>("ny");
    if (nx < 1 || ny < 1 || static_cast<uint64_t>(nx) * ny > (1u << 28))
        throw FormatError("'" + path + "': implausible grid size at offset 16");
    std::vector<double> v1(static_cast<size_t>(nx) * ny);
    std::vector<double> v2(v1.size());
    for (size_t k = 0; k < v1.size(); ++k) {
        v1[k] = checked_finite(r.get<double>("f1 value"), "f1 value", path, r.offset() - 8);
        v2[k] = checked_finite(r.get<double>("f2 value"), "f2 value", path, r.offset() - 8);
    }
    if (r.remaining() != 0)
        throw FormatError("'" + path + "': trailing bytes at offset " +
                          std::to_string(r.offset()));
    const GridSpec spec{static_cast<int>(nx), static_cast<int>(ny), R};
    return {ScalarField::grid(spec, std::move(v1)), ScalarField::grid(spec, std::move(v2))};
}

void write_pgm(const std::string& path, int w, int h, std::span<const double> values) {
    if (w < 1 || h < 1 || values.size() != static_cast<size_t>(w) * h)
        throw std::domain_error("write_pgm: inconsistent dimensions");
    double lo = values[0], hi = values[0];
    for (double v : values) {
        if (!std::isfinite(v)) throw NumericError("write_pgm: non-finite sample");
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    std::vector<uint8_t> pix(values.size());
    if (hi > lo) {
        const double scale = 255.0 / (hi - lo);
        for (size_t k = 0; k < values.size(); ++k)
            pix[k] = static_cast<uint8_t>(std::lround((values[k] - lo) * scale));
    } else {
        std::fill(pix.begin(), pix.end(), uint8_t{128});
    }
    Writer out(path);
    const std::string header = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
    out.put_bytes(header.data(), header.size());
    out.put_bytes(pix.data(), pix.size());
    out.finish();
}

Metrics compare_values(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::domain_error("compare_values: size mismatch");
    double diff2 = 0.0, ref2 = 0.0, max_abs = 0.0;
    for (size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        diff2 += d * d;
        ref2 += b[k] * b[k];
        max_abs = std::max(max_abs, std::abs(d));
    }
    Metrics m;
    m.max_abs = max_abs;
    m.rel_l2 = ref2 > 0.0 ? std::sqrt(diff2 / ref2) : (diff2 > 0.0 ? HUGE_VAL : 0.0);
    return m;
}

}  // namespace vlt
