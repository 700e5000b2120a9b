#pragma once

// Bundle file layout, all integers and floats little-endian:
//
//   offset  size  field
//   0       8     magic "AGWXMDL\0"
//   8       4     u32 format version (1)
//   12      8     u64 payload length P
//   20      P     payload
//   20+P    8     u64 FNV-1a 64 over bytes [0, 20+P)
//
// Payload, in order (str = u32 length + UTF-8 bytes, f64 = IEEE-754 binary64):
//   str station
//   topology: i32 input_features, i32 targets, i32 recurrent_layers, i32 units,
//             u8 bidirectional, u32 dense count, i32 dense units...
//   u64 seed
//   u32 feature count, str names...; u32 target count, str names...
//   u32 stats count, then per feature: str name, f64 mean, f64 stddev
//   train config: f64 learning_rate, i32 epochs, i32 patience, u64 batch_size,
//                 f64 l1, f64 l2, u64 seed, u8 shuffle, f64 min_delta
//   window: i64 input_width, i64 label_width, i64 shift
//   u32 tensor count, then per tensor: str name, u64 rows, u64 cols,
//             rows*cols f64 in column-major order

#include "agrowx/error.hpp"
#include "agrowx/nn/model.hpp"
#include "agrowx/normalization.hpp"
#include "agrowx/text.hpp"
#include "agrowx/training.hpp"
#include "agrowx/windowing.hpp"

#include <array>
#include <bit>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

namespace agrowx::store {

inline constexpr std::array<char, 8> kMagic = {'A', 'G', 'W', 'X', 'M', 'D', 'L', '\0'};
inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::size_t kHeaderSize = 20;

struct ModelBundle {
    std::string station;
    nn::Model<double> model;
    TrainConfig config;
    WindowSpec window;
};

inline std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace detail {

class Writer {
public:
    template <class T>
    void uint(T v) {
        for (std::size_t i = 0; i < sizeof(T); ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void i32(std::int32_t v) { uint(static_cast<std::uint32_t>(v)); }
    void i64(std::int64_t v) { uint(static_cast<std::uint64_t>(v)); }
    void u8(bool v) { out_.push_back(v ? 1 : 0); }
    void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }
    void str(std::string_view s) {
        uint(static_cast<std::uint32_t>(s.size()));
        out_.append(s);
    }
    void strings(const std::vector<std::string>& v) {
        uint(static_cast<std::uint32_t>(v.size()));
        for (const auto& s : v) str(s);
    }
    void raw(std::string_view s) { out_.append(s); }
    [[nodiscard]] std::string& bytes() { return out_; }

private:
    std::string out_;
};

class Reader {
public:
    explicit Reader(std::string_view in) : in_(in) {}

    template <class T>
    T uint() {
        need(sizeof(T));
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i)
            v |= static_cast<T>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
        pos_ += sizeof(T);
        return v;
    }
    std::int32_t i32() { return static_cast<std::int32_t>(uint<std::uint32_t>()); }
    std::int64_t i64() { return static_cast<std::int64_t>(uint<std::uint64_t>()); }
    bool u8() {
        const auto v = uint<std::uint8_t>();
        if (v > 1) fail(ErrorKind::CorruptFile, "invalid boolean byte");
        return v == 1;
    }
    double f64() { return std::bit_cast<double>(uint<std::uint64_t>()); }
    std::string str() {
        const auto n = uint<std::uint32_t>();
        need(n);
        std::string s(in_.substr(pos_, n));
        pos_ += n;
        return s;
    }
    std::vector<std::string> strings() {
        const auto n = uint<std::uint32_t>();
        std::vector<std::string> v;
        for (std::uint32_t i = 0; i < n; ++i) v.push_back(str());
        return v;
    }
    [[nodiscard]] bool done() const { return pos_ == in_.size(); }

private:
    void need(std::size_t n) const {
        if (in_.size() - pos_ < n) fail(ErrorKind::CorruptFile, "model bundle is truncated");
    }

    std::string_view in_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string serialize(const ModelBundle& b) {
    detail::Writer p;
    const auto& m = b.model;
    const auto& t = m.topology;
    p.str(b.station);
    p.i32(t.input_features);
    p.i32(t.targets);
    p.i32(t.recurrent_layers);
    p.i32(t.units);
    p.u8(t.bidirectional);
    p.uint(static_cast<std::uint32_t>(t.dense_units.size()));
    for (int u : t.dense_units) p.i32(u);
    p.uint(m.seed);
    p.strings(m.feature_names);
    p.strings(m.target_names);
    p.uint(static_cast<std::uint32_t>(m.stats.size()));
    for (std::size_t i = 0; i < m.stats.size(); ++i) {
        p.str(m.stats.features[i]);
        p.f64(m.stats.mean[i]);
        p.f64(m.stats.stddev[i]);
    }
    const auto& c = b.config;
    p.f64(c.learning_rate);
    p.i32(c.epochs);
    p.i32(c.patience);
    p.uint(static_cast<std::uint64_t>(c.batch_size));
    p.f64(c.l1);
    p.f64(c.l2);
    p.uint(c.seed);
    p.u8(c.shuffle);
    p.f64(c.min_delta);
    p.i64(b.window.input_width);
    p.i64(b.window.label_width);
    p.i64(b.window.shift);
    auto tensors = const_cast<nn::Params<double>&>(m.params).tensors();
    p.uint(static_cast<std::uint32_t>(tensors.size()));
    for (const auto& tr : tensors) {
        p.str(tr.name);
        p.uint(static_cast<std::uint64_t>(tr.rows));
        p.uint(static_cast<std::uint64_t>(tr.cols));
        for (double v : tr.values) p.f64(v);
    }

    detail::Writer out;
    out.raw(std::string_view(kMagic.data(), kMagic.size()));
    out.uint(kFormatVersion);
    out.uint(static_cast<std::uint64_t>(p.bytes().size()));
    out.raw(p.bytes());
    out.uint(fnv1a(out.bytes()));
    return std::move(out.bytes());
}

/// Header fields readable without decoding the payload.
struct BundleHeader {
    std::uint32_t version = 0;
    std::uint64_t payload_size = 0;
    std::uint64_t checksum = 0;
};

inline BundleHeader check_envelope(std::string_view bytes) {
    if (bytes.size() < kHeaderSize + 8 || std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0)
        fail(ErrorKind::CorruptFile, "not a model bundle");
    detail::Reader r(bytes.substr(kMagic.size()));
    BundleHeader h;
    h.version = r.uint<std::uint32_t>();
    if (h.version != kFormatVersion)
        fail(ErrorKind::UnsupportedVersion, "model bundle version " + std::to_string(h.version) + " is not supported");
    h.payload_size = r.uint<std::uint64_t>();
    if (h.payload_size != bytes.size() - kHeaderSize - 8)
        fail(ErrorKind::CorruptFile, "model bundle size does not match its header");
    detail::Reader tail(bytes.substr(bytes.size() - 8));
    h.checksum = tail.uint<std::uint64_t>();
    if (h.checksum != fnv1a(bytes.substr(0, bytes.size() - 8)))
        fail(ErrorKind::ChecksumMismatch, "model bundle checksum mismatch");
    return h;
}

inline ModelBundle deserialize(std::string_view bytes) {
    const auto h = check_envelope(bytes);
    detail::Reader r(bytes.substr(kHeaderSize, h.payload_size));
    ModelBundle b;
    b.station = r.str();
    auto& m = b.model;
    auto& t = m.topology;
    t.input_features = r.i32();
    t.targets = r.i32();
    t.recurrent_layers = r.i32();
    t.units = r.i32();
    t.bidirectional = r.u8();
    const auto dense = r.uint<std::uint32_t>();
    if (dense > 64) fail(ErrorKind::CorruptFile, "implausible dense layer count");
    t.dense_units.clear();
    for (std::uint32_t i = 0; i < dense; ++i) {
        t.dense_units.push_back(r.i32());
        if (t.dense_units.back() < 1) fail(ErrorKind::CorruptFile, "invalid dense width in model bundle");
    }
    if (t.input_features < 1 || t.targets < 1 || t.recurrent_layers < 0 || t.units < 1)
        fail(ErrorKind::CorruptFile, "invalid topology in model bundle");
    m.seed = r.uint<std::uint64_t>();
    m.feature_names = r.strings();
    m.target_names = r.strings();
    const auto ns = r.uint<std::uint32_t>();
    for (std::uint32_t i = 0; i < ns; ++i) {
        m.stats.features.push_back(r.str());
        m.stats.mean.push_back(r.f64());
        m.stats.stddev.push_back(r.f64());
    }
    auto& c = b.config;
    c.learning_rate = r.f64();
    c.epochs = r.i32();
    c.patience = r.i32();
    c.batch_size = static_cast<std::size_t>(r.uint<std::uint64_t>());
    c.l1 = r.f64();
    c.l2 = r.f64();
    c.seed = r.uint<std::uint64_t>();
    c.shuffle = r.u8();
    c.min_delta = r.f64();
    b.window.input_width = r.i64();
    b.window.label_width = r.i64();
    b.window.shift = r.i64();

    m.params = nn::Params<double>::zeros(t);
    auto tensors = m.params.tensors();
    const auto count = r.uint<std::uint32_t>();
    if (count != tensors.size()) fail(ErrorKind::CorruptFile, "tensor count does not match topology");
    for (auto& tr : tensors) {
        const auto name = r.str();
        const auto rows = r.uint<std::uint64_t>();
        const auto cols = r.uint<std::uint64_t>();
        if (name != tr.name || rows != static_cast<std::uint64_t>(tr.rows) || cols != static_cast<std::uint64_t>(tr.cols))
            fail(ErrorKind::CorruptFile, "unexpected tensor '" + name + "' in model bundle");
        for (auto& v : tr.values) v = r.f64();
    }
    if (!r.done()) fail(ErrorKind::CorruptFile, "trailing bytes in model bundle payload");
    return b;
}

struct SaveReceipt {
    std::string path;
    std::size_t bytes = 0;
    std::uint64_t checksum = 0;
};

inline SaveReceipt save(const ModelBundle& b, const std::string& path) {
    const auto bytes = serialize(b);
    text::write_file(path, bytes);
    return {path, bytes.size(), fnv1a(std::string_view(bytes).substr(0, bytes.size() - 8))};
}

inline ModelBundle load(const std::string& path) {
    std::string bytes;
    try {
        bytes = text::read_file(path);
    } catch (const Error&) {
        fail(ErrorKind::MissingArtifact, "model bundle not found: " + path);
    }
    return deserialize(bytes);
}

/// One bundle per station, named by station id.
inline std::string bundle_path(const std::string& dir, const std::string& station) {
    std::string file;
    for (char c : station) file.push_back((std::isalnum(static_cast<unsigned char>(c)) || c == '-') ? c : '_');
    return dir + "/" + file + ".agwx";
}

inline std::string checksum_hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace agrowx::store
