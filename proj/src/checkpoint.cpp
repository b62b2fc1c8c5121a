#include "acoso/checkpoint.hpp"

#include "acoso/error.hpp"
#include "acoso/io.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>

namespace acoso {

namespace {

constexpr std::string_view kMagic = "ACOSOCKP";

class Writer {
public:
    void bytes(std::string_view s) { out_.append(s); }
    void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) {
            out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
        }
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
        }
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void f64s(const std::vector<double>& vs) {
        for (double v : vs) {
            f64(v);
        }
    }
    std::string take() { return std::move(out_); }
    const std::string& data() const { return out_; }

private:
    std::string out_;
};

class Reader {
public:
    explicit Reader(std::string_view in) : in_(in) {}

    std::string_view bytes(std::size_t n) {
        need(n);
        auto s = in_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::uint8_t u8() { return static_cast<std::uint8_t>(bytes(1)[0]); }
    std::uint32_t u32() {
        auto s = bytes(4);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) {
            v = (v << 8) | static_cast<std::uint8_t>(s[static_cast<std::size_t>(i)]);
        }
        return v;
    }
    std::uint64_t u64() {
        auto s = bytes(8);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) {
            v = (v << 8) | static_cast<std::uint8_t>(s[static_cast<std::size_t>(i)]);
        }
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::vector<double> f64s(std::uint64_t n) {
        if (n > remaining() / 8) {
            throw CheckpointError("checkpoint truncated");
        }
        std::vector<double> out(static_cast<std::size_t>(n));
        for (auto& v : out) {
            v = f64();
        }
        return out;
    }
    /// Guards counts read from the file before they size allocations.
    std::size_t count(std::uint64_t limit_elements) {
        const auto n = u64();
        if (n > limit_elements) {
            throw CheckpointError("checkpoint field out of range");
        }
        return static_cast<std::size_t>(n);
    }
    std::size_t remaining() const { return in_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (remaining() < n) {
            throw CheckpointError("checkpoint truncated");
        }
    }
    std::string_view in_;
    std::size_t pos_ = 0;
};

std::uint32_t crc32_of(std::string_view data) {
    uLong crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size()));
    return static_cast<std::uint32_t>(crc);
}

}  // namespace

std::string encode_checkpoint(const Checkpoint& cp) {
    const auto& p = cp.params;
    const auto& cfg = p.config;
    if (!p.embedding) {
        throw Error("checkpoint: model has no embedding matrix");
    }
    Writer w;
    w.bytes(kMagic);
    w.u32(kCheckpointVersion);

    w.u64(cfg.max_len);
    w.u64(cfg.dim);
    w.u64(cfg.filter_widths.size());
    for (auto width : cfg.filter_widths) {
        w.u64(width);
    }
    w.u64(cfg.filters_per_width);
    w.f64(cfg.learning_rate);
    w.u8(cfg.fine_tune_embeddings ? 1 : 0);
    w.u64(cfg.seed);

    w.u64(cp.iteration);
    w.u64(cp.epoch);
    w.f64(cp.train_accuracy);
    w.f64(cp.train_loss);

    const auto& emb = *p.embedding;
    w.u64(emb.rows);
    w.u64(emb.dim);
    w.f64(emb.coverage);
    w.f64s(emb.values);

    for (const auto& bank : p.conv) {
        w.u64(bank.width);
        w.f64s(bank.weights);
        w.f64s(bank.bias);
    }
    w.f64s(p.dense_weights);
    w.f64(p.dense_bias);

    const auto crc = crc32_of(w.data());
    w.u32(crc);
    return w.take();
}

Checkpoint decode_checkpoint(std::string_view bytes) {
    if (bytes.size() < kMagic.size() + 8 || bytes.substr(0, kMagic.size()) != kMagic) {
        throw CheckpointError("not a checkpoint file (bad magic)");
    }
    const auto body = bytes.substr(0, bytes.size() - 4);
    Reader tail(bytes.substr(bytes.size() - 4));
    if (tail.u32() != crc32_of(body)) {
        throw CheckpointError("checkpoint checksum mismatch");
    }

    Reader r(body);
    r.bytes(kMagic.size());
    const auto version = r.u32();
    if (version != kCheckpointVersion) {
        throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
    }

    constexpr std::uint64_t kSane = 1ULL << 32;
    Checkpoint cp;
    auto& cfg = cp.params.config;
    cfg.max_len = r.count(kSane);
    cfg.dim = r.count(kSane);
    cfg.filter_widths.resize(r.count(1024));
    for (auto& width : cfg.filter_widths) {
        width = r.count(kSane);
    }
    cfg.filters_per_width = r.count(kSane);
    cfg.learning_rate = r.f64();
    cfg.fine_tune_embeddings = r.u8() != 0;
    cfg.seed = r.u64();
    try {
        cfg.validate();
    } catch (const Error& e) {
        throw CheckpointError(std::string("checkpoint config invalid: ") + e.what());
    }

    cp.iteration = r.count(kSane);
    cp.epoch = r.count(kSane);
    cp.train_accuracy = r.f64();
    cp.train_loss = r.f64();

    auto emb = std::make_shared<EmbeddingMatrix>();
    emb->rows = r.count(kSane);
    emb->dim = r.count(kSane);
    if (emb->dim != cfg.dim || emb->rows < 2) {
        throw CheckpointError("checkpoint embedding shape inconsistent with config");
    }
    emb->coverage = r.f64();
    emb->values = r.f64s(static_cast<std::uint64_t>(emb->rows) * emb->dim);
    cp.params.embedding = std::move(emb);

    for (auto width : cfg.filter_widths) {
        ConvBank bank;
        bank.width = r.count(kSane);
        if (bank.width != width) {
            throw CheckpointError("checkpoint conv bank width mismatch");
        }
        bank.weights = r.f64s(static_cast<std::uint64_t>(cfg.filters_per_width) * width * cfg.dim);
        bank.bias = r.f64s(cfg.filters_per_width);
        cp.params.conv.push_back(std::move(bank));
    }
    cp.params.dense_weights = r.f64s(cfg.feature_count());
    cp.params.dense_bias = r.f64();
    if (r.remaining() != 0) {
        throw CheckpointError("checkpoint has trailing bytes");
    }
    return cp;
}

void save_checkpoint(const Checkpoint& cp, const std::filesystem::path& path) {
    io::write_file_atomic(path, encode_checkpoint(cp));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    return decode_checkpoint(io::read_file(path));
}

}  // namespace acoso
