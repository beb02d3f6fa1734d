#include "dualband/model_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "dualband/csv_io.hpp"
#include "dualband/numerics.hpp"

namespace dualband {

namespace {

constexpr char kMagic[8] = {'D', 'B', 'M', 'O', 'D', 'E', 'L', '1'};

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xff);
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out += static_cast<char>((v >> (8 * i)) & 0xff);
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

struct ByteReader {
    const std::string& path;
    std::string data;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > data.size()) throw std::runtime_error(path + ": truncated model file");
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data[pos + i])) << (8 * i);
        pos += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
};

}  // namespace

void save_model(const std::string& path, const TrainedModel& model) {
    std::string out(kMagic, sizeof(kMagic));
    out.reserve(4096);
    put_u32(out, static_cast<std::uint32_t>(model.spec.kind));
    const auto& layout = model.spec.hidden_layout;
    const bool has_hidden = model.spec.kind == ModelKind::nn;
    put_u32(out, has_hidden ? static_cast<std::uint32_t>(layout.size()) : 0u);
    if (has_hidden)
        for (int w : layout) put_u32(out, static_cast<std::uint32_t>(w));
    put_f64(out, model.spec.alpha);
    put_u64(out, model.spec.seed);
    put_f64(out, model.gamma_l);
    const Scaler& sc = model.scaler;
    if (sc.features.size() != sc.offset.size() || sc.features.size() != sc.scale.size() ||
        sc.features.size() != sc.use_log10.size())
        throw std::invalid_argument("save_model: inconsistent scaler");
    put_u32(out, static_cast<std::uint32_t>(sc.features.size()));
    for (std::size_t i = 0; i < sc.features.size(); ++i) {
        put_u32(out, static_cast<std::uint32_t>(sc.features[i]));
        put_u32(out, sc.use_log10[i] ? 1u : 0u);
        put_f64(out, sc.offset[i]);
        put_f64(out, sc.scale[i]);
    }
    put_u32(out, static_cast<std::uint32_t>(model.params.w.size()));
    for (std::size_t l = 0; l < model.params.w.size(); ++l) {
        const Eigen::MatrixXd& w = model.params.w[l];
        const Eigen::VectorXd& b = model.params.b[l];
        put_u64(out, static_cast<std::uint64_t>(w.rows()));
        put_u64(out, static_cast<std::uint64_t>(w.cols()));
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) put_f64(out, w(r, c));
        put_u64(out, static_cast<std::uint64_t>(b.size()));
        for (Eigen::Index r = 0; r < b.size(); ++r) put_f64(out, b(r));
    }
    write_file_atomic(path, out);
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    ByteReader r{path, std::string(std::istreambuf_iterator<char>(in), {}), 0};
    r.need(sizeof(kMagic));
    if (std::memcmp(r.data.data(), kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error(path + ": not a model file (bad magic)");
    r.pos = sizeof(kMagic);
    TrainedModel model;
    const std::uint32_t kind = r.u32();
    if (kind > 2) throw std::runtime_error(path + ": unknown model kind " + std::to_string(kind));
    model.spec.kind = static_cast<ModelKind>(kind);
    const std::uint32_t n_hidden = r.u32();
    if (n_hidden > 4) throw std::runtime_error(path + ": too many hidden layers");
    model.spec.hidden_layout.clear();
    for (std::uint32_t i = 0; i < n_hidden; ++i)
        model.spec.hidden_layout.push_back(static_cast<int>(r.u32()));
    model.spec.alpha = r.f64();
    model.spec.seed = r.u64();
    model.gamma_l = r.f64();
    const std::uint32_t n_features = r.u32();
    if (n_features == 0 || n_features > static_cast<std::uint32_t>(kFeatureCount))
        throw std::runtime_error(path + ": invalid feature count");
    for (std::uint32_t i = 0; i < n_features; ++i) {
        const std::uint32_t id = r.u32();
        if (id >= static_cast<std::uint32_t>(kFeatureCount))
            throw std::runtime_error(path + ": invalid feature id " + std::to_string(id));
        model.scaler.features.push_back(static_cast<Feature>(id));
        model.scaler.use_log10.push_back(r.u32() != 0);
        model.scaler.offset.push_back(r.f64());
        model.scaler.scale.push_back(r.f64());
    }
    const std::uint32_t n_layers = r.u32();
    if (n_layers == 0 || n_layers > 5) throw std::runtime_error(path + ": invalid layer count");
    Eigen::Index prev = static_cast<Eigen::Index>(n_features);
    for (std::uint32_t l = 0; l < n_layers; ++l) {
        const std::uint64_t rows = r.u64();
        const std::uint64_t cols = r.u64();
        if (rows != static_cast<std::uint64_t>(prev) || cols == 0 || rows * cols > (1u << 24))
            throw std::runtime_error(path + ": inconsistent layer shape at layer " + std::to_string(l));
        Eigen::MatrixXd w(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (Eigen::Index rr = 0; rr < w.rows(); ++rr)
            for (Eigen::Index cc = 0; cc < w.cols(); ++cc) w(rr, cc) = r.f64();
        const std::uint64_t blen = r.u64();
        if (blen != cols) throw std::runtime_error(path + ": bias length mismatch at layer " + std::to_string(l));
        Eigen::VectorXd b(static_cast<Eigen::Index>(blen));
        for (Eigen::Index rr = 0; rr < b.size(); ++rr) b(rr) = r.f64();
        model.params.w.push_back(std::move(w));
        model.params.b.push_back(std::move(b));
        prev = static_cast<Eigen::Index>(cols);
    }
    if (prev != 1) throw std::runtime_error(path + ": final layer must have one output");
    if (r.pos != r.data.size()) throw std::runtime_error(path + ": trailing bytes in model file");
    return model;
}

std::string describe_model(const TrainedModel& model) {
    std::string s;
    s += std::string("kind: ") + model_kind_name(model.spec.kind) + "\n";
    std::string layout;
    for (std::size_t i = 0; i < model.params.w.size(); ++i) {
        if (!layout.empty()) layout += " -> ";
        layout += std::to_string(model.params.w[i].rows()) + "x" + std::to_string(model.params.w[i].cols());
    }
    s += "layers: " + layout + "\n";
    s += "alpha: " + format_double(model.spec.alpha) + "\n";
    s += "gamma_l: " + format_double(model.gamma_l) + "\n";
    s += "features:";
    for (std::size_t i = 0; i < model.scaler.features.size(); ++i) {
        s += std::string(" ") + feature_name(model.scaler.features[i]);
        if (model.scaler.use_log10[i]) s += "(log10)";
    }
    s += "\n";
    s += "scaler offsets:";
    for (double v : model.scaler.offset) s += " " + format_double(v);
    s += "\nscaler scales:";
    for (double v : model.scaler.scale) s += " " + format_double(v);
    s += "\n";
    return s;
}

}  // namespace dualband
