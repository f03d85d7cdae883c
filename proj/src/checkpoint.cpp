#include "sigclass/checkpoint.hpp"

#include "sigclass/byteio.hpp"

#include <cstring>
#include <fstream>

namespace sigclass {

namespace {

constexpr char kMagic[8] = {'S', 'I', 'G', 'C', 'L', 'S', 'C', 'K'};

using byteio::get_f64;
using byteio::get_le;
using byteio::put_f64;
using byteio::put_le;

std::uint32_t read_u32(std::istream& is, const char* what) {
    std::uint32_t v = 0;
    if (!get_le(is, v)) throw ParseError(std::string("checkpoint: truncated while reading ") + what);
    return v;
}

} // namespace

void write_checkpoint(std::ostream& os, const Model& model) {
    const auto& p = model.params;
    os.write(kMagic, sizeof(kMagic));
    put_le<std::uint32_t>(os, kCheckpointVersion);
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(p.input_dim()));
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(p.layers[0].outputs()));
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(p.num_classes()));
    put_le<std::uint32_t>(os, model.normalize_rows ? 1u : 0u);
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(model.mask.size()));
    for (int b : model.mask.kept) put_le<std::uint32_t>(os, static_cast<std::uint32_t>(b));
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(model.labels.size()));
    for (const auto& l : model.labels) {
        put_le<std::uint32_t>(os, static_cast<std::uint32_t>(l.size()));
        os.write(l.data(), static_cast<std::streamsize>(l.size()));
    }
    for (const auto& layer : p.layers) {
        for (Eigen::Index i = 0; i < layer.weight.rows(); ++i)
            for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) put_f64(os, layer.weight(i, j));
        for (Eigen::Index i = 0; i < layer.bias.size(); ++i) put_f64(os, layer.bias[i]);
    }
}

Model read_checkpoint(std::istream& is) {
    char magic[sizeof(kMagic)];
    if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw ParseError("checkpoint: bad magic");
    const auto version = read_u32(is, "version");
    if (version != kCheckpointVersion)
        throw ParseError("checkpoint: unsupported version " + std::to_string(version));
    const auto d = read_u32(is, "input size");
    const auto h = read_u32(is, "hidden size");
    const auto c = read_u32(is, "class count");
    if (d == 0 || h == 0 || c == 0) throw ParseError("checkpoint: zero layer size");

    Model m;
    m.normalize_rows = read_u32(is, "flags") != 0;
    const auto n_mask = read_u32(is, "mask size");
    if (n_mask != d) throw ParseError("checkpoint: mask size does not match input size");
    for (std::uint32_t i = 0; i < n_mask; ++i) m.mask.kept.push_back(static_cast<int>(read_u32(is, "mask")));
    const auto n_labels = read_u32(is, "label count");
    if (n_labels != c) throw ParseError("checkpoint: label count does not match output size");
    for (std::uint32_t i = 0; i < n_labels; ++i) {
        const auto len = read_u32(is, "label length");
        std::string s(len, '\0');
        if (!is.read(s.data(), len)) throw ParseError("checkpoint: truncated label");
        m.labels.push_back(std::move(s));
    }
    const std::array<std::pair<std::uint32_t, std::uint32_t>, 3> shapes{{{h, d}, {h, h}, {c, h}}};
    for (std::size_t l = 0; l < 3; ++l) {
        auto& layer = m.params.layers[l];
        layer.weight.resize(shapes[l].first, shapes[l].second);
        layer.bias.resize(shapes[l].first);
        for (Eigen::Index i = 0; i < layer.weight.rows(); ++i)
            for (Eigen::Index j = 0; j < layer.weight.cols(); ++j)
                if (!get_f64(is, layer.weight(i, j))) throw ParseError("checkpoint: truncated weights");
        for (Eigen::Index i = 0; i < layer.bias.size(); ++i)
            if (!get_f64(is, layer.bias[i])) throw ParseError("checkpoint: truncated biases");
    }
    return m;
}

void save_checkpoint(const std::filesystem::path& path, const Model& model) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write checkpoint " + path.string());
    write_checkpoint(os, model);
    if (!os) throw ConfigError("failed writing checkpoint " + path.string());
}

Model load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open checkpoint " + path.string());
    return read_checkpoint(is);
}

} // namespace sigclass
