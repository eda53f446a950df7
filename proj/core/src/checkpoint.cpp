#include "dubline/checkpoint.hpp"

#include <zlib.h>

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "dubline/error.hpp"
#include "dubline/json_io.hpp"

namespace dubline {

namespace {

constexpr std::array<char, 4> kMagic{'D', 'U', 'B', 'L'};
static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");
static_assert(sizeof(float) == 4);

void put_u32(std::string& out, std::uint32_t v) {
    char bytes[4];
    std::memcpy(bytes, &v, 4);
    out.append(bytes, 4);
}

std::uint32_t get_u32(const std::string& in, std::size_t offset) {
    std::uint32_t v = 0;
    std::memcpy(&v, in.data() + offset, 4);
    return v;
}

std::uint32_t crc_of(const std::string& bytes, std::size_t length) {
    return static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(length)));
}

Json conv_shape(const ConvLayerWeights& w) {
    return Json::array({w.out_channels, w.in_channels, w.kernel_h, w.kernel_w});
}

ConvLayerWeights read_conv_shape(const Json& j, const std::string& path) {
    std::vector<std::size_t> shape;
    read_value(j, path, shape);
    if (shape.size() != 4) throw FormatError(path + ": expected [out, in, kh, kw]");
    ConvLayerWeights w;
    w.out_channels = shape[0];
    w.in_channels = shape[1];
    w.kernel_h = shape[2];
    w.kernel_w = shape[3];
    // Cap allocation before trusting the header.
    if (w.out_channels * w.in_channels * w.kernel_h * w.kernel_w > (1u << 24)) {
        throw FormatError(path + ": implausible tensor size");
    }
    w.kernel.assign(w.out_channels * w.in_channels * w.kernel_h * w.kernel_w, 0.0f);
    w.bias.assign(w.out_channels, 0.0f);
    return w;
}

Json header_of(const UnfoldedModel& model) {
    Json layers = Json::array();
    for (const auto& layer : model.layers) {
        layers.push_back(Json{{"conv1", conv_shape(layer.conv1)},
                              {"conv2", conv_shape(layer.conv2)},
                              {"conv3", conv_shape(layer.conv3)},
                              {"leaky_slope", layer.leaky_slope},
                              {"gamma", layer.gamma},
                              {"threshold", layer.threshold}});
    }
    return Json{{"operator", model.operator_spec},
                {"layers", std::move(layers)},
                {"parameter_count", model.parameter_count()}};
}

UnfoldedModel model_from_header(const Json& header) {
    UnfoldedModel model;
    std::vector<Json> layers;
    std::size_t parameter_count = 0;
    ObjectReader(header, "$")
        .required("operator", model.operator_spec)
        .required("layers", layers)
        .required("parameter_count", parameter_count)
        .finish();
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const std::string path = "$.layers[" + std::to_string(i) + "]";
        const Json& j = layers[i];
        UnfoldedLayer layer;
        Json c1, c2, c3;
        ObjectReader(j, path)
            .required("conv1", c1)
            .required("conv2", c2)
            .required("conv3", c3)
            .required("leaky_slope", layer.leaky_slope)
            .required("gamma", layer.gamma)
            .required("threshold", layer.threshold)
            .finish();
        layer.conv1 = read_conv_shape(c1, path + ".conv1");
        layer.conv2 = read_conv_shape(c2, path + ".conv2");
        layer.conv3 = read_conv_shape(c3, path + ".conv3");
        model.layers.push_back(std::move(layer));
    }
    if (model.parameter_count() != parameter_count) {
        throw FormatError("parameter_count does not match the layer shapes");
    }
    return model;
}

}  // namespace

std::string serialize_checkpoint(const UnfoldedModel& model) {
    model.validate();
    const std::string header = header_of(model).dump();
    std::string out(kMagic.begin(), kMagic.end());
    put_u32(out, model.version);
    put_u32(out, static_cast<std::uint32_t>(header.size()));
    out += header;
    for (auto tensor : model.parameters()) {
        out.append(reinterpret_cast<const char*>(tensor.data()), tensor.size_bytes());
    }
    put_u32(out, crc_of(out, out.size()));
    return out;
}

UnfoldedModel deserialize_checkpoint(const std::string& bytes) {
    if (bytes.size() < 16 || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
        throw FormatError("not a checkpoint file");
    }
    const std::uint32_t stored_crc = get_u32(bytes, bytes.size() - 4);
    if (crc_of(bytes, bytes.size() - 4) != stored_crc) throw FormatError("checkpoint CRC mismatch");
    const std::uint32_t version = get_u32(bytes, 4);
    if (version != UnfoldedModel::kFormatVersion) {
        throw FormatError("unsupported checkpoint version " + std::to_string(version));
    }
    const std::uint32_t header_len = get_u32(bytes, 8);
    if (12 + static_cast<std::size_t>(header_len) + 4 > bytes.size()) {
        throw FormatError("checkpoint header overruns the file");
    }
    Json header;
    try {
        header = Json::parse(bytes.substr(12, header_len));
    } catch (const Json::parse_error& e) {
        throw FormatError(std::string("checkpoint header: ") + e.what());
    }
    UnfoldedModel model;
    try {
        model = model_from_header(header);
    } catch (const InvalidArgument& e) {
        throw FormatError(std::string("checkpoint header: ") + e.what());
    }
    model.version = version;

    std::size_t offset = 12 + header_len;
    const std::size_t payload = model.parameter_count() * sizeof(float);
    if (offset + payload + 4 != bytes.size()) throw FormatError("checkpoint payload size mismatch");
    for (auto tensor : model.parameters()) {
        std::memcpy(tensor.data(), bytes.data() + offset, tensor.size_bytes());
        offset += tensor.size_bytes();
    }
    try {
        model.validate();
    } catch (const Error& e) {
        throw FormatError(std::string("invalid checkpoint: ") + e.what());
    }
    return model;
}

void save_checkpoint(const UnfoldedModel& model, const std::filesystem::path& path) {
    const std::string bytes = serialize_checkpoint(model);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

UnfoldedModel load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_checkpoint(bytes);
}

}  // namespace dubline
