#include "awa/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include <nlohmann/json.hpp>

namespace awa {

namespace {

constexpr char kMagic[8] = {'A', 'W', 'A', 'N', 'E', 'T', '0', '1'};

static_assert(std::endian::native == std::endian::little,
              "model container assumes a little-endian host");

void write_u64(std::ostream& os, uint64_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

uint64_t read_u64(std::istream& is) {
    uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

void write_f32(std::ostream& os, const Eigen::VectorXd& v) {
    std::vector<float> buf(static_cast<size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i)
        buf[static_cast<size_t>(i)] = static_cast<float>(v(i));
    os.write(reinterpret_cast<const char*>(buf.data()),
             static_cast<std::streamsize>(buf.size() * sizeof(float)));
}

void read_f32(std::istream& is, Eigen::VectorXd& v, size_t n) {
    std::vector<float> buf(n);
    is.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(n * sizeof(float)));
    v.resize(static_cast<Eigen::Index>(n));
    for (size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = buf[i];
}

} // namespace

void save_model(const NetworkModel& model, const std::filesystem::path& file) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw IoError("cannot write model file " + file.string());

    nlohmann::json arch = model.architecture();
    arch["param_count"] = model.params().size();
    arch["state_count"] = model.bn_state().size();
    std::string header = arch.dump();

    os.write(kMagic, sizeof(kMagic));
    write_u64(os, header.size());
    os.write(header.data(), static_cast<std::streamsize>(header.size()));
    write_f32(os, model.params());
    write_f32(os, model.bn_state());
    if (!os) throw IoError("failed writing model file " + file.string());
}

NetworkModel load_model(const std::filesystem::path& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw IoError("cannot open model file " + file.string());

    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw IoError(file.string() + " is not a model container");

    uint64_t header_len = read_u64(is);
    std::string header(header_len, '\0');
    is.read(header.data(), static_cast<std::streamsize>(header_len));
    if (!is) throw IoError(file.string() + ": truncated header");

    nlohmann::json arch;
    try {
        arch = nlohmann::json::parse(header);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(file.string() + ": bad architecture manifest: " + e.what());
    }

    NetworkModel model = network_from_architecture(arch);
    auto pn = arch.at("param_count").get<size_t>();
    auto sn = arch.at("state_count").get<size_t>();
    if (pn != static_cast<size_t>(model.params().size()) ||
        sn != static_cast<size_t>(model.bn_state().size()))
        throw IoError(file.string() + ": parameter counts do not match architecture");
    read_f32(is, model.params(), pn);
    read_f32(is, model.bn_state(), sn);
    if (!is) throw IoError(file.string() + ": truncated parameter data");
    return model;
}

} // namespace awa
