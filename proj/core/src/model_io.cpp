#include "citemb/model_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <type_traits>

#include "citemb/errors.hpp"

namespace citemb {

namespace {

constexpr char kMagic[4] = {'C', 'E', 'M', 'B'};
constexpr std::uint16_t kVersion = 1;
constexpr std::uint16_t kFlagAligned = 0x0001;

void put_bytes(std::ostream& out, const void* data, std::size_t n) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

template <typename T>
void put_le(std::ostream& out, T value) {
    static_assert(std::is_integral_v<T>);
    unsigned char buf[sizeof(T)];
    auto u = static_cast<std::make_unsigned_t<T>>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        buf[i] = static_cast<unsigned char>(u & 0xFF);
        u = static_cast<std::make_unsigned_t<T>>(u >> 8);
    }
    put_bytes(out, buf, sizeof(T));
}

void put_f32(std::ostream& out, float value) {
    put_le(out, std::bit_cast<std::uint32_t>(value));
}

void get_bytes(std::istream& in, void* data, std::size_t n) {
    in.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) throw BadModelFile("truncated file");
}

template <typename T>
T get_le(std::istream& in) {
    unsigned char buf[sizeof(T)];
    get_bytes(in, buf, sizeof(T));
    std::make_unsigned_t<T> u = 0;
    for (std::size_t i = sizeof(T); i-- > 0;)
        u = static_cast<std::make_unsigned_t<T>>((u << 8) | buf[i]);
    return static_cast<T>(u);
}

float get_f32(std::istream& in) {
    return std::bit_cast<float>(get_le<std::uint32_t>(in));
}

} // namespace

void write_model(std::ostream& out, const EmbeddingModel& model) {
    put_bytes(out, kMagic, 4);
    put_le<std::uint16_t>(out, kVersion);
    put_le<std::uint16_t>(out, model.aligned ? kFlagAligned : 0);
    put_le<std::int32_t>(out, model.period);
    put_le<std::int32_t>(out, model.frame_period);
    put_le<std::uint32_t>(out, model.dim);
    put_le<std::uint64_t>(out, model.vocab.size());
    for (std::uint32_t id = 0; id < model.vocab.size(); ++id) {
        const VocabEntry& e = model.vocab.entry(id);
        put_le<std::uint8_t>(out, e.kind == TokenKind::Citation ? 1 : 0);
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(e.surface.size()));
        put_bytes(out, e.surface.data(), e.surface.size());
        put_le<std::uint64_t>(out, e.count);
        const auto row = model.input_row(id);
        for (const float x : row) put_f32(out, x);
    }
}

void write_model_file(const std::string& path, const EmbeddingModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write model file: " + path);
    write_model(out, model);
    if (!out) throw Error("write failed: " + path);
}

EmbeddingModel read_model(std::istream& in) {
    char magic[4];
    get_bytes(in, magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) throw BadModelFile("wrong magic");
    const auto version = get_le<std::uint16_t>(in);
    if (version != kVersion)
        throw BadModelFile("unsupported version " + std::to_string(version));
    const auto flags = get_le<std::uint16_t>(in);

    EmbeddingModel model;
    model.aligned = (flags & kFlagAligned) != 0;
    model.period = get_le<std::int32_t>(in);
    model.frame_period = get_le<std::int32_t>(in);
    model.dim = get_le<std::uint32_t>(in);
    const auto vocab_size = get_le<std::uint64_t>(in);
    if (model.dim == 0 || model.dim > (1u << 20)) throw BadModelFile("implausible dim");

    std::vector<VocabEntry> entries;
    entries.reserve(vocab_size);
    model.input_vectors.reserve(vocab_size * model.dim);
    for (std::uint64_t i = 0; i < vocab_size; ++i) {
        VocabEntry e;
        const auto kind = get_le<std::uint8_t>(in);
        if (kind > 1) throw BadModelFile("bad token kind");
        e.kind = kind == 1 ? TokenKind::Citation : TokenKind::Word;
        const auto len = get_le<std::uint32_t>(in);
        if (len > (1u << 24)) throw BadModelFile("implausible surface length");
        e.surface.resize(len);
        get_bytes(in, e.surface.data(), len);
        e.count = get_le<std::uint64_t>(in);
        entries.push_back(std::move(e));
        for (std::uint32_t c = 0; c < model.dim; ++c)
            model.input_vectors.push_back(get_f32(in));
    }
    model.vocab = Vocabulary::from_entries(std::move(entries));
    model.output_vectors.assign(model.input_vectors.size(), 0.0f);
    return model;
}

EmbeddingModel read_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open model file: " + path);
    return read_model(in);
}

void write_text_model(std::ostream& out, const EmbeddingModel& model) {
    out << model.vocab.size() << ' ' << model.dim << '\n';
    char buf[32];
    for (std::uint32_t id = 0; id < model.vocab.size(); ++id) {
        out << model.vocab.entry(id).surface;
        for (const float x : model.input_row(id)) {
            std::snprintf(buf, sizeof buf, "%.8e", static_cast<double>(x));
            out << ' ' << buf;
        }
        out << '\n';
    }
}

EmbeddingModel read_text_model(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw BadModelFile("empty text model");
    std::istringstream head(header);
    std::uint64_t vocab_size = 0;
    std::uint32_t dim = 0;
    if (!(head >> vocab_size >> dim) || dim == 0) throw BadModelFile("bad text model header");

    EmbeddingModel model;
    model.dim = dim;
    std::vector<VocabEntry> entries;
    entries.reserve(vocab_size);
    std::string line;
    for (std::uint64_t i = 0; i < vocab_size; ++i) {
        if (!std::getline(in, line)) throw BadModelFile("truncated text model");
        std::istringstream row(line);
        VocabEntry e;
        if (!(row >> e.surface)) throw BadModelFile("bad text model row");
        e.kind = CitationId::parse_token_surface(e.surface) ? TokenKind::Citation : TokenKind::Word;
        for (std::uint32_t c = 0; c < dim; ++c) {
            double x;
            if (!(row >> x)) throw BadModelFile("short vector in text model");
            model.input_vectors.push_back(static_cast<float>(x));
        }
        entries.push_back(std::move(e));
    }
    model.vocab = Vocabulary::from_entries(std::move(entries));
    model.output_vectors.assign(model.input_vectors.size(), 0.0f);
    return model;
}

} // namespace citemb
