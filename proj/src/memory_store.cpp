#include "matter/memory_store.hpp"

#include <cstring>
#include <fstream>

namespace matter {

namespace {

constexpr char kMagic[4] = {'M', 'M', 'E', 'M'};
constexpr uint32_t kVersion = 1;

template <class T>
void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::ifstream& in, const char* what) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw FormatError(std::string("store file: truncated ") + what);
    return v;
}

}  // namespace

void save_store(const std::string& path, const MemoryStore& store) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write store file: " + path);
    out.write(kMagic, 4);
    write_pod<uint32_t>(out, kVersion);
    write_pod<uint32_t>(out, static_cast<uint32_t>(store.l));
    write_pod<uint32_t>(out, static_cast<uint32_t>(store.d_model));
    write_pod<uint32_t>(out, static_cast<uint32_t>(store.float_width));
    write_pod<uint64_t>(out, store.checkpoint_hash);
    write_pod<uint64_t>(out, static_cast<uint64_t>(store.blocks[0].ids.size()));
    write_pod<uint64_t>(out, static_cast<uint64_t>(store.blocks[1].ids.size()));
    for (const auto& b : store.blocks)
        out.write(reinterpret_cast<const char*>(b.ids.data()),
                  static_cast<std::streamsize>(b.ids.size() * sizeof(int64_t)));
    for (const auto& b : store.blocks) {
        if (store.float_width == 4)
            out.write(reinterpret_cast<const char*>(b.f32.data()),
                      static_cast<std::streamsize>(b.f32.size() * sizeof(float)));
        else
            out.write(reinterpret_cast<const char*>(b.f64.data()),
                      static_cast<std::streamsize>(b.f64.size() * sizeof(double)));
    }
    if (!out) throw FormatError("store file: write failed: " + path);
}

MemoryStore load_store(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open store file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError("store file: bad magic: " + path);
    if (read_pod<uint32_t>(in, "version") != kVersion)
        throw FormatError("store file: unsupported version");
    MemoryStore store;
    store.l = static_cast<int>(read_pod<uint32_t>(in, "l"));
    store.d_model = static_cast<int>(read_pod<uint32_t>(in, "d_model"));
    store.float_width = static_cast<int>(read_pod<uint32_t>(in, "float width"));
    if (store.float_width != 4 && store.float_width != 8)
        throw FormatError("store file: unsupported float width");
    store.checkpoint_hash = read_pod<uint64_t>(in, "checkpoint hash");
    const uint64_t n_qa = read_pod<uint64_t>(in, "qa count");
    const uint64_t n_prg = read_pod<uint64_t>(in, "prg count");
    const uint64_t counts[2] = {n_qa, n_prg};
    for (size_t s = 0; s < 2; ++s) {
        store.blocks[s].ids.resize(counts[s]);
        in.read(reinterpret_cast<char*>(store.blocks[s].ids.data()),
                static_cast<std::streamsize>(counts[s] * sizeof(int64_t)));
        if (!in) throw FormatError("store file: truncated id table");
    }
    const uint64_t stride = static_cast<uint64_t>(store.l) * static_cast<uint64_t>(store.d_model);
    for (size_t s = 0; s < 2; ++s) {
        auto& b = store.blocks[s];
        if (store.float_width == 4) {
            b.f32.resize(counts[s] * stride);
            in.read(reinterpret_cast<char*>(b.f32.data()),
                    static_cast<std::streamsize>(b.f32.size() * sizeof(float)));
        } else {
            b.f64.resize(counts[s] * stride);
            in.read(reinterpret_cast<char*>(b.f64.data()),
                    static_cast<std::streamsize>(b.f64.size() * sizeof(double)));
        }
        if (!in) throw FormatError("store file: truncated vector block");
    }
    store.index_rows();
    return store;
}

}  // namespace matter
