#include "posemon/core/image_io.hpp"

#include <fstream>
#include <stdexcept>

namespace posemon {

namespace {

// Skips whitespace and '#' comment lines between PGM header tokens.
int next_header_int(std::istream& in, const std::filesystem::path& path) {
    int c = in.peek();
    while (c == '#' || std::isspace(c)) {
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else {
            in.get();
        }
        c = in.peek();
    }
    int value = 0;
    if (!(in >> value)) throw std::runtime_error("bad PGM header: " + path.string());
    return value;
}

}  // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open image: " + path.string());
    std::string magic;
    in >> magic;
    if (magic != "P5") throw std::runtime_error("not a P5 PGM: " + path.string());
    int w = next_header_int(in, path);
    int h = next_header_int(in, path);
    int maxval = next_header_int(in, path);
    if (w <= 0 || h <= 0 || maxval != 255)
        throw std::runtime_error("unsupported PGM dimensions/maxval: " + path.string());
    in.get();  // single whitespace before pixel data
    GrayImage img;
    img.width = w;
    img.height = h;
    img.pixels.resize(static_cast<size_t>(w) * h);
    in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
        throw std::runtime_error("truncated PGM: " + path.string());
    return img;
}

void write_pgm(const GrayImage& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write image: " + path.string());
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

BinaryMask read_mask_pgm(const std::filesystem::path& path) {
    GrayImage img = read_pgm(path);
    BinaryMask mask;
    mask.width = img.width;
    mask.height = img.height;
    mask.bits.resize(img.pixels.size());
    for (size_t i = 0; i < img.pixels.size(); ++i) mask.bits[i] = img.pixels[i] > 127 ? 1 : 0;
    return mask;
}

void write_mask_pgm(const BinaryMask& mask, const std::filesystem::path& path) {
    GrayImage img;
    img.width = mask.width;
    img.height = mask.height;
    img.pixels.resize(mask.bits.size());
    for (size_t i = 0; i < mask.bits.size(); ++i) img.pixels[i] = mask.bits[i] ? 255 : 0;
    write_pgm(img, path);
}

}  // namespace posemon
