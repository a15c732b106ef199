#include "gradleak/image_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <vector>

#include "gradleak/errors.hpp"
#include "gradleak/serde.hpp"

namespace gradleak {

namespace {

// Next whitespace-separated header token; '#' starts a comment running to
// end of line. Leaves the stream just past the single terminating
// whitespace byte, which after the maxval token is where sample data begins.
std::string next_token(std::istream& in, const std::string& path) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#' && tok.empty()) {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    if (tok.empty()) throw ParseError(path + ": truncated netpbm header");
    return tok;
}

std::size_t header_number(std::istream& in, const std::string& path, const char* field) {
    const std::string tok = next_token(in, path);
    std::size_t value = 0;
    for (char ch : tok) {
        if (!std::isdigit(static_cast<unsigned char>(ch)))
            throw ParseError(path + ": bad " + field + " \"" + tok + "\"");
        value = value * 10 + static_cast<std::size_t>(ch - '0');
        if (value > 1'000'000) throw ParseError(path + ": " + field + " out of range");
    }
    return value;
}

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

Tensor image_read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);

    const std::string magic = next_token(in, path);
    std::size_t channels = 0;
    if (magic == "P6")
        channels = 3;
    else if (magic == "P5")
        channels = 1;
    else
        throw ParseError(path + ": unsupported magic \"" + magic + "\" (want P5 or P6)");

    const std::size_t width = header_number(in, path, "width");
    const std::size_t height = header_number(in, path, "height");
    const std::size_t maxval = header_number(in, path, "maxval");
    if (width == 0 || height == 0) throw ParseError(path + ": zero image dimension");
    if (maxval != 255)
        throw ParseError(path + ": only 8-bit images supported (maxval 255, got " +
                         std::to_string(maxval) + ")");

    std::vector<std::uint8_t> bytes(width * height * channels);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (static_cast<std::size_t>(in.gcount()) != bytes.size())
        throw ParseError(path + ": truncated pixel data");

    // Interleaved samples on disk, planar in the tensor.
    Tensor img({channels, height, width});
    for (std::size_t y = 0; y < height; ++y)
        for (std::size_t x = 0; x < width; ++x)
            for (std::size_t c = 0; c < channels; ++c)
                img(c, y, x) = static_cast<double>(bytes[(y * width + x) * channels + c]) / 255.0;
    return img;
}

void image_write(const std::string& path, const Tensor& image) {
    if (image.ndim() != 3 || (image.dim(0) != 1 && image.dim(0) != 3))
        throw ShapeError("image tensor must be [1,H,W] or [3,H,W], got " +
                         shape_to_string(image.shape()));
    const std::size_t channels = image.dim(0);
    const std::size_t height = image.dim(1);
    const std::size_t width = image.dim(2);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + path);
    out << (channels == 3 ? "P6" : "P5") << '\n' << width << ' ' << height << '\n' << 255 << '\n';

    std::vector<std::uint8_t> bytes(width * height * channels);
    for (std::size_t y = 0; y < height; ++y)
        for (std::size_t x = 0; x < width; ++x)
            for (std::size_t c = 0; c < channels; ++c) {
                double v = image(c, y, x);
                v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
                bytes[(y * width + x) * channels + c] =
                    static_cast<std::uint8_t>(std::round(v * 255.0));
            }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("write failed for " + path);
}

Tensor load_tensor_or_image(const std::string& path) {
    if (has_suffix(path, ".json")) return parse_tensor(read_text_file(path));
    return image_read(path);
}

void save_tensor_or_image(const std::string& path, const Tensor& t) {
    if (has_suffix(path, ".json")) {
        write_text_file(path, serialize_tensor(t));
        return;
    }
    image_write(path, t);
}

}  // namespace gradleak
