#include "hybridq/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "hybridq/rng.hpp"

namespace hybridq::data {

namespace {

bool valid_size(std::size_t s) { return s == 16 || s == 32 || s == 64; }

[[noreturn]] void parse_error(const std::string& path, std::size_t offset,
                              const std::string& what) {
    throw std::runtime_error("ppm parse error in " + path + " at byte " +
                             std::to_string(offset) + ": " + what);
}

// Reads one whitespace-delimited ASCII integer, skipping '#' comments.
long read_header_int(const std::string& bytes, std::size_t& pos,
                     const std::string& path) {
    while (pos < bytes.size()) {
        const char c = bytes[pos];
        if (c == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            ++pos;
        } else {
            break;
        }
    }
    if (pos >= bytes.size()) parse_error(path, pos, "unexpected end of header");
    if (!std::isdigit(static_cast<unsigned char>(bytes[pos])))
        parse_error(path, pos, "expected integer");
    long value = 0;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
        value = value * 10 + (bytes[pos] - '0');
        ++pos;
    }
    return value;
}

}  // namespace

LabeledImage::LabeledImage(Tensor px, int lbl, Source src)
    : pixels(std::move(px)), label(lbl), source(src) {
    if (pixels.shape.size() != 3 || pixels.shape[0] != 3 ||
        pixels.shape[1] != pixels.shape[2] || !valid_size(pixels.shape[1]))
        throw std::invalid_argument("LabeledImage: pixels must be [3,S,S], S in {16,32,64}");
    for (double v : pixels.data) {
        if (!(v >= -1.0 && v <= 1.0))
            throw std::invalid_argument("LabeledImage: pixel value outside [-1,1]");
    }
}

void DatasetSpec::validate() const {
    if (n_classes < 1) throw std::invalid_argument("DatasetSpec: n_classes must be >= 1");
    if (static_cast<int>(counts.size()) != n_classes)
        throw std::invalid_argument("DatasetSpec: counts length must equal n_classes");
    bool any = false;
    for (int c : counts) {
        if (c < 0) throw std::invalid_argument("DatasetSpec: counts must be >= 0");
        if (c > 0) any = true;
    }
    if (!any) throw std::invalid_argument("DatasetSpec: at least one class count nonzero");
    if (!valid_size(static_cast<std::size_t>(image_size)))
        throw std::invalid_argument("DatasetSpec: image_size must be 16, 32 or 64");
}

Tensor load_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("ppm: cannot open " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());

    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6')
        parse_error(path, 0, "bad magic, expected P6");
    std::size_t pos = 2;
    const long width = read_header_int(bytes, pos, path);
    const long height = read_header_int(bytes, pos, path);
    const std::size_t maxval_at = pos;
    const long maxval = read_header_int(bytes, pos, path);
    if (width <= 0 || height <= 0) parse_error(path, 2, "non-positive dimensions");
    if (maxval != 255) parse_error(path, maxval_at, "maxval must be 255");
    if (pos >= bytes.size()) parse_error(path, pos, "missing payload");
    // exactly one whitespace byte separates the header from the payload
    ++pos;

    const std::size_t need = static_cast<std::size_t>(width) * height * 3;
    if (bytes.size() - pos < need)
        parse_error(path, bytes.size(), "truncated payload, expected " +
                                            std::to_string(need) + " bytes");

    Tensor image({3, static_cast<std::size_t>(height), static_cast<std::size_t>(width)});
    for (long h = 0; h < height; ++h) {
        for (long w = 0; w < width; ++w) {
            for (std::size_t c = 0; c < 3; ++c) {
                const unsigned char v = static_cast<unsigned char>(bytes[pos++]);
                image.at3(c, h, w) = 2.0 * (static_cast<double>(v) / 255.0) - 1.0;
            }
        }
    }
    return image;
}

void save_ppm(const Tensor& image, const std::string& path) {
    if (image.shape.size() != 3 || image.shape[0] != 3)
        throw std::invalid_argument("save_ppm: image must be [3,H,W]");
    const std::size_t height = image.shape[1];
    const std::size_t width = image.shape[2];

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("ppm: cannot write " + path);
    out << "P6\n" << width << " " << height << "\n255\n";
    std::string payload;
    payload.reserve(width * height * 3);
    for (std::size_t h = 0; h < height; ++h) {
        for (std::size_t w = 0; w < width; ++w) {
            for (std::size_t c = 0; c < 3; ++c) {
                const double scaled = (image.at3(c, h, w) + 1.0) / 2.0 * 255.0;
                double rounded = std::floor(std::fabs(scaled) + 0.5);
                if (scaled < 0.0) rounded = -rounded;
                const long byte = std::lround(std::clamp(rounded, 0.0, 255.0));
                payload.push_back(static_cast<char>(static_cast<unsigned char>(byte)));
            }
        }
    }
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw std::runtime_error("ppm: write failed for " + path);
}

namespace {

struct ClassStyle {
    double lesion_r, lesion_g, lesion_b;  // base lesion color in [-1,1]
    double radius_frac;                   // mean radius as fraction of half-size
    double radius_jitter;
    double irregularity;                  // edge wobble amplitude
};

// Three visually distinct lesion families on a shared skin-tone background.
const ClassStyle kStyles[3] = {
    {-0.30, -0.62, -0.70, 0.45, 0.10, 0.05},  // dark brown, compact, smooth
    {0.55, -0.30, -0.30, 0.30, 0.08, 0.20},   // reddish, small, wavy
    {0.10, 0.10, 0.28, 0.62, 0.12, 0.35},     // pale gray-blue, large, ragged
};

ClassStyle style_for(int label) {
    ClassStyle s = kStyles[label % 3];
    // classes beyond the three templates get a deterministic hue shift
    const int wrap = label / 3;
    if (wrap > 0) {
        s.lesion_r = std::clamp(s.lesion_r + 0.25 * wrap, -0.95, 0.95);
        s.lesion_b = std::clamp(s.lesion_b - 0.20 * wrap, -0.95, 0.95);
    }
    return s;
}

}  // namespace

std::vector<LabeledImage> synth_lesion_dataset(const DatasetSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const int size = spec.image_size;
    const double half = size / 2.0;

    std::vector<LabeledImage> images;
    for (int label = 0; label < spec.n_classes; ++label) {
        const ClassStyle style = style_for(label);
        for (int i = 0; i < spec.counts[label]; ++i) {
            // skin-tone background with per-image jitter
            const double bg_r = 0.78 + rng.uniform(-0.08, 0.08);
            const double bg_g = 0.48 + rng.uniform(-0.08, 0.08);
            const double bg_b = 0.12 + rng.uniform(-0.08, 0.08);

            const double cx = half + rng.uniform(-0.18, 0.18) * size;
            const double cy = half + rng.uniform(-0.18, 0.18) * size;
            const double radius =
                (style.radius_frac + rng.uniform(-style.radius_jitter, style.radius_jitter)) * half;
            const double aspect = 1.0 + rng.uniform(-0.25, 0.25);
            const double wobble_phase = rng.uniform(0.0, 6.283185307179586);
            const double wobble_amp = style.irregularity * rng.uniform(0.6, 1.4);

            const double col_r = std::clamp(style.lesion_r + rng.uniform(-0.08, 0.08), -1.0, 1.0);
            const double col_g = std::clamp(style.lesion_g + rng.uniform(-0.08, 0.08), -1.0, 1.0);
            const double col_b = std::clamp(style.lesion_b + rng.uniform(-0.08, 0.08), -1.0, 1.0);

            Tensor px({3, static_cast<std::size_t>(size), static_cast<std::size_t>(size)});
            for (int y = 0; y < size; ++y) {
                for (int x = 0; x < size; ++x) {
                    const double dx = (x - cx) / aspect;
                    const double dy = (y - cy) * aspect;
                    const double dist = std::sqrt(dx * dx + dy * dy);
                    const double phi = std::atan2(dy, dx);
                    const double edge =
                        radius * (1.0 + wobble_amp * std::sin(3.0 * phi + wobble_phase) +
                                  0.5 * wobble_amp * std::sin(5.0 * phi - wobble_phase));
                    // soft one-pixel edge
                    const double t = std::clamp(edge - dist + 0.5, 0.0, 1.0);
                    const double r = bg_r + t * (col_r - bg_r);
                    const double g = bg_g + t * (col_g - bg_g);
                    const double b = bg_b + t * (col_b - bg_b);
                    px.at3(0, y, x) = std::clamp(r, -1.0, 1.0);
                    px.at3(1, y, x) = std::clamp(g, -1.0, 1.0);
                    px.at3(2, y, x) = std::clamp(b, -1.0, 1.0);
                }
            }
            images.emplace_back(std::move(px), label, Source::real);
        }
    }
    return images;
}

std::vector<LabeledImage> stratified_mix(const std::vector<LabeledImage>& real,
                                         const std::vector<LabeledImage>& generated,
                                         double alpha, std::uint64_t seed) {
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw std::invalid_argument("stratified_mix: alpha must be in [0,1)");

    int max_label = -1;
    for (const auto& im : real) max_label = std::max(max_label, im.label);
    for (const auto& im : generated) max_label = std::max(max_label, im.label);
    const int n_classes = max_label + 1;

    std::vector<std::size_t> real_count(n_classes, 0);
    for (const auto& im : real) ++real_count[im.label];
    std::vector<std::vector<std::size_t>> gen_by_class(n_classes);
    for (std::size_t i = 0; i < generated.size(); ++i)
        gen_by_class[generated[i].label].push_back(i);

    Rng rng(seed);
    std::vector<LabeledImage> out = real;
    for (int c = 0; c < n_classes; ++c) {
        const double want = static_cast<double>(real_count[c]) * alpha / (1.0 - alpha);
        const std::size_t n_gen = static_cast<std::size_t>(std::llround(want));
        if (n_gen > gen_by_class[c].size())
            throw std::runtime_error("stratified_mix: class " + std::to_string(c) +
                                     " needs " + std::to_string(n_gen) +
                                     " generated samples but only " +
                                     std::to_string(gen_by_class[c].size()) +
                                     " available");
        shuffle(gen_by_class[c], rng);
        for (std::size_t i = 0; i < n_gen; ++i) {
            LabeledImage im = generated[gen_by_class[c][i]];
            im.source = Source::generated;
            out.push_back(std::move(im));
        }
    }
    shuffle(out, rng);
    return out;
}

}  // namespace hybridq::data
