#pragma once

#include <string>
#include <vector>

#include "hybridq/tensor.hpp"

namespace hybridq::data {

enum class Source { real, generated };

// A [3,H,W] image with pixel values in [-1,1]. H = W in {16, 32, 64}.
struct LabeledImage {
    Tensor pixels;
    int label = 0;
    Source source = Source::real;

    LabeledImage() = default;
    LabeledImage(Tensor px, int lbl, Source src);
};

struct DatasetSpec {
    int n_classes = 3;
    std::vector<int> counts = {64, 64, 64};  // per-class sample counts
    int image_size = 16;
    std::uint64_t seed = 7;

    void validate() const;
};

// Binary PPM "P6", maxval 255. Byte v maps to 2*(v/255) - 1 on load; save
// rounds half away from zero. load(save(x)) is within 1/255 per channel.
Tensor load_ppm(const std::string& path);
void save_ppm(const Tensor& image, const std::string& path);

// Deterministic synthetic three-class "lesion" images: skin-tone background
// with per-image jitter plus one elliptical blob whose color, radius and
// edge irregularity depend on the class.
std::vector<LabeledImage> synth_lesion_dataset(const DatasetSpec& spec);

// Training mixture with fraction alpha of generated samples, per-class
// proportions preserved: class with n real samples receives
// round(n * alpha / (1 - alpha)) generated ones. Output is shuffled by seed.
std::vector<LabeledImage> stratified_mix(const std::vector<LabeledImage>& real,
                                         const std::vector<LabeledImage>& generated,
                                         double alpha, std::uint64_t seed);

}  // namespace hybridq::data
