// Command-line front end: per-class unconditional training, generation,
// FID evaluation and the augmentation sweep. Exit codes: 0 success,
// 2 usage/config error, 3 runtime numeric failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hybridq/config.hpp"
#include "hybridq/data.hpp"
#include "hybridq/gan.hpp"
#include "hybridq/metrics.hpp"

namespace fs = std::filesystem;
using namespace hybridq;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

// One run per output directory; the lock file is removed on clean exit.
class RunLock {
public:
    explicit RunLock(const fs::path& dir) : path_(dir / ".lock") {
        std::FILE* f = std::fopen(path_.string().c_str(), "wx");
        if (f == nullptr)
            throw std::invalid_argument("output directory " + dir.string() +
                                        " is locked by another run (remove " +
                                        path_.string() + " if stale)");
        std::fclose(f);
    }
    ~RunLock() {
        std::error_code ec;
        fs::remove(path_, ec);
    }

private:
    fs::path path_;
};

std::vector<data::LabeledImage> load_dir_dataset(const std::string& root, int image_size) {
    std::vector<data::LabeledImage> images;
    auto load_class = [&](const fs::path& dir, int label) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.is_regular_file() && entry.path().extension() == ".ppm")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
            Tensor px;
            try {
                px = data::load_ppm(file.string());
            } catch (const std::exception& e) {
                throw std::invalid_argument(e.what());
            }
            if (static_cast<int>(px.shape[1]) != image_size)
                throw std::invalid_argument("image " + file.string() +
                                            " does not match data.image_size");
            images.emplace_back(std::move(px), label, data::Source::real);
        }
    };

    std::vector<fs::path> class_dirs;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory() &&
            entry.path().filename().string().rfind("class_", 0) == 0)
            class_dirs.push_back(entry.path());
    if (class_dirs.empty()) {
        load_class(root, 0);
    } else {
        std::sort(class_dirs.begin(), class_dirs.end());
        for (std::size_t i = 0; i < class_dirs.size(); ++i)
            load_class(class_dirs[i], static_cast<int>(i));
    }
    if (images.empty())
        throw std::invalid_argument("no .ppm images under " + root);
    return images;
}

std::vector<data::LabeledImage> load_dataset(const config::RunConfig& cfg) {
    std::vector<data::LabeledImage> images;
    if (cfg.data_source == "dir") {
        images = load_dir_dataset(cfg.data_dir, cfg.image_size);
    } else {
        data::DatasetSpec spec;
        spec.n_classes = cfg.classes;
        spec.counts = cfg.counts;
        spec.image_size = cfg.image_size;
        spec.seed = cfg.data_seed;
        images = data::synth_lesion_dataset(spec);
    }
    if (cfg.class_filter >= 0) {
        std::vector<data::LabeledImage> kept;
        for (auto& im : images)
            if (im.label == cfg.class_filter) kept.push_back(std::move(im));
        if (kept.empty())
            throw std::invalid_argument("class_filter " +
                                        std::to_string(cfg.class_filter) +
                                        " matches no images");
        images = std::move(kept);
    }
    return images;
}

Tensor tile_grid(const std::vector<Tensor>& images, int cols) {
    const std::size_t s = images[0].shape[1];
    const int rows = static_cast<int>((images.size() + cols - 1) / cols);
    Tensor grid({3, rows * s, cols * s}, -1.0);
    for (std::size_t i = 0; i < images.size(); ++i) {
        const std::size_t r0 = (i / cols) * s;
        const std::size_t c0 = (i % cols) * s;
        for (std::size_t c = 0; c < 3; ++c)
            for (std::size_t y = 0; y < s; ++y)
                for (std::size_t x = 0; x < s; ++x)
                    grid.at3(c, r0 + y, c0 + x) = images[i].at3(c, y, x);
    }
    return grid;
}

std::string csv_cell(double v) { return config::csv_double(v); }

// input-loading failures are usage errors (exit 2), not numeric ones
gan::GanModel load_checkpoint_cli(const std::string& path) {
    try {
        return gan::load_checkpoint(path);
    } catch (const std::exception& e) {
        throw std::invalid_argument(e.what());
    }
}

struct CommonFlags {
    std::string config_file;
    std::vector<std::string> overrides;  // section.key=value

    config::RunConfig resolve() const {
        config::RunConfig cfg;
        if (!config_file.empty()) cfg = config::parse_config_file(config_file);
        for (const std::string& item : overrides) {
            const auto eq = item.find('=');
            const auto dot = item.find('.');
            if (eq == std::string::npos || dot == std::string::npos || dot > eq)
                throw std::invalid_argument("--set expects section.key=value, got " + item);
            std::string section = item.substr(0, dot);
            std::string key = item.substr(dot + 1, eq - dot - 1);
            std::string value = item.substr(eq + 1);
            config::apply_config_line(cfg, section, key, value);
        }
        return cfg;
    }
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_file, "run configuration file");
    cmd->add_option("--set", flags.overrides,
                    "override a config value as section.key=value (repeatable)");
}

int cmd_train(const CommonFlags& flags, const std::string& out_dir) {
    config::RunConfig cfg = flags.resolve();
    cfg.validate();

    fs::create_directories(out_dir);
    RunLock lock(out_dir);

    const std::vector<data::LabeledImage> dataset = load_dataset(cfg);

    std::ofstream echo(fs::path(out_dir) / "config.echo");
    echo << config::config_echo(cfg);
    echo.close();

    gan::GanModel model = gan::GanModel::init(cfg.model_config(), cfg.seed);
    gan::TrainConfig train_cfg = cfg.train_config();
    if (train_cfg.fid_every > 0) {
        for (const auto& im : dataset) {
            train_cfg.fid_reference.push_back(im.pixels);
            if (train_cfg.fid_reference.size() >=
                static_cast<std::size_t>(train_cfg.fid_samples))
                break;
        }
    }

    std::ofstream stats_csv(fs::path(out_dir) / "stats.csv");
    stats_csv << "epoch,loss_d,loss_g,loss_recon,r,fid,wall_time\n";

    const int total_epochs = cfg.warmup_epochs + cfg.gan_epochs;
    auto on_epoch = [&](const gan::EpochStats& stats, const gan::GanModel& m) {
        stats_csv << stats.epoch << "," << csv_cell(stats.loss_d) << ","
                  << csv_cell(stats.loss_g) << "," << csv_cell(stats.loss_recon) << ","
                  << csv_cell(stats.r) << ","
                  << (stats.fid ? csv_cell(*stats.fid) : std::string()) << ","
                  << csv_cell(stats.wall_time) << "\n";
        stats_csv.flush();
        const bool periodic =
            cfg.sample_every > 0 && stats.epoch % cfg.sample_every == 0;
        if (periodic || stats.epoch == total_epochs) {
            const fs::path dir =
                fs::path(out_dir) / "samples" / ("epoch_" + std::to_string(stats.epoch));
            fs::create_directories(dir);
            Rng rng(cfg.seed * 1000003ULL + static_cast<std::uint64_t>(stats.epoch));
            qsim::NoiseConfig noiseless;
            const auto samples = gan::generate(m, 16, noiseless, rng);
            data::save_ppm(tile_grid(samples, 4), (dir / "grid.ppm").string());
        }
        std::cout << "epoch " << stats.epoch << "/" << total_epochs
                  << " loss_d=" << csv_cell(stats.loss_d)
                  << " loss_g=" << csv_cell(stats.loss_g)
                  << " loss_recon=" << csv_cell(stats.loss_recon) << " r=" << csv_cell(stats.r);
        if (stats.fid) std::cout << " fid=" << csv_cell(*stats.fid);
        std::cout << std::endl;
    };

    gan::train(model, dataset, train_cfg, on_epoch);
    gan::save_checkpoint(model, (fs::path(out_dir) / "checkpoint.v1").string());
    std::cout << "run complete: " << out_dir << std::endl;
    return kExitOk;
}

int cmd_generate(const CommonFlags& flags, const std::string& checkpoint,
                 const std::string& out_dir, int n, std::uint64_t seed) {
    config::RunConfig cfg = flags.resolve();
    gan::GanModel model = load_checkpoint_cli(checkpoint);
    fs::create_directories(out_dir);

    qsim::NoiseConfig noise = cfg.noise_config();
    noise.validate();
    Rng rng(seed);
    const auto images = gan::generate(model, n, noise, rng);
    for (std::size_t i = 0; i < images.size(); ++i)
        data::save_ppm(images[i],
                       (fs::path(out_dir) / ("gen_" + std::to_string(i) + ".ppm")).string());
    std::cout << "wrote " << images.size() << " images to " << out_dir << std::endl;
    return kExitOk;
}

int cmd_eval_fid(const CommonFlags& flags, const std::string& checkpoint,
                 const std::string& real_dir, int n, std::uint64_t seed,
                 const std::string& log_path) {
    config::RunConfig cfg = flags.resolve();
    gan::GanModel model = load_checkpoint_cli(checkpoint);

    std::vector<data::LabeledImage> real;
    if (!real_dir.empty()) {
        real = load_dir_dataset(real_dir, model.config.image_size);
    } else {
        cfg.image_size = model.config.image_size;
        real = load_dataset(cfg);
    }
    if (real.size() < 2 || n < 2)
        throw std::invalid_argument("eval-fid: need at least 2 real and 2 generated samples");

    std::vector<Tensor> real_px;
    for (const auto& im : real) {
        real_px.push_back(im.pixels);
        if (real_px.size() >= static_cast<std::size_t>(n)) break;
    }

    qsim::NoiseConfig noise = cfg.noise_config();
    Rng rng(seed);
    const std::vector<Tensor> fake_px = gan::generate(model, n, noise, rng);

    const auto real_stats = metrics::gaussian_stats(
        metrics::extract_features(real_px, cfg.extractor_seed));
    const auto fake_stats = metrics::gaussian_stats(
        metrics::extract_features(fake_px, cfg.extractor_seed));
    const double fid = metrics::frechet_distance(real_stats, fake_stats);

    std::printf("%s\n", csv_cell(fid).c_str());

    const bool fresh = !fs::exists(log_path) || fs::file_size(log_path) == 0;
    std::ofstream log(log_path, std::ios::app);
    if (fresh) log << "checkpoint,n,extractor_seed,fid\n";
    log << checkpoint << "," << n << "," << cfg.extractor_seed << "," << csv_cell(fid)
        << "\n";
    return kExitOk;
}

int cmd_augment(const CommonFlags& flags, const std::vector<std::string>& checkpoints,
                std::uint64_t seed, const std::string& out_csv) {
    config::RunConfig cfg = flags.resolve();
    cfg.validate();
    if (checkpoints.empty())
        throw std::invalid_argument("augment: at least one --checkpoint (one per class)");
    if (cfg.data_source == "synth" &&
        static_cast<int>(checkpoints.size()) != cfg.classes)
        throw std::invalid_argument("augment: need one checkpoint per class (" +
                                    std::to_string(cfg.classes) + ")");

    const std::vector<data::LabeledImage> real_train = load_dataset(cfg);

    data::DatasetSpec test_spec;
    test_spec.n_classes = cfg.classes;
    test_spec.counts = cfg.test_counts;
    test_spec.image_size = cfg.image_size;
    test_spec.seed = cfg.data_seed + 1;  // disjoint draw from the training pool
    const std::vector<data::LabeledImage> test_set = data::synth_lesion_dataset(test_spec);

    std::vector<std::size_t> real_count(checkpoints.size(), 0);
    for (const auto& im : real_train) ++real_count[im.label];

    double max_alpha = 0.0;
    for (double a : cfg.alphas) max_alpha = std::max(max_alpha, a);

    qsim::NoiseConfig noise = cfg.noise_config();
    std::vector<data::LabeledImage> generated;
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        gan::GanModel model = load_checkpoint_cli(checkpoints[c]);
        if (model.config.image_size != cfg.image_size)
            throw std::invalid_argument("augment: checkpoint " + checkpoints[c] +
                                        " image size does not match data.image_size");
        const std::size_t need = static_cast<std::size_t>(
            std::ceil(real_count[c] * max_alpha / (1.0 - max_alpha))) + 1;
        Rng rng(seed ^ (0xabcd1234ULL + c));
        for (const Tensor& px : gan::generate(model, static_cast<int>(need), noise, rng))
            generated.emplace_back(px, static_cast<int>(c), data::Source::generated);
    }

    std::ofstream csv(out_csv);
    csv << "alpha,accuracy,macro_precision,macro_recall";
    for (int c = 0; c < cfg.classes; ++c) csv << ",precision_" << c << ",recall_" << c;
    csv << "\n";

    for (double alpha : cfg.alphas) {
        metrics::HarnessConfig harness;
        harness.epochs = cfg.classifier_epochs;
        harness.batch = cfg.classifier_batch;
        harness.seed = seed;
        const auto report =
            metrics::augmentation_harness(real_train, generated, alpha, test_set, harness);
        csv << csv_cell(alpha) << "," << csv_cell(report.accuracy) << ","
            << csv_cell(report.macro_precision) << "," << csv_cell(report.macro_recall);
        for (int c = 0; c < cfg.classes; ++c)
            csv << "," << csv_cell(report.precision[c]) << ","
                << csv_cell(report.recall[c]);
        csv << "\n";
        std::cout << "alpha=" << csv_cell(alpha)
                  << " accuracy=" << csv_cell(report.accuracy)
                  << " macro_recall=" << csv_cell(report.macro_recall) << std::endl;
    }
    std::cout << "wrote " << out_csv << std::endl;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HybridQ: latent-space hybrid classical-quantum GAN"};
    app.require_subcommand(1);

    CommonFlags train_flags, gen_flags, fid_flags, aug_flags;

    auto* train = app.add_subcommand("train", "train one unconditional GAN");
    std::string train_out = "run";
    add_common(train, train_flags);
    train->add_option("--out", train_out, "run directory")->required();

    auto* gen = app.add_subcommand("generate", "generate images from a checkpoint");
    std::string gen_checkpoint, gen_out = "generated";
    int gen_n = 16;
    std::uint64_t gen_seed = 1;
    add_common(gen, gen_flags);
    gen->add_option("--checkpoint", gen_checkpoint)->required();
    gen->add_option("--out", gen_out, "output directory");
    gen->add_option("-n,--count", gen_n, "number of images");
    gen->add_option("--seed", gen_seed);

    auto* fid = app.add_subcommand("eval-fid", "FID of generated vs real images");
    std::string fid_checkpoint, fid_real_dir, fid_log = "fid_log.csv";
    int fid_n = 256;
    std::uint64_t fid_seed = 1;
    add_common(fid, fid_flags);
    fid->add_option("--checkpoint", fid_checkpoint)->required();
    fid->add_option("--real-dir", fid_real_dir,
                    "directory of real .ppm images (defaults to the synth data config)");
    fid->add_option("-n,--count", fid_n, "samples per side");
    fid->add_option("--seed", fid_seed);
    fid->add_option("--log", fid_log, "CSV file to append the result to");

    auto* aug = app.add_subcommand("augment", "mixing-ratio augmentation sweep");
    std::vector<std::string> aug_checkpoints;
    std::string aug_out = "augment.csv";
    std::uint64_t aug_seed = 1;
    add_common(aug, aug_flags);
    aug->add_option("--checkpoint", aug_checkpoints,
                    "per-class checkpoints in class order (repeatable)");
    aug->add_option("--out", aug_out, "output CSV");
    aug->add_option("--seed", aug_seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (train->parsed()) return cmd_train(train_flags, train_out);
        if (gen->parsed()) return cmd_generate(gen_flags, gen_checkpoint, gen_out, gen_n, gen_seed);
        if (fid->parsed())
            return cmd_eval_fid(fid_flags, fid_checkpoint, fid_real_dir, fid_n, fid_seed, fid_log);
        if (aug->parsed()) return cmd_augment(aug_flags, aug_checkpoints, aug_seed, aug_out);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitNumeric;
    }
    return kExitConfig;
}
