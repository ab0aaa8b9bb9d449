#include "hybridq/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hybridq::config {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<int> parse_int_list(const std::string& value, const std::string& key) {
    std::vector<int> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw std::invalid_argument("config: bad integer in " + key + ": " + item);
        }
    }
    if (out.empty()) throw std::invalid_argument("config: empty list for " + key);
    return out;
}

std::vector<double> parse_double_list(const std::string& value, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw std::invalid_argument("config: bad number in " + key + ": " + item);
        }
    }
    if (out.empty()) throw std::invalid_argument("config: empty list for " + key);
    return out;
}

long parse_int(const std::string& value, const std::string& key) {
    try {
        return std::stol(value);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad integer for " + key + ": " + value);
    }
}

double parse_real(const std::string& value, const std::string& key) {
    try {
        return std::stod(value);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number for " + key + ": " + value);
    }
}

std::string join_ints(const std::vector<int>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(items[i]);
    }
    return out;
}

std::string join_doubles(const std::vector<double>& items) {
    std::string out;
    char buf[40];
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ",";
        std::snprintf(buf, sizeof buf, "%.17g", items[i]);
        out += buf;
    }
    return out;
}

}  // namespace

std::string csv_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

void apply_config_line(RunConfig& c, const std::string& section,
                       const std::string& key, const std::string& value) {
    const std::string field = section + "." + key;
    if (section == "model") {
        if (key == "latent_dim") c.latent_dim = static_cast<int>(parse_int(value, field));
        else if (key == "sub_generators") c.sub_generators = static_cast<int>(parse_int(value, field));
        else if (key == "qubits") c.qubits = static_cast<int>(parse_int(value, field));
        else if (key == "layers") c.layers = static_cast<int>(parse_int(value, field));
        else throw std::invalid_argument("config: unknown key " + field);
    } else if (section == "training") {
        if (key == "warmup_epochs") c.warmup_epochs = static_cast<int>(parse_int(value, field));
        else if (key == "gan_epochs") c.gan_epochs = static_cast<int>(parse_int(value, field));
        else if (key == "batch") c.batch = static_cast<int>(parse_int(value, field));
        else if (key == "lr_quantum") c.lr_quantum = parse_real(value, field);
        else if (key == "lr_pre_post") c.lr_pre_post = parse_real(value, field);
        else if (key == "lr_discriminator") c.lr_discriminator = parse_real(value, field);
        else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_int(value, field));
        else if (key == "sample_every") c.sample_every = static_cast<int>(parse_int(value, field));
        else if (key == "fid_every") c.fid_every = static_cast<int>(parse_int(value, field));
        else throw std::invalid_argument("config: unknown key " + field);
    } else if (section == "data") {
        if (key == "source") c.data_source = value;
        else if (key == "classes") c.classes = static_cast<int>(parse_int(value, field));
        else if (key == "counts") c.counts = parse_int_list(value, field);
        else if (key == "image_size") c.image_size = static_cast<int>(parse_int(value, field));
        else if (key == "seed") c.data_seed = static_cast<std::uint64_t>(parse_int(value, field));
        else if (key == "dir") c.data_dir = value;
        else if (key == "class_filter") c.class_filter = static_cast<int>(parse_int(value, field));
        else throw std::invalid_argument("config: unknown key " + field);
    } else if (section == "noise") {
        if (key == "depolarizing") c.depolarizing = parse_real(value, field);
        else if (key == "readout") c.readout = parse_real(value, field);
        else if (key == "trajectories") c.trajectories = static_cast<int>(parse_int(value, field));
        else if (key == "shots") c.shots = static_cast<int>(parse_int(value, field));
        else throw std::invalid_argument("config: unknown key " + field);
    } else if (section == "eval") {
        if (key == "fid_samples") c.fid_samples = static_cast<int>(parse_int(value, field));
        else if (key == "extractor_seed") c.extractor_seed = static_cast<std::uint64_t>(parse_int(value, field));
        else if (key == "alphas") c.alphas = parse_double_list(value, field);
        else if (key == "classifier_epochs") c.classifier_epochs = static_cast<int>(parse_int(value, field));
        else if (key == "classifier_batch") c.classifier_batch = static_cast<int>(parse_int(value, field));
        else if (key == "test_counts") c.test_counts = parse_int_list(value, field);
        else throw std::invalid_argument("config: unknown key " + field);
    } else {
        throw std::invalid_argument("config: unknown section [" + section + "]");
    }
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);

    RunConfig config;
    std::string section;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#') continue;
        if (text.front() == '[' && text.back() == ']') {
            section = trim(text.substr(1, text.size() - 2));
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                        " is not key = value: " + text);
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (section.empty())
            throw std::invalid_argument("config: key " + key + " outside any section");
        apply_config_line(config, section, key, value);
    }
    return config;
}

void RunConfig::validate() const {
    if (latent_dim != sub_generators * qubits)
        throw std::invalid_argument(
            "config: model.latent_dim must equal sub_generators * qubits");
    if (qubits < 1 || qubits > 16)
        throw std::invalid_argument("config: model.qubits must be in [1,16]");
    if (layers < 0) throw std::invalid_argument("config: model.layers must be >= 0");
    if (warmup_epochs < 0 || gan_epochs < 0)
        throw std::invalid_argument("config: training epochs must be >= 0");
    if (batch < 1) throw std::invalid_argument("config: training.batch must be >= 1");
    if (lr_quantum <= 0.0)
        throw std::invalid_argument("config: training.lr_quantum must be > 0");
    if (lr_pre_post <= 0.0)
        throw std::invalid_argument("config: training.lr_pre_post must be > 0");
    if (lr_discriminator <= 0.0)
        throw std::invalid_argument("config: training.lr_discriminator must be > 0");
    if (data_source != "synth" && data_source != "dir")
        throw std::invalid_argument("config: data.source must be synth or dir");
    if (data_source == "dir" && data_dir.empty())
        throw std::invalid_argument("config: data.dir required when data.source = dir");
    if (data_source == "synth") {
        if (classes < 1) throw std::invalid_argument("config: data.classes must be >= 1");
        if (static_cast<int>(counts.size()) != classes)
            throw std::invalid_argument("config: data.counts length must equal data.classes");
    }
    if (image_size != 16 && image_size != 32 && image_size != 64)
        throw std::invalid_argument("config: data.image_size must be 16, 32 or 64");
    if (depolarizing < 0.0 || depolarizing > 1.0)
        throw std::invalid_argument("config: noise.depolarizing outside [0,1]");
    if (readout < 0.0 || readout > 1.0)
        throw std::invalid_argument("config: noise.readout outside [0,1]");
    if (trajectories < 1)
        throw std::invalid_argument("config: noise.trajectories must be >= 1");
    if (shots < 0) throw std::invalid_argument("config: noise.shots must be >= 0");
    if (fid_samples < 2)
        throw std::invalid_argument("config: eval.fid_samples must be >= 2");
    for (double a : alphas)
        if (!(a >= 0.0 && a < 1.0))
            throw std::invalid_argument("config: eval.alphas must lie in [0,1)");
    if (classifier_epochs < 1)
        throw std::invalid_argument("config: eval.classifier_epochs must be >= 1");
    if (classifier_batch < 1)
        throw std::invalid_argument("config: eval.classifier_batch must be >= 1");
}

gan::ModelConfig RunConfig::model_config() const {
    gan::ModelConfig m;
    m.latent_dim = latent_dim;
    m.sub_generators = sub_generators;
    m.qubits = qubits;
    m.layers = layers;
    m.image_size = image_size;
    return m;
}

gan::TrainConfig RunConfig::train_config() const {
    gan::TrainConfig t;
    t.warmup_epochs = warmup_epochs;
    t.gan_epochs = gan_epochs;
    t.batch = batch;
    t.lr_quantum = lr_quantum;
    t.lr_pre_post = lr_pre_post;
    t.lr_discriminator = lr_discriminator;
    t.seed = seed;
    t.fid_every = fid_every;
    t.fid_samples = fid_samples;
    t.extractor_seed = extractor_seed;
    return t;
}

qsim::NoiseConfig RunConfig::noise_config() const {
    qsim::NoiseConfig n;
    n.depolarizing_prob = depolarizing;
    n.readout_flip_prob = readout;
    n.trajectories = trajectories;
    n.shots = shots;
    return n;
}

std::string config_echo(const RunConfig& c) {
    std::ostringstream out;
    char buf[40];
    auto real = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out << "[model]\n";
    out << "latent_dim = " << c.latent_dim << "\n";
    out << "sub_generators = " << c.sub_generators << "\n";
    out << "qubits = " << c.qubits << "\n";
    out << "layers = " << c.layers << "\n";
    out << "[training]\n";
    out << "warmup_epochs = " << c.warmup_epochs << "\n";
    out << "gan_epochs = " << c.gan_epochs << "\n";
    out << "batch = " << c.batch << "\n";
    out << "lr_quantum = " << real(c.lr_quantum) << "\n";
    out << "lr_pre_post = " << real(c.lr_pre_post) << "\n";
    out << "lr_discriminator = " << real(c.lr_discriminator) << "\n";
    out << "seed = " << c.seed << "\n";
    out << "sample_every = " << c.sample_every << "\n";
    out << "fid_every = " << c.fid_every << "\n";
    out << "[data]\n";
    out << "source = " << c.data_source << "\n";
    out << "classes = " << c.classes << "\n";
    out << "counts = " << join_ints(c.counts) << "\n";
    out << "image_size = " << c.image_size << "\n";
    out << "seed = " << c.data_seed << "\n";
    if (!c.data_dir.empty()) out << "dir = " << c.data_dir << "\n";
    out << "class_filter = " << c.class_filter << "\n";
    out << "[noise]\n";
    out << "depolarizing = " << real(c.depolarizing) << "\n";
    out << "readout = " << real(c.readout) << "\n";
    out << "trajectories = " << c.trajectories << "\n";
    out << "shots = " << c.shots << "\n";
    out << "[eval]\n";
    out << "fid_samples = " << c.fid_samples << "\n";
    out << "extractor_seed = " << c.extractor_seed << "\n";
    out << "alphas = " << join_doubles(c.alphas) << "\n";
    out << "classifier_epochs = " << c.classifier_epochs << "\n";
    out << "classifier_batch = " << c.classifier_batch << "\n";
    out << "test_counts = " << join_ints(c.test_counts) << "\n";
    return out.str();
}

}  // namespace hybridq::config
