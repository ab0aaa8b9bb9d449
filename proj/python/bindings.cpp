#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "hybridq/data.hpp"
#include "hybridq/gan.hpp"
#include "hybridq/metrics.hpp"
#include "hybridq/qsim.hpp"
#include "hybridq/vqc.hpp"

namespace py = pybind11;
using namespace hybridq;

namespace {

Tensor tensor_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
    std::vector<std::size_t> shape(arr.ndim());
    for (py::ssize_t i = 0; i < arr.ndim(); ++i)
        shape[i] = static_cast<std::size_t>(arr.shape(i));
    std::vector<double> values(arr.data(), arr.data() + arr.size());
    return Tensor(std::move(shape), std::move(values));
}

py::array_t<double> array_from_tensor(const Tensor& t) {
    std::vector<py::ssize_t> shape(t.shape.begin(), t.shape.end());
    py::array_t<double> arr(shape);
    std::copy(t.data.begin(), t.data.end(), arr.mutable_data());
    return arr;
}

qsim::NoiseConfig make_noise(double depolarizing, double readout, int trajectories,
                             int shots) {
    qsim::NoiseConfig n;
    n.depolarizing_prob = depolarizing;
    n.readout_flip_prob = readout;
    n.trajectories = trajectories;
    n.shots = shots;
    n.validate();
    return n;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Hybrid classical-quantum GAN core";

    py::class_<qsim::NoiseConfig>(m, "NoiseConfig")
        .def(py::init<>())
        .def_readwrite("depolarizing_prob", &qsim::NoiseConfig::depolarizing_prob)
        .def_readwrite("readout_flip_prob", &qsim::NoiseConfig::readout_flip_prob)
        .def_readwrite("trajectories", &qsim::NoiseConfig::trajectories)
        .def_readwrite("shots", &qsim::NoiseConfig::shots);

    py::class_<qsim::StateVector>(m, "StateVector")
        .def(py::init<int>(), py::arg("n_qubits"))
        .def_property_readonly("n_qubits", &qsim::StateVector::n_qubits)
        .def("apply_ry", &qsim::StateVector::apply_ry, py::arg("qubit"), py::arg("angle"))
        .def("apply_cnot", &qsim::StateVector::apply_cnot, py::arg("control"),
             py::arg("target"))
        .def("expectation_z", &qsim::StateVector::expectation_z, py::arg("qubit"))
        .def("amplitudes",
             [](const qsim::StateVector& s) { return s.amplitudes(); });

    py::class_<vqc::SubGenParams>(m, "SubGenParams")
        .def(py::init<int, int>(), py::arg("n_layers"), py::arg("n_qubits"))
        .def_readonly("n_layers", &vqc::SubGenParams::n_layers)
        .def_readonly("n_qubits", &vqc::SubGenParams::n_qubits)
        .def_property(
            "angles", [](const vqc::SubGenParams& p) { return p.angles; },
            [](vqc::SubGenParams& p, const std::vector<double>& a) {
                if (a.size() != p.angles.size())
                    throw std::invalid_argument("angles length mismatch");
                p.angles = a;
            });

    py::class_<vqc::GeneratorParams>(m, "GeneratorParams")
        .def_static("make", &vqc::GeneratorParams::make, py::arg("count"),
                    py::arg("layers"), py::arg("qubits"))
        .def_property_readonly("latent_dim", &vqc::GeneratorParams::latent_dim)
        .def_property_readonly("n_params", &vqc::GeneratorParams::n_params)
        .def_readwrite("sub_generators", &vqc::GeneratorParams::sub_generators);

    m.def(
        "subgen_forward",
        [](const vqc::SubGenParams& p, const std::vector<double>& z) {
            return vqc::subgen_forward(p, z);
        },
        py::arg("params"), py::arg("z_chunk"));
    m.def(
        "subgen_jacobian",
        [](const vqc::SubGenParams& p, const std::vector<double>& z) {
            const auto flat = vqc::subgen_jacobian(p, z);
            py::array_t<double> arr({static_cast<py::ssize_t>(p.n_qubits),
                                     static_cast<py::ssize_t>(p.n_params())});
            std::copy(flat.begin(), flat.end(), arr.mutable_data());
            return arr;
        },
        py::arg("params"), py::arg("z_chunk"));
    m.def(
        "generator_forward",
        [](const vqc::GeneratorParams& p, const std::vector<double>& z) {
            return vqc::generator_forward(p, z);
        },
        py::arg("params"), py::arg("z"));

    m.def(
        "extract_features",
        [](const std::vector<py::array_t<double, py::array::c_style |
                                                     py::array::forcecast>>& images,
           std::uint64_t seed) {
            std::vector<Tensor> tensors;
            tensors.reserve(images.size());
            for (const auto& im : images) tensors.push_back(tensor_from_array(im));
            return metrics::extract_features(tensors, seed);
        },
        py::arg("images"), py::arg("extractor_seed"));

    py::class_<metrics::FeatureStats>(m, "FeatureStats")
        .def_readonly("mean", &metrics::FeatureStats::mean)
        .def_property_readonly("covariance",
                               [](const metrics::FeatureStats& s) {
                                   return array_from_tensor(s.covariance);
                               })
        .def_readonly("n_samples", &metrics::FeatureStats::n_samples);

    m.def("gaussian_stats", &metrics::gaussian_stats, py::arg("features"));
    m.def("frechet_distance", &metrics::frechet_distance, py::arg("a"), py::arg("b"));
    m.def(
        "sym_eig",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& mat) {
            const auto result = metrics::sym_eig(tensor_from_array(mat));
            return py::make_tuple(result.values, array_from_tensor(result.vectors));
        },
        py::arg("matrix"));

    m.def(
        "synth_dataset",
        [](int n_classes, const std::vector<int>& counts, int image_size,
           std::uint64_t seed) {
            data::DatasetSpec spec;
            spec.n_classes = n_classes;
            spec.counts = counts;
            spec.image_size = image_size;
            spec.seed = seed;
            py::list out;
            for (const auto& im : data::synth_lesion_dataset(spec))
                out.append(py::make_tuple(array_from_tensor(im.pixels), im.label));
            return out;
        },
        py::arg("n_classes"), py::arg("counts"), py::arg("image_size"), py::arg("seed"));

    m.def("load_ppm",
          [](const std::string& path) { return array_from_tensor(data::load_ppm(path)); },
          py::arg("path"));
    m.def(
        "save_ppm",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& image,
           const std::string& path) { data::save_ppm(tensor_from_array(image), path); },
        py::arg("image"), py::arg("path"));

    py::class_<gan::GanModel>(m, "GanModel")
        .def_property_readonly("latent_dim",
                               [](const gan::GanModel& m_) { return m_.config.latent_dim; })
        .def_property_readonly("image_size",
                               [](const gan::GanModel& m_) { return m_.config.image_size; })
        .def_property_readonly(
            "quantum_parameter_count",
            [](const gan::GanModel& m_) { return m_.generator.n_params(); })
        .def("save", &gan::save_checkpoint, py::arg("path"));

    m.def("load_checkpoint", &gan::load_checkpoint, py::arg("path"));

    m.def(
        "train_toy_model",
        [](int sub_generators, int qubits, int layers, int image_size,
           const std::vector<int>& counts, int warmup_epochs, int gan_epochs, int batch,
           std::uint64_t seed) {
            data::DatasetSpec spec;
            spec.n_classes = static_cast<int>(counts.size());
            spec.counts = counts;
            spec.image_size = image_size;
            spec.seed = seed;
            const auto dataset = data::synth_lesion_dataset(spec);

            gan::ModelConfig mc;
            mc.latent_dim = sub_generators * qubits;
            mc.sub_generators = sub_generators;
            mc.qubits = qubits;
            mc.layers = layers;
            mc.image_size = image_size;
            gan::GanModel model = gan::GanModel::init(mc, seed);

            gan::TrainConfig tc;
            tc.warmup_epochs = warmup_epochs;
            tc.gan_epochs = gan_epochs;
            tc.batch = batch;
            tc.seed = seed;
            const auto history = gan::train(model, dataset, tc);

            py::list stats;
            for (const auto& s : history) {
                py::dict row;
                row["epoch"] = s.epoch;
                row["loss_d"] = s.loss_d;
                row["loss_g"] = s.loss_g;
                row["loss_recon"] = s.loss_recon;
                row["r"] = s.r;
                row["fid"] = s.fid ? py::cast(*s.fid) : py::none();
                stats.append(row);
            }
            return py::make_tuple(std::move(model), stats);
        },
        py::arg("sub_generators") = 2, py::arg("qubits") = 5, py::arg("layers") = 2,
        py::arg("image_size") = 16, py::arg("counts") = std::vector<int>{8, 8, 8},
        py::arg("warmup_epochs") = 2, py::arg("gan_epochs") = 2, py::arg("batch") = 8,
        py::arg("seed") = 1);

    m.def(
        "generate_images",
        [](const gan::GanModel& model, int n, std::uint64_t seed, double depolarizing,
           double readout, int trajectories, int shots) {
            Rng rng(seed);
            const auto noise = make_noise(depolarizing, readout, trajectories, shots);
            py::list out;
            for (const Tensor& im : gan::generate(model, n, noise, rng))
                out.append(array_from_tensor(im));
            return out;
        },
        py::arg("model"), py::arg("n"), py::arg("seed") = 1,
        py::arg("depolarizing") = 0.0, py::arg("readout") = 0.0,
        py::arg("trajectories") = 1, py::arg("shots") = 0);
}
